#include "sdc/metrics.hpp"

namespace sdc {

namespace {

std::optional<double> ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ConfusionRates confusion_rates(const ConfusionCounts& c) {
  if (c.total() == 0) throw std::invalid_argument("empty evaluation");
  ConfusionRates r;
  r.tpr = ratio(c.tp, c.tp + c.fn);
  r.fnr = ratio(c.fn, c.tp + c.fn);
  r.fpr = ratio(c.fp, c.fp + c.tn);
  r.tnr = ratio(c.tn, c.fp + c.tn);
  // Complementary rates must sum to exactly one.
  if (r.tpr) r.fnr = 1.0 - *r.tpr;
  if (r.tnr) r.fpr = 1.0 - *r.tnr;
  return r;
}

double expected_error(double tpr, double mre) {
  const double fnr = 1.0 - tpr;
  if (fnr == 0.0) return 0.0;
  return fnr * mre;
}

double eeop(double ee, double overhead, double epsilon) {
  if (overhead > epsilon) return std::numeric_limits<double>::infinity();
  if (std::isinf(ee)) return std::numeric_limits<double>::infinity();
  return ee * overhead;
}

double missed_relative_error(std::span<const OutputPair> fn_pairs) {
  if (fn_pairs.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& pair : fn_pairs) sum += elementwise_relative_error(pair.observed, pair.reliable);
  return sum / static_cast<double>(fn_pairs.size());
}

DetectorScore score_detector(const ConfusionCounts& counts, double mre, double overhead, double epsilon) {
  const ConfusionRates rates = confusion_rates(counts);
  DetectorScore s;
  s.tpr = rates.tpr;
  s.fpr = rates.fpr;
  s.tnr = rates.tnr;
  s.fnr = rates.fnr;
  s.mre = mre;
  // Undefined FNR (no positives existed) contributes no expected error.
  s.ee = rates.tpr ? expected_error(*rates.tpr, mre) : 0.0;
  s.overhead = overhead;
  s.eeop = eeop(s.ee, overhead, epsilon);
  return s;
}

}  // namespace sdc
