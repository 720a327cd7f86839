#include "sdc/perf_model.hpp"

#include <cmath>
#include <stdexcept>
#include <tuple>

namespace sdc {

void FrequencyPair::validate() const {
  if (!(f_nominal > 0.0)) throw ValidationError("frequency.f_nominal must be positive");
  if (!(f_overclocked >= f_nominal)) throw ValidationError("frequency.f_overclocked must be >= f_nominal");
}

CycleTotals cycle_totals(std::span<const TaskRecord> records) {
  CycleTotals t;
  for (const auto& r : records) {
    t.reliable += r.cycles_task;
    if (r.always_reliable)
      t.always_reliable += r.cycles_task;
    else
      t.unreliable_tasks += r.cycles_task;
    t.detect += r.cycles_detect;
    t.correct += r.cycles_correct;
  }
  return t;
}

double overhead(std::span<const TaskRecord> records, double reliable_total_cycles) {
  if (!(reliable_total_cycles > 0.0)) throw std::invalid_argument("overhead: reliable total must be positive");
  const auto t = cycle_totals(records);
  return (t.detect + t.correct) / reliable_total_cycles;
}

double overhead(const CycleTotals& totals) {
  if (!(totals.reliable > 0.0)) throw std::invalid_argument("overhead: reliable total must be positive");
  return (totals.detect + totals.correct) / totals.reliable;
}

double speedup(const CycleTotals& t, const FrequencyPair& freq) {
  freq.validate();
  if (!(t.reliable > 0.0)) throw std::invalid_argument("speedup: empty ledger");
  const double base = t.reliable / freq.f_nominal;
  const double run = t.unreliable_tasks / freq.f_overclocked + (t.always_reliable + t.detect + t.correct) / freq.f_nominal;
  return base / run;
}

double speedup(std::span<const TaskRecord> records, const FrequencyPair& freq) {
  return speedup(cycle_totals(records), freq);
}

double fault_rate_for_voltage(double v, double v_nominal) {
  return 1e-7 * std::pow(10.0, (0.85 * v_nominal - v) / 0.010);
}

ConfusionCounts unit_confusion(const RunResult& run) {
  ConfusionCounts c;
  for (const auto& u : run.units) {
    const bool flagged = u.verdict == Verdict::Incorrect;
    if (u.any_faulted)
      (flagged ? c.tp : c.fn)++;
    else
      (flagged ? c.fp : c.tn)++;
  }
  return c;
}

double run_missed_relative_error(const RunResult& run) {
  std::vector<OutputPair> missed;
  for (const auto& r : run.records)
    if (r.faulted && !r.reexecuted && !r.always_reliable) missed.push_back({r.observed_output, r.reliable_output});
  return missed_relative_error(missed);
}

EvaluationReport assess_run(const std::string& benchmark, const std::string& detector, const RunResult& run,
                            const QualityReport& quality, const FrequencyPair& freq, double epsilon) {
  EvaluationReport rep;
  rep.benchmark = benchmark;
  rep.detector = detector;
  rep.counts = unit_confusion(run);
  rep.cycles = cycle_totals(run.records);
  rep.tasks = run.records.size();
  for (const auto& r : run.records) rep.faulted_tasks += r.faulted ? 1 : 0;
  rep.score = score_detector(rep.counts, run_missed_relative_error(run), overhead(rep.cycles), epsilon);
  rep.quality = quality;
  rep.speedup = speedup(rep.cycles, freq);
  return rep;
}

const EvaluationReport& select_fittest(std::span<const EvaluationReport> reports) {
  if (reports.empty()) throw std::invalid_argument("select_fittest: no candidates");
  const EvaluationReport* best = nullptr;
  for (const auto& r : reports) {
    if (!std::isfinite(r.score.eeop)) continue;
    if (!best) {
      best = &r;
      continue;
    }
    const auto key = [](const EvaluationReport& x) { return std::tie(x.score.eeop, x.score.overhead, x.detector); };
    if (key(r) < key(*best)) best = &r;
  }
  if (!best) throw NoViableDetector("no viable detector");
  return *best;
}

}  // namespace sdc
