#include "sdc/harness.hpp"

#include "sdc/augment.hpp"
#include "sdc/util.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace sdc {

void FaultModel::validate() const {
  if (!(rate_per_cycle >= 0.0 && rate_per_cycle <= 1.0))
    throw std::invalid_argument("fault_model.rate_per_cycle must be in [0,1]");
  if (max_bits_per_fault < 1 || max_bits_per_fault > 32)
    throw std::invalid_argument("fault_model.max_bits_per_fault must be in [1,32]");
}

UnreliableResult inject_faults(const TaskOutput& reliable, double cycles, const FaultModel& faults, Rng& rng) {
  UnreliableResult out{reliable, false, 0};
  if (reliable.empty() || faults.rate_per_cycle == 0.0) return out;
  out.fault_count = std::min(rng.poisson(cycles * faults.rate_per_cycle), kMaxFaultsPerTask);
  for (std::uint64_t f = 0; f < out.fault_count; ++f) {
    const auto element = rng.uniform_index(out.output.size());
    const int bits = static_cast<int>(rng.uniform_int(1, faults.max_bits_per_fault));
    out.output[element] = flip_bits(out.output[element], random_bit_mask(bits, rng));
  }
  for (std::size_t i = 0; i < reliable.size() && !out.faulted; ++i)
    out.faulted = std::bit_cast<std::uint32_t>(out.output[i]) != std::bit_cast<std::uint32_t>(reliable[i]);
  return out;
}

UnreliableResult run_unreliable(const TaskKind& kind, std::span<const double> input, const FaultModel& faults,
                                Rng& rng) {
  return inject_faults(kind.run(input), kind.cycle_cost(input), faults, rng);
}

void ZScoreBaseline::update(const FeatureVector& fv) {
  const Vector<double> x = fv.cast<double>();
  if (count_ == 0) {
    mean_ = Vector<double>::Zero(x.size());
    m2_ = Vector<double>::Zero(x.size());
  }
  ++count_;
  const Vector<double> delta = x - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta.cwiseProduct(x - mean_);
}

Verdict ZScoreBaseline::check(const FeatureVector& fv) {
  if (!fv.allFinite()) return Verdict::Incorrect;
  if (count_ > 0 && fv.size() != mean_.size()) throw std::invalid_argument("baseline: dimension mismatch");
  if (count_ < warmup_) {
    update(fv);
    return Verdict::Correct;
  }
  const double n = static_cast<double>(count_);
  for (Index i = 0; i < fv.size(); ++i) {
    const double sd = std::sqrt(m2_(i) / (n - 1.0));
    const double dev = std::abs(static_cast<double>(fv(i)) - mean_(i));
    const double z = sd > 0.0 ? dev / sd : (dev > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    if (z > threshold_) return Verdict::Incorrect;
  }
  update(fv);
  return Verdict::Correct;
}

std::string detector_name(const Detector& detector) {
  struct Visitor {
    std::string operator()(const NoDetector&) const { return "none"; }
    std::string operator()(const OracleDetector&) const { return "oracle"; }
    std::string operator()(const std::shared_ptr<const DetectorModel>& m) const {
      return "ann:" + m->metadata.architecture;
    }
    std::string operator()(const ZScoreBaseline&) const { return "baseline"; }
  };
  return std::visit(Visitor{}, detector);
}

void ExecutionPolicy::validate() const {
  if (batch_size < 1) throw std::invalid_argument("policy.batch_size must be positive");
  if (gang_size < 1) throw std::invalid_argument("policy.gang_size must be positive");
  if (batch_size > gang_size) throw std::invalid_argument("policy.batch_size must not exceed gang_size");
  if (const auto* m = std::get_if<std::shared_ptr<const DetectorModel>>(&detector); m && !*m)
    throw std::invalid_argument("policy: null detector model");
}

FeatureVector batch_aggregate(std::span<const FeatureVector> fvs) {
  if (fvs.empty()) throw std::invalid_argument("batch_aggregate: empty batch");
  if (fvs.size() == 1) return fvs.front();
  Vector<double> sum = Vector<double>::Zero(fvs.front().size());
  for (const auto& v : fvs) {
    if (v.size() != sum.size()) throw std::invalid_argument("batch_aggregate: dimension mismatch");
    sum += v.cast<double>();
  }
  return (sum / static_cast<double>(fvs.size())).cast<float>();
}

double detection_cost(const ExecutionPolicy& policy, Index dim, std::size_t batch_len) {
  struct Visitor {
    Index dim;
    double operator()(const NoDetector&) const { return 0.0; }
    double operator()(const OracleDetector&) const { return 0.0; }
    double operator()(const std::shared_ptr<const DetectorModel>& m) const { return forward_cost(*m); }
    double operator()(const ZScoreBaseline&) const { return ZScoreBaseline::cost(dim); }
  };
  const double check = std::visit(Visitor{dim}, policy.detector);
  if (check == 0.0 || batch_len <= 1) return check;
  // (b-1)*N additions plus N divisions to form the mean.
  return check + static_cast<double>(batch_len) * static_cast<double>(dim);
}

Verdict detect(ExecutionPolicy& policy, std::span<const FeatureVector> batch, std::span<const bool> faulted) {
  if (batch.empty()) throw std::invalid_argument("detect: empty batch");
  for (const auto& v : batch)
    if (v.size() != batch.front().size()) throw std::invalid_argument("detect: dimension mismatch");

  if (std::holds_alternative<NoDetector>(policy.detector)) return Verdict::Correct;
  if (std::holds_alternative<OracleDetector>(policy.detector))
    return std::any_of(faulted.begin(), faulted.end(), [](bool f) { return f; }) ? Verdict::Incorrect
                                                                                : Verdict::Correct;
  const FeatureVector fv = batch.size() == 1 ? batch.front() : batch_aggregate(batch);
  if (auto* model = std::get_if<std::shared_ptr<const DetectorModel>>(&policy.detector)) {
    if (fv.size() != (*model)->feature_dim()) throw std::invalid_argument("detect: dimension mismatch");
    return classify(**model, fv) == Label::Incorrect ? Verdict::Incorrect : Verdict::Correct;
  }
  return std::get<ZScoreBaseline>(policy.detector).check(fv);
}

RunResult execute_gang(const TaskKind& kind, std::span<const TaskInput> inputs, std::size_t first_task_index,
                       ExecutionPolicy& policy, const FaultModel& faults, const ExecutionOptions& options) {
  if (inputs.empty()) throw std::invalid_argument("execute_gang: empty gang");
  policy.validate();
  faults.validate();

  RunResult result;
  result.records.resize(inputs.size());
  result.outputs.resize(inputs.size());

  // Unreliable phase: tasks are independent; each owns its fault stream.
  parallel_for(inputs.size(), options.threads, [&](std::size_t i) {
    const std::span<const double> input(inputs[i]);
    TaskRecord& rec = result.records[i];
    rec.task_index = first_task_index + i;
    if (options.retain_inputs) rec.input = inputs[i];
    rec.cycles_task = kind.cycle_cost(input);
    rec.reliable_output = kind.run(input);
    rec.always_reliable = kind.always_reliable && kind.always_reliable(input);
    if (rec.always_reliable) {
      rec.observed_output = rec.reliable_output;
      return;
    }
    Rng rng = Rng::stream(faults.rng_seed, rec.task_index);
    auto unreliable = inject_faults(rec.reliable_output, rec.cycles_task, faults, rng);
    rec.observed_output = std::move(unreliable.output);
    rec.faulted = unreliable.faulted;
    rec.fault_count = unreliable.fault_count;
  });

  // Detection after the gang barrier, in task order.
  std::vector<std::size_t> checked;
  for (std::size_t i = 0; i < inputs.size(); ++i)
    if (!result.records[i].always_reliable) checked.push_back(i);

  const auto batch = static_cast<std::size_t>(policy.batch_size);
  for (std::size_t start = 0; start < checked.size(); start += batch) {
    const std::size_t len = std::min(batch, checked.size() - start);
    std::vector<FeatureVector> fvs;
    auto flags = std::make_unique<bool[]>(len);
    fvs.reserve(len);
    DetectionUnit unit;
    for (std::size_t k = 0; k < len; ++k) {
      const auto& rec = result.records[checked[start + k]];
      fvs.push_back(kind.feature_of(inputs[checked[start + k]], rec.observed_output));
      flags[k] = rec.faulted;
      unit.any_faulted = unit.any_faulted || rec.faulted;
      unit.tasks.push_back(rec.task_index);
    }
    unit.verdict = detect(policy, fvs, std::span<const bool>(flags.get(), len));
    unit.cycles_detect = detection_cost(policy, kind.feature_dim, len);

    const auto unit_index = static_cast<std::int64_t>(result.units.size());
    for (std::size_t k = 0; k < len; ++k) {
      auto& rec = result.records[checked[start + k]];
      rec.unit_index = unit_index;
      rec.detector_verdict = unit.verdict;
      rec.cycles_detect = unit.cycles_detect / static_cast<double>(len);
      if (unit.verdict == Verdict::Incorrect) {
        rec.reexecuted = true;
        rec.cycles_correct = rec.cycles_task;
      }
    }
    result.units.push_back(std::move(unit));
  }

  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto& rec = result.records[i];
    result.outputs[i] = rec.reexecuted ? rec.reliable_output : rec.observed_output;
  }
  return result;
}

RunResult execute_workload(const TaskKind& kind, std::span<const TaskInput> inputs, ExecutionPolicy& policy,
                           const FaultModel& faults, const ExecutionOptions& options) {
  policy.validate();
  RunResult all;
  all.outputs.reserve(inputs.size());
  all.records.reserve(inputs.size());
  const auto gang = static_cast<std::size_t>(policy.gang_size);
  for (std::size_t start = 0; start < inputs.size(); start += gang) {
    const std::size_t len = std::min(gang, inputs.size() - start);
    RunResult part = execute_gang(kind, inputs.subspan(start, len), start, policy, faults, options);
    const auto unit_offset = static_cast<std::int64_t>(all.units.size());
    for (auto& rec : part.records) {
      if (rec.unit_index >= 0) rec.unit_index += unit_offset;
      all.records.push_back(std::move(rec));
    }
    for (auto& out : part.outputs) all.outputs.push_back(std::move(out));
    for (auto& unit : part.units) all.units.push_back(std::move(unit));
  }
  return all;
}

}  // namespace sdc
