#pragma once

// Task execution under a simulated unreliable regime: bit-flip fault
// injection, per-task or batched detection after each gang, and correction by
// reliable re-execution with full cycle accounting.

#include "sdc/mlp.hpp"
#include "sdc/rng.hpp"
#include "sdc/types.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace sdc {

struct TaskKind {
  std::string name;
  Index feature_dim = 0;
  Index output_len = 0;
  std::vector<std::string> feature_names;
  std::function<TaskOutput(std::span<const double>)> run;
  std::function<FeatureVector(std::span<const double>, std::span<const float>)> feature_of;
  std::function<double(std::span<const double>)> cycle_cost;
  /// Tasks matching this run reliably and are never checked. May be empty.
  std::function<bool(std::span<const double>)> always_reliable;
};

struct FaultModel {
  double rate_per_cycle = 1e-7;
  int max_bits_per_fault = 8;
  std::uint64_t rng_seed = 0;

  void validate() const;
  bool operator==(const FaultModel&) const = default;
};

inline constexpr std::uint64_t kMaxFaultsPerTask = 4096;

struct UnreliableResult {
  TaskOutput output;
  bool faulted = false;
  std::uint64_t fault_count = 0;
};

/// Draws k ~ Poisson(cycles * rate) faults; each flips 1..max_bits distinct
/// bits of one uniformly chosen output element.
UnreliableResult inject_faults(const TaskOutput& reliable, double cycles, const FaultModel& faults, Rng& rng);

UnreliableResult run_unreliable(const TaskKind& kind, std::span<const double> input, const FaultModel& faults, Rng& rng);

struct NoDetector {};

/// Knows the ground truth, costs nothing.
struct OracleDetector {};

/// Streaming per-dimension z-score outlier test: after `warmup` samples, a
/// vector with any |z| > threshold is Incorrect. Only accepted vectors update
/// the running statistics. A stand-in for online outlier detectors, not a
/// reproduction of any particular one.
class ZScoreBaseline {
 public:
  explicit ZScoreBaseline(double threshold = 4.0, std::size_t warmup = 256)
      : threshold_(threshold), warmup_(warmup) {}

  Verdict check(const FeatureVector& fv);
  /// 9 flops per dimension: 4 for the test, 5 for the Welford update.
  static double cost(Index dim) { return 9.0 * static_cast<double>(dim); }
  std::size_t samples() const { return count_; }

 private:
  void update(const FeatureVector& fv);

  double threshold_;
  std::size_t warmup_;
  std::size_t count_ = 0;
  Vector<double> mean_;
  Vector<double> m2_;
};

using Detector = std::variant<NoDetector, OracleDetector, std::shared_ptr<const DetectorModel>, ZScoreBaseline>;

/// "none", "oracle", "baseline" or "ann:<architecture>".
std::string detector_name(const Detector& detector);

struct ExecutionPolicy {
  Detector detector = NoDetector{};
  Index batch_size = 1;
  Index gang_size = 1024;

  void validate() const;
};

/// Elementwise arithmetic mean.
FeatureVector batch_aggregate(std::span<const FeatureVector> fvs);

/// Cycle proxy of one detection check over `batch_len` vectors of length `dim`.
double detection_cost(const ExecutionPolicy& policy, Index dim, std::size_t batch_len);

/// Verdict for one detection unit. `faulted` is only consulted by the oracle.
Verdict detect(ExecutionPolicy& policy, std::span<const FeatureVector> batch, std::span<const bool> faulted);

struct TaskRecord {
  std::size_t task_index = 0;
  TaskInput input;  // empty unless inputs were retained
  TaskOutput reliable_output;
  TaskOutput observed_output;
  bool faulted = false;
  std::uint64_t fault_count = 0;
  Verdict detector_verdict = Verdict::NotChecked;
  bool reexecuted = false;
  bool always_reliable = false;
  std::int64_t unit_index = -1;
  double cycles_task = 0.0;
  double cycles_detect = 0.0;
  double cycles_correct = 0.0;
};

/// A group of tasks checked together (one task when batch_size = 1).
struct DetectionUnit {
  std::vector<std::size_t> tasks;  // global task indices
  Verdict verdict = Verdict::Correct;
  bool any_faulted = false;
  double cycles_detect = 0.0;
};

struct RunResult {
  std::vector<TaskOutput> outputs;  // final, after correction
  std::vector<TaskRecord> records;
  std::vector<DetectionUnit> units;
};

struct ExecutionOptions {
  unsigned threads = 1;
  bool retain_inputs = false;
};

/// Runs one gang. Task i uses the fault stream (fault seed, first_task_index + i).
RunResult execute_gang(const TaskKind& kind, std::span<const TaskInput> inputs, std::size_t first_task_index,
                       ExecutionPolicy& policy, const FaultModel& faults, const ExecutionOptions& options = {});

/// Splits inputs into gangs of policy.gang_size and concatenates the results.
RunResult execute_workload(const TaskKind& kind, std::span<const TaskInput> inputs, ExecutionPolicy& policy,
                           const FaultModel& faults, const ExecutionOptions& options = {});

}  // namespace sdc
