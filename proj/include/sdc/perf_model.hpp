#pragma once

// Cycle ledger aggregation, speedup of overclocked execution against a
// reliable baseline, and EEOP-based detector selection.

#include "sdc/harness.hpp"
#include "sdc/metrics.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sdc {

struct FrequencyPair {
  double f_nominal = 1.67;       // GHz
  double f_overclocked = 3.7;    // GHz
  double v_nominal = 0.9;        // volts, informational

  void validate() const;
  double bound() const { return f_overclocked / f_nominal; }
  bool operator==(const FrequencyPair&) const = default;
};

struct CycleTotals {
  double reliable = 0.0;          // every task once, reliably
  double unreliable_tasks = 0.0;  // tasks run overclocked
  double always_reliable = 0.0;   // tasks pinned to nominal frequency
  double detect = 0.0;
  double correct = 0.0;
};

CycleTotals cycle_totals(std::span<const TaskRecord> records);

/// (detect + correct) / reliable_total.
double overhead(std::span<const TaskRecord> records, double reliable_total_cycles);
double overhead(const CycleTotals& totals);

/// T_base / T_run with T_base = reliable / f_nom and
/// T_run = unreliable / f_over + (always_reliable + detect + correct) / f_nom.
double speedup(const CycleTotals& totals, const FrequencyPair& freq);
double speedup(std::span<const TaskRecord> records, const FrequencyPair& freq);

/// Fault rate per cycle at supply voltage `v`: 1e-7 at 85% of nominal,
/// one decade per 10 mV below that.
double fault_rate_for_voltage(double v, double v_nominal = 0.9);

struct EvaluationReport {
  std::string benchmark;
  std::string detector;
  ConfusionCounts counts;
  DetectorScore score;
  QualityReport quality;
  double speedup = 0.0;
  CycleTotals cycles;
  std::uint64_t faulted_tasks = 0;
  std::uint64_t tasks = 0;
  std::string manifest_hash;
  bool fittest = false;
};

/// Positive = detection unit holding at least one faulted task. Oracle-free:
/// works for any policy, including none (never flags).
ConfusionCounts unit_confusion(const RunResult& run);

/// Mean relative error of the outputs the detector let through while faulted.
double run_missed_relative_error(const RunResult& run);

EvaluationReport assess_run(const std::string& benchmark, const std::string& detector, const RunResult& run,
                            const QualityReport& quality, const FrequencyPair& freq, double epsilon = kDefaultEpsilon);

/// Minimum EEOP; ties by lower overhead, then detector name. Throws
/// NoViableDetector when no candidate has finite EEOP.
const EvaluationReport& select_fittest(std::span<const EvaluationReport> reports);

}  // namespace sdc
