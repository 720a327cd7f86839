#pragma once

// The profile -> train -> evaluate -> simulate -> report flow driven by an
// experiment manifest. Every random choice derives from the manifest seed, so
// the same manifest reproduces the same files byte for byte.

#include "sdc/kernels/benchmarks.hpp"
#include "sdc/manifest.hpp"
#include "sdc/perf_model.hpp"
#include "sdc/trainer.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace sdc {

struct SeedPlan {
  std::uint64_t profile_inputs = 0;
  std::uint64_t validation_inputs = 0;
  std::uint64_t training = 0;
  std::uint64_t faults = 0;
};

SeedPlan seed_plan(const ExperimentManifest& manifest);

/// Manifest perturbation settings with benchmark defaults filled in: output
/// positions when no indices are given, max_elements capped to their count.
PerturbationParams effective_perturbation(const ExperimentManifest& manifest, const Benchmark& bench);

/// Feature vectors of the checked tasks of a reliable run over the
/// train-profile inputs; with policy.batch_size > 1, consecutive vectors are
/// mean-aggregated so detectors train on what they will see.
ProfileDataset build_profile(const ExperimentManifest& manifest, unsigned threads);

/// Writes <out>/profile.csv and <out>/profile.json; returns the CSV path.
std::filesystem::path cmd_profile(const ExperimentManifest& manifest, const std::filesystem::path& out_dir);

/// Trains the seven architectures; writes <out>/models/model_<arch>.json and
/// <out>/logs/train_<arch>.csv for each that succeeds.
std::vector<TrainingOutcome> cmd_train(const ExperimentManifest& manifest, const std::filesystem::path& profile_csv,
                                       const std::filesystem::path& out_dir);

using NamedModel = std::pair<std::string, std::shared_ptr<const DetectorModel>>;

/// Every model_*.json in `dir`, ordered by file name, checked against the benchmark.
std::vector<NamedModel> load_models(const std::filesystem::path& dir, const TaskKind& kind);

struct EvaluationSummary {
  std::vector<EvaluationReport> reports;  // ANN detectors, then oracle, none, baseline
  std::optional<std::string> fittest;
};

/// Runs the validation workload once per detector with shared fault outcomes.
EvaluationSummary evaluate(const ExperimentManifest& manifest, const std::vector<NamedModel>& models, unsigned threads);

/// Writes reports/<detector>.json, summary.csv, summary.md and evaluation.json
/// under `out_dir`. Throws NoViableDetector (after writing) when no ANN
/// detector is within the overhead budget.
EvaluationSummary cmd_evaluate(const ExperimentManifest& manifest, const std::filesystem::path& models_dir,
                               const std::filesystem::path& out_dir);

struct SimulationResult {
  RunResult run;
  EvaluationReport report;
};

/// Runs the validation workload under manifest.policy. `models_dir` is only
/// consulted for ann: policies.
SimulationResult simulate(const ExperimentManifest& manifest, const std::filesystem::path& models_dir,
                          unsigned threads);

/// Writes trace.ndjson and simulation.json under `out_dir`.
SimulationResult cmd_simulate(const ExperimentManifest& manifest, const std::filesystem::path& models_dir,
                              const std::filesystem::path& out_dir);

/// Renders report files into report.md and report.csv under `out_dir`.
void cmd_report(const std::vector<std::filesystem::path>& report_files, const std::filesystem::path& out_dir);

}  // namespace sdc
