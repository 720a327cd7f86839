#pragma once

// File formats for profiles, training logs, evaluation reports and traces.
//
// Profile:     <name>.csv with a header of dimension names, one feature vector
//              per row; <name>.json sidecar {format_version, task_kind,
//              feature_dim, rows, seed, batch_size}.
// Training log: epoch,train_loss,test_loss,tickets
// Summary CSV: benchmark,detector,TPR,FPR,MRE,EE,overhead,EEOP,quality,speedup
//              (undefined rates are empty fields; infinities are "inf").
// Trace:       one JSON object per task record per line.

#include "sdc/harness.hpp"
#include "sdc/perf_model.hpp"
#include "sdc/trainer.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sdc {

inline constexpr int kReportFormatVersion = 1;

struct ProfileSidecar {
  std::string task_kind;
  Index feature_dim = 0;
  std::size_t rows = 0;
  std::uint64_t seed = 0;
  Index batch_size = 1;
};

std::string profile_csv(const ProfileDataset& profile);
ProfileDataset parse_profile_csv(std::string_view csv, const std::string& task_kind);

/// Writes `csv_path` and its sidecar (same stem, .json extension).
void save_profile(const std::filesystem::path& csv_path, const ProfileDataset& profile, std::uint64_t seed,
                  Index batch_size = 1);
ProfileDataset load_profile(const std::filesystem::path& csv_path, ProfileSidecar* sidecar = nullptr);

std::string training_log_csv(std::span<const TrainingLogEntry> log);

std::string report_json(const EvaluationReport& report);
EvaluationReport parse_report(std::string_view json);
EvaluationReport load_report(const std::filesystem::path& path);

inline constexpr const char* kSummaryHeader = "benchmark,detector,TPR,FPR,MRE,EE,overhead,EEOP,quality,speedup";

std::string summary_csv(std::span<const EvaluationReport> reports);

/// Reports sorted by EEOP ascending (stable); the fittest row is marked.
std::string summary_markdown(std::span<const EvaluationReport> reports);

/// NDJSON, one line per record in task order. Outputs are elided unless
/// `with_outputs`.
std::string trace_ndjson(std::span<const TaskRecord> records, bool with_outputs);

}  // namespace sdc
