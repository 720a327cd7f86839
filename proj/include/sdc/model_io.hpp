#pragma once

// Detector model files: one JSON document per detector.
//
//   {
//     "format_version": 1,
//     "metadata": {task_kind, feature_dim, architecture, training_seed,
//                  best_test_loss, epochs, train_config: {...}},
//     "layers": [{"kind": "inner_product" | "relu", "in_dim", "out_dim"}, ...],
//     "normalization": {"mean": [...], "std": [...]},
//     "parameters": [{"weights": [row-major out_dim x in_dim], "bias": [...]}, ...]
//   }
//
// Parameters are float32 values written as the shortest decimal that
// round-trips, so parse -> serialize is byte-identical.

#include "sdc/mlp.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace sdc {

inline constexpr int kModelFormatVersion = 1;

std::string serialize_model(const DetectorModel& model);

/// Throws ValidationError on malformed documents or a format version mismatch.
DetectorModel parse_model(std::string_view json);

void save_model(const std::filesystem::path& path, const DetectorModel& model);
DetectorModel load_model(const std::filesystem::path& path);

/// "model_<architecture>.json", e.g. model_10,8,2.json.
std::string model_filename(const std::string& architecture);

}  // namespace sdc
