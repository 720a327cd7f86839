#pragma once

// Experiment manifests: everything a run depends on, in one JSON document.
//
//   {
//     "format_version": 1,
//     "benchmark": "dct",
//     "seed": 1,
//     "inputs": {count, image_size, synthetic_images, train_images, validation_images, synthetic_fallback},
//     "fault_model": {rate_per_cycle, max_bits_per_fault, rng_seed},
//     "policy": {detector, batch_size, gang_size},
//     "train": {learning_rate, momentum, minibatch_size, initial_tickets, ticket_cap,
//               augment_period_epochs, max_epochs, rng_seed},
//     "perturbation": {strategy_weights, max_bits_flipped, max_elements, min_deviation,
//                      scale_exclusion, additive_sigma, perturbable_indices},
//     "frequency": {f_nominal, f_overclocked, v_nominal},
//     "epsilon": 0.33
//   }
//
// Missing sections and fields take their defaults. A zero rng_seed in
// fault_model or train means "derive from seed". An empty
// perturbable_indices list means the benchmark's output positions.

#include "sdc/augment.hpp"
#include "sdc/harness.hpp"
#include "sdc/kernels/benchmarks.hpp"
#include "sdc/mlp.hpp"
#include "sdc/perf_model.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace sdc {

inline constexpr int kManifestFormatVersion = 1;

struct PolicySpec {
  /// "none", "oracle", "baseline" or "ann:<architecture>".
  std::string detector = "oracle";
  Index batch_size = 1;
  Index gang_size = 1024;

  bool operator==(const PolicySpec&) const = default;
};

struct ExperimentManifest {
  int format_version = kManifestFormatVersion;
  std::string benchmark = "dct";
  std::uint64_t seed = 1;
  InputSpec inputs;
  FaultModel fault_model;
  PolicySpec policy;
  TrainConfig train;
  PerturbationParams perturbation;
  FrequencyPair frequency;
  double epsilon = kDefaultEpsilon;

  /// Throws ValidationError naming the offending field.
  void validate() const;
  bool operator==(const ExperimentManifest&) const = default;
};

/// Throws ValidationError unless `name` is a recognised policy string.
void validate_policy_name(const std::string& name);

std::string serialize_manifest(const ExperimentManifest& manifest);
ExperimentManifest parse_manifest(std::string_view json);
ExperimentManifest load_manifest(const std::filesystem::path& path);

/// 16 hex digits of FNV-1a over the serialized manifest.
std::string manifest_hash(const ExperimentManifest& manifest);

}  // namespace sdc
