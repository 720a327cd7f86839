#pragma once

#include "sdc/arch.hpp"
#include "sdc/augment.hpp"
#include "sdc/mlp.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sdc {

/// Feature vectors recorded from reliable executions of one task kind.
struct ProfileDataset {
  std::string task_kind;
  Index feature_dim = 0;
  std::vector<std::string> dimension_names;
  std::vector<FeatureVector> vectors;

  void validate() const;
};

struct ProfileSplit {
  std::vector<FeatureVector> train;
  std::vector<FeatureVector> test;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
};

inline constexpr double kDefaultSplitRatio = 0.9;

/// Seeded shuffle; the first ceil(ratio * n) go to train. Needs n >= 10.
ProfileSplit split_profile(const ProfileDataset& profile, double ratio, Rng& rng);

/// Early-stopping state. An epoch whose test loss is below the previous
/// epoch's earns a ticket (capped); any other epoch, including the first,
/// costs two. Training stops once tickets <= 0.
struct TicketState {
  int tickets = 100;
  std::optional<double> previous_loss;
  double best_test_loss = std::numeric_limits<double>::infinity();
  int epoch = 0;

  bool exhausted() const { return tickets <= 0; }
};

TicketState ticket_update(TicketState state, double test_loss, int ticket_cap = 100);

struct TrainingLogEntry {
  int epoch = 0;
  double train_loss = 0.0;
  double test_loss = 0.0;
  int tickets = 0;
};

struct TrainingResult {
  DetectorModel model;
  std::vector<TrainingLogEntry> log;
};

class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged() : std::runtime_error("training diverged") {}
};

/// Trains one architecture and returns the snapshot with the lowest test
/// loss. Balanced train/test sets are regenerated every
/// augment_period_epochs from independent streams of config.rng_seed.
TrainingResult train_detector(const ArchitectureSpec& arch, std::span<const FeatureVector> train_set,
                              std::span<const FeatureVector> test_set, const TrainConfig& config,
                              const PerturbationParams& params, const std::string& task_kind = {});

struct TrainingOutcome {
  ArchitectureSpec arch;
  std::optional<TrainingResult> result;
  std::string error;  // set when result is empty
};

/// Per-architecture training seed: independent of the other six.
std::uint64_t architecture_seed(std::uint64_t master_seed, std::size_t arch_index);

/// Splits the profile and trains all seven synthesized architectures.
/// A failing architecture reports its error without aborting the others.
std::vector<TrainingOutcome> train_all(const ProfileDataset& profile, const TrainConfig& config,
                                       const PerturbationParams& params, unsigned threads = 1);

/// Column-wise mean and (floored) population standard deviation, rounded to float.
std::pair<Vector<float>, Vector<float>> feature_statistics(std::span<const FeatureVector> vectors);

}  // namespace sdc
