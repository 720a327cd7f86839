#pragma once

// Synthesizes labeled incorrect feature vectors by perturbing correct ones,
// and assembles label-balanced training sets.

#include "sdc/rng.hpp"
#include "sdc/types.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace sdc {

enum class PerturbationStrategy : int { BitFlip = 0, ScaleNoise = 1, AdditiveNoise = 2 };

struct PerturbationParams {
  /// Sampling weights for {bitflip, scale_noise, additive_noise}; must sum to 1.
  std::array<double, 3> strategy_weights{0.6, 0.2, 0.2};
  int max_bits_flipped = 8;
  /// Each perturbation touches 1..max_elements positions.
  int max_elements = 2;
  /// Minimum elementwise relative error between perturbed and original.
  double min_deviation = 0.01;
  /// Scale noise multiplies by 10^u, u ~ U([-3,3] \ (-scale_exclusion, scale_exclusion)).
  double scale_exclusion = 0.05;
  /// Additive noise is N(0, (additive_sigma * std_i)^2).
  double additive_sigma = 1.0;
  /// Positions eligible for corruption; empty means every position.
  std::vector<Index> perturbable_indices;

  void validate() const;
  bool operator==(const PerturbationParams&) const = default;
};

inline constexpr int kMaxPerturbAttempts = 64;

/// XOR `mask` into the IEEE-754 single-precision encoding of `value`.
float flip_bits(float value, std::uint32_t mask);

/// A mask with `count` distinct bits set among the 32, uniformly chosen.
std::uint32_t random_bit_mask(int count, Rng& rng);

/// Returns a corrupted copy of `fv` deviating by at least min_deviation.
/// `feature_std` scales additive noise (empty: per-element max(|x|, 1)).
/// Throws std::runtime_error after kMaxPerturbAttempts failed draws.
FeatureVector perturb(const FeatureVector& fv, const PerturbationParams& params, std::span<const float> feature_std,
                      Rng& rng);

struct LabeledSample {
  FeatureVector features;
  Label label = Label::Correct;
};

/// Every correct vector labeled Correct plus one fresh perturbation of each
/// labeled Incorrect, shuffled by `rng`.
std::vector<LabeledSample> balanced_epoch_set(std::span<const FeatureVector> correct_set,
                                              const PerturbationParams& params, std::span<const float> feature_std,
                                              Rng& rng);

}  // namespace sdc
