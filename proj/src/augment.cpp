#include "sdc/augment.hpp"

#include "sdc/metrics.hpp"

#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sdc {

void PerturbationParams::validate() const {
  double sum = 0.0;
  for (double w : strategy_weights) {
    if (w < 0.0) throw std::invalid_argument("perturbation.strategy_weights must be non-negative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("perturbation.strategy_weights must sum to 1");
  if (max_bits_flipped < 1 || max_bits_flipped > 32)
    throw std::invalid_argument("perturbation.max_bits_flipped must be in [1,32]");
  if (max_elements < 1) throw std::invalid_argument("perturbation.max_elements must be positive");
  if (!(min_deviation > 0.0)) throw std::invalid_argument("perturbation.min_deviation must be > 0");
  if (!(scale_exclusion >= 0.0 && scale_exclusion < 3.0))
    throw std::invalid_argument("perturbation.scale_exclusion must be in [0,3)");
  if (!(additive_sigma > 0.0)) throw std::invalid_argument("perturbation.additive_sigma must be > 0");
  for (Index i : perturbable_indices)
    if (i < 0) throw std::invalid_argument("perturbation.perturbable_indices must be non-negative");
}

float flip_bits(float value, std::uint32_t mask) {
  return std::bit_cast<float>(std::bit_cast<std::uint32_t>(value) ^ mask);
}

std::uint32_t random_bit_mask(int count, Rng& rng) {
  std::array<int, 32> bits{};
  std::iota(bits.begin(), bits.end(), 0);
  std::uint32_t mask = 0;
  // Partial Fisher-Yates: the first `count` slots are a uniform subset.
  for (int i = 0; i < count; ++i) {
    const auto j = i + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(32 - i)));
    std::swap(bits[static_cast<std::size_t>(i)], bits[static_cast<std::size_t>(j)]);
    mask |= 1u << bits[static_cast<std::size_t>(i)];
  }
  return mask;
}

namespace {

PerturbationStrategy pick_strategy(const std::array<double, 3>& weights, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (int s = 0; s < 3; ++s) {
    acc += weights[static_cast<std::size_t>(s)];
    if (u < acc) return static_cast<PerturbationStrategy>(s);
  }
  for (int s = 2; s >= 0; --s)
    if (weights[static_cast<std::size_t>(s)] > 0.0) return static_cast<PerturbationStrategy>(s);
  return PerturbationStrategy::BitFlip;
}

float corrupt_element(float x, float stdev, const PerturbationParams& p, Rng& rng) {
  switch (pick_strategy(p.strategy_weights, rng)) {
    case PerturbationStrategy::BitFlip: {
      const int bits = static_cast<int>(rng.uniform_int(1, p.max_bits_flipped));
      return flip_bits(x, random_bit_mask(bits, rng));
    }
    case PerturbationStrategy::ScaleNoise: {
      const double span = 3.0 - p.scale_exclusion;
      double u = rng.uniform(-span, span);
      u += u < 0.0 ? -p.scale_exclusion : p.scale_exclusion;
      return static_cast<float>(static_cast<double>(x) * std::pow(10.0, u));
    }
    case PerturbationStrategy::AdditiveNoise:
      return static_cast<float>(static_cast<double>(x) + p.additive_sigma * static_cast<double>(stdev) * rng.normal());
  }
  return x;
}

}  // namespace

FeatureVector perturb(const FeatureVector& fv, const PerturbationParams& params, std::span<const float> feature_std,
                      Rng& rng) {
  if (fv.size() == 0) throw std::invalid_argument("perturb: empty feature vector");
  if (!feature_std.empty() && static_cast<Index>(feature_std.size()) != fv.size())
    throw std::invalid_argument("perturb: feature_std length mismatch");

  std::vector<Index> eligible = params.perturbable_indices;
  if (eligible.empty()) {
    eligible.resize(static_cast<std::size_t>(fv.size()));
    std::iota(eligible.begin(), eligible.end(), Index{0});
  }
  for (Index i : eligible)
    if (i < 0 || i >= fv.size()) throw std::invalid_argument("perturb: perturbable index out of range");

  const std::span<const float> original(fv.data(), static_cast<std::size_t>(fv.size()));
  for (int attempt = 0; attempt < kMaxPerturbAttempts; ++attempt) {
    FeatureVector out = fv;
    const auto max_elems = std::min<std::uint64_t>(static_cast<std::uint64_t>(params.max_elements), eligible.size());
    const auto count = 1 + rng.uniform_index(max_elems);
    // Uniform subset of the eligible positions.
    std::vector<Index> pool = eligible;
    for (std::uint64_t k = 0; k < count; ++k) {
      const auto j = k + rng.uniform_index(pool.size() - k);
      std::swap(pool[k], pool[j]);
      const Index idx = pool[k];
      const float scale = feature_std.empty() ? std::max(std::abs(fv(idx)), 1.0f) : feature_std[static_cast<std::size_t>(idx)];
      out(idx) = corrupt_element(fv(idx), scale, params, rng);
    }
    const std::span<const float> candidate(out.data(), static_cast<std::size_t>(out.size()));
    if (elementwise_relative_error(candidate, original) >= params.min_deviation) return out;
  }
  throw std::runtime_error("perturb: cannot achieve minimum deviation");
}

std::vector<LabeledSample> balanced_epoch_set(std::span<const FeatureVector> correct_set,
                                              const PerturbationParams& params, std::span<const float> feature_std,
                                              Rng& rng) {
  if (correct_set.empty()) throw std::invalid_argument("balanced_epoch_set: empty correct set");
  std::vector<LabeledSample> out;
  out.reserve(2 * correct_set.size());
  for (const auto& fv : correct_set) {
    out.push_back({fv, Label::Correct});
    out.push_back({perturb(fv, params, feature_std, rng), Label::Incorrect});
  }
  rng.shuffle(out.begin(), out.end());
  return out;
}

}  // namespace sdc
