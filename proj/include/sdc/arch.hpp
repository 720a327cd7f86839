#pragma once

#include "sdc/mlp.hpp"

#include <string>
#include <vector>

namespace sdc {

/// One of the seven candidate detector shapes for a feature size N.
/// Names list every layer width, e.g. "10,8,4,2".
struct ArchitectureSpec {
  std::string name;
  Index input_dim = 0;
  std::vector<Index> hidden_sizes;

  /// IP[h0] -> ReLU -> IP[h1] -> ReLU -> ... -> IP[2].
  std::vector<LayerSpec> layers() const;
};

inline constexpr Index kMinLayerBase = 8;

/// Power of two closest to n; ties go to the larger power; never below 8.
Index nearest_pow2(Index n);

/// [], [B/2], [B], [2B], [B/2,B/2], [B,B/2], [2B,B/2] with B = nearest_pow2(n).
std::vector<ArchitectureSpec> synthesize(Index n);

}  // namespace sdc
