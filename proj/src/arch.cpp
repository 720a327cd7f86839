#include "sdc/arch.hpp"

#include <stdexcept>

namespace sdc {

std::vector<LayerSpec> ArchitectureSpec::layers() const {
  std::vector<LayerSpec> out;
  Index in = input_dim;
  for (Index h : hidden_sizes) {
    out.push_back({LayerKind::InnerProduct, in, h});
    out.push_back({LayerKind::Relu, h, h});
    in = h;
  }
  out.push_back({LayerKind::InnerProduct, in, 2});
  return out;
}

Index nearest_pow2(Index n) {
  if (n < 1) throw std::invalid_argument("nearest_pow2: n must be >= 1");
  Index lower = 1;
  while (lower * 2 <= n) lower *= 2;
  const Index upper = lower == n ? lower : lower * 2;
  const Index best = (n - lower < upper - n) ? lower : upper;
  return std::max(best, kMinLayerBase);
}

std::vector<ArchitectureSpec> synthesize(Index n) {
  const Index b = nearest_pow2(n);
  const std::vector<std::vector<Index>> shapes = {
      {}, {b / 2}, {b}, {2 * b}, {b / 2, b / 2}, {b, b / 2}, {2 * b, b / 2},
  };
  std::vector<ArchitectureSpec> out;
  out.reserve(shapes.size());
  for (const auto& hidden : shapes) {
    std::string name = std::to_string(n);
    for (Index h : hidden) name += "," + std::to_string(h);
    name += ",2";
    out.push_back({std::move(name), n, hidden});
  }
  return out;
}

}  // namespace sdc
