#pragma once

#include <Eigen/Core>

namespace sdc::sobel {

using Strip = Eigen::Matrix<double, 3, Eigen::Dynamic>;

/// |Gx| + |Gy| with the 3x3 Sobel stencils centred on row 1, for every column
/// with both neighbours, clamped to [0, 255]. Needs width >= 3.
Eigen::VectorXd row(const Strip& strip);

inline constexpr Eigen::Index kTileWidth = 16;

/// Per output: Gx 7, Gy 7, abs/abs/add 3, clamp 1.
inline constexpr double kCostPerOutput = 18.0;
inline constexpr double kTaskCost = kCostPerOutput * static_cast<double>(kTileWidth);

}  // namespace sdc::sobel
