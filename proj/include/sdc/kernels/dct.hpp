#pragma once

// 8x8 orthonormal type-II DCT split into eight 2x4 coefficient tasks, plus
// the JPEG-style quantize / dequantize / inverse pipeline used for quality.

#include "sdc/types.hpp"

#include <Eigen/Core>

namespace sdc::dct {

using Block = Eigen::Matrix<double, 8, 8>;
using SubBlock = Eigen::Matrix<double, 2, 4>;

inline constexpr int kSubBlocks = 8;

struct SubBlockOffset {
  int row = 0;  // 0, 2, 4, 6
  int col = 0;  // 0, 4
};

/// Index 0..7 maps row-major onto the 4x2 grid of 2x4 regions.
SubBlockOffset sub_block_offset(int sub_block_index);

/// C(u, x) = a(u) cos((2x + 1) u pi / 16), a(0) = sqrt(1/8), a(u>0) = sqrt(2/8).
const Block& basis();

Block forward(const Block& pixels);
Block inverse(const Block& coefficients);

/// Coefficients of one 2x4 region: C[rows] * X * C[cols]^T.
SubBlock task(const Block& pixels, int sub_block_index);

/// (C_r X) C_c^T: 2*8*8 + 2*8*4 multiply-accumulates, 2 flops each.
inline constexpr double kTaskCost = 384.0;

/// JPEG Annex K luminance quantization table.
const Eigen::Matrix<double, 8, 8>& luminance_table();

/// Quantize, dequantize, inverse transform, round and clamp to [0, 255]
/// (NaN maps to 0). `coefficients` is tiled in 8x8 blocks.
Eigen::MatrixXd reconstruct(const Eigen::MatrixXd& coefficients);

/// Full forward transform of an image (dimensions multiples of 8).
Eigen::MatrixXd transform_image(const Eigen::MatrixXd& image);

/// PSNR (peak 255) of reconstruct(coefficients) against the source image.
double quality_psnr(const Eigen::MatrixXd& image, const Eigen::MatrixXd& coefficients);

}  // namespace sdc::dct
