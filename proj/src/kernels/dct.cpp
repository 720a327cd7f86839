#include "sdc/kernels/dct.hpp"

#include "sdc/metrics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sdc::dct {

SubBlockOffset sub_block_offset(int sub_block_index) {
  if (sub_block_index < 0 || sub_block_index >= kSubBlocks)
    throw std::invalid_argument("dct: sub-block index must be in [0, 8)");
  return {2 * (sub_block_index / 2), 4 * (sub_block_index % 2)};
}

const Block& basis() {
  static const Block c = [] {
    Block m;
    for (int u = 0; u < 8; ++u) {
      const double a = u == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
      for (int x = 0; x < 8; ++x) m(u, x) = a * std::cos((2.0 * x + 1.0) * u * std::numbers::pi / 16.0);
    }
    return m;
  }();
  return c;
}

Block forward(const Block& pixels) { return basis() * pixels * basis().transpose(); }

Block inverse(const Block& coefficients) { return basis().transpose() * coefficients * basis(); }

SubBlock task(const Block& pixels, int sub_block_index) {
  const auto off = sub_block_offset(sub_block_index);
  const Eigen::Matrix<double, 2, 8> rows = basis().middleRows<2>(off.row) * pixels;
  return rows * basis().middleRows<4>(off.col).transpose();
}

const Eigen::Matrix<double, 8, 8>& luminance_table() {
  static const Eigen::Matrix<double, 8, 8> q = [] {
    Eigen::Matrix<double, 8, 8> m;
    m << 16, 11, 10, 16, 24, 40, 51, 61,   //
        12, 12, 14, 19, 26, 58, 60, 55,    //
        14, 13, 16, 24, 40, 57, 69, 56,    //
        14, 17, 22, 29, 51, 87, 80, 62,    //
        18, 22, 37, 56, 68, 109, 103, 77,  //
        24, 35, 55, 64, 81, 104, 113, 92,  //
        49, 64, 78, 87, 103, 121, 120, 101,  //
        72, 92, 95, 98, 112, 100, 103, 99;
    return m;
  }();
  return q;
}

namespace {

void check_dims(const Eigen::MatrixXd& m) {
  if (m.rows() == 0 || m.cols() == 0 || m.rows() % 8 != 0 || m.cols() % 8 != 0)
    throw std::invalid_argument("dct: image dimensions must be positive multiples of 8");
}

double to_pixel(double v) {
  if (std::isnan(v)) return 0.0;
  return std::clamp(std::round(v), 0.0, 255.0);
}

}  // namespace

Eigen::MatrixXd reconstruct(const Eigen::MatrixXd& coefficients) {
  check_dims(coefficients);
  const auto& q = luminance_table();
  Eigen::MatrixXd out(coefficients.rows(), coefficients.cols());
  for (Index by = 0; by < coefficients.rows(); by += 8) {
    for (Index bx = 0; bx < coefficients.cols(); bx += 8) {
      const Block c = coefficients.block<8, 8>(by, bx);
      const Block dequant = (c.array() / q.array()).round() * q.array();
      out.block<8, 8>(by, bx) = inverse(dequant).unaryExpr(&to_pixel);
    }
  }
  return out;
}

Eigen::MatrixXd transform_image(const Eigen::MatrixXd& image) {
  check_dims(image);
  Eigen::MatrixXd out(image.rows(), image.cols());
  for (Index by = 0; by < image.rows(); by += 8)
    for (Index bx = 0; bx < image.cols(); bx += 8) out.block<8, 8>(by, bx) = forward(image.block<8, 8>(by, bx));
  return out;
}

double quality_psnr(const Eigen::MatrixXd& image, const Eigen::MatrixXd& coefficients) {
  if (image.rows() != coefficients.rows() || image.cols() != coefficients.cols())
    throw std::invalid_argument("dct: image and coefficient dimensions differ");
  const Eigen::MatrixXd rec = reconstruct(coefficients);
  return psnr(image, rec);
}

}  // namespace sdc::dct
