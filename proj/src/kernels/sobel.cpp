#include "sdc/kernels/sobel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sdc::sobel {

Eigen::VectorXd row(const Strip& s) {
  if (s.cols() < 3) throw std::invalid_argument("sobel: strip must be at least 3 pixels wide");
  const Eigen::Index n = s.cols() - 2;
  Eigen::VectorXd out(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double gx = (s(0, j + 2) + 2.0 * s(1, j + 2) + s(2, j + 2)) - (s(0, j) + 2.0 * s(1, j) + s(2, j));
    const double gy = (s(2, j) + 2.0 * s(2, j + 1) + s(2, j + 2)) - (s(0, j) + 2.0 * s(0, j + 1) + s(0, j + 2));
    out(j) = std::clamp(std::abs(gx) + std::abs(gy), 0.0, 255.0);
  }
  return out;
}

}  // namespace sdc::sobel
