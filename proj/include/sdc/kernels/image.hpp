#pragma once

#include "sdc/rng.hpp"

#include <Eigen/Core>

#include <filesystem>

namespace sdc {

/// Grayscale image, rows = height, values in [0, 255].
using GrayImage = Eigen::MatrixXd;

/// Binary 8-bit PGM (P5, maxval <= 255). Throws ValidationError on malformed files.
GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const GrayImage& image);

struct SyntheticImageStyle {
  /// Orientation range of the background gradient, radians.
  double gradient_angle_min = 0.0;
  double gradient_angle_max = 3.14159;
  int shapes = 24;
  double noise_sigma = 4.0;
};

/// Smooth gradient + sinusoidal texture + filled rectangles and ellipses +
/// Gaussian noise, rounded to 8-bit levels.
GrayImage synthetic_image(Eigen::Index width, Eigen::Index height, const SyntheticImageStyle& style, Rng& rng);

}  // namespace sdc
