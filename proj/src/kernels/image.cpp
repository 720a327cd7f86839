#include "sdc/kernels/image.hpp"

#include "sdc/types.hpp"
#include "sdc/util.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

namespace sdc {

namespace {

// Reads the next whitespace-separated header token, skipping '#' comments.
std::string next_token(const std::string& data, std::size_t& pos) {
  for (;;) {
    while (pos < data.size() && std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
    if (pos < data.size() && data[pos] == '#') {
      while (pos < data.size() && data[pos] != '\n') ++pos;
      continue;
    }
    break;
  }
  const std::size_t start = pos;
  while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
  return data.substr(start, pos - start);
}

int parse_header_int(const std::string& token, const std::filesystem::path& path) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(token, &used);
    if (used != token.size() || v <= 0) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("pgm: bad header field '" + token + "' in " + path.string());
  }
}

}  // namespace

GrayImage read_pgm(const std::filesystem::path& path) {
  const std::string data = read_file(path);
  std::size_t pos = 0;
  if (next_token(data, pos) != "P5") throw ValidationError("pgm: not a binary P5 file: " + path.string());
  const int width = parse_header_int(next_token(data, pos), path);
  const int height = parse_header_int(next_token(data, pos), path);
  const int maxval = parse_header_int(next_token(data, pos), path);
  if (maxval > 255) throw ValidationError("pgm: only 8-bit images are supported: " + path.string());
  ++pos;  // single whitespace before the raster
  const auto needed = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (data.size() < pos + needed) throw ValidationError("pgm: truncated raster in " + path.string());
  GrayImage img(height, width);
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c)
      img(r, c) = static_cast<unsigned char>(data[pos + static_cast<std::size_t>(r) * width + c]);
  return img;
}

void write_pgm(const std::filesystem::path& path, const GrayImage& image) {
  std::string out = "P5\n" + std::to_string(image.cols()) + " " + std::to_string(image.rows()) + "\n255\n";
  out.reserve(out.size() + static_cast<std::size_t>(image.size()));
  for (Eigen::Index r = 0; r < image.rows(); ++r)
    for (Eigen::Index c = 0; c < image.cols(); ++c) {
      const double v = std::isnan(image(r, c)) ? 0.0 : std::clamp(std::round(image(r, c)), 0.0, 255.0);
      out.push_back(static_cast<char>(static_cast<unsigned char>(v)));
    }
  write_file_atomic(path, out);
}

GrayImage synthetic_image(Eigen::Index width, Eigen::Index height, const SyntheticImageStyle& style, Rng& rng) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("synthetic_image: empty image");
  const double angle = rng.uniform(style.gradient_angle_min, style.gradient_angle_max);
  const double base = rng.uniform(60.0, 140.0);
  const double slope = rng.uniform(40.0, 90.0);
  const double scale = static_cast<double>(std::max(width, height));

  struct Wave {
    double fx, fy, phase, amp;
  };
  std::vector<Wave> waves(3);
  for (auto& w : waves)
    w = {rng.uniform(1.0, 12.0), rng.uniform(1.0, 12.0), rng.uniform(0.0, 2.0 * std::numbers::pi), rng.uniform(4.0, 12.0)};

  GrayImage img(height, width);
  for (Eigen::Index r = 0; r < height; ++r) {
    for (Eigen::Index c = 0; c < width; ++c) {
      const double u = static_cast<double>(c) / scale;
      const double v = static_cast<double>(r) / scale;
      double value = base + slope * (std::cos(angle) * u + std::sin(angle) * v);
      for (const auto& w : waves) value += w.amp * std::sin(2.0 * std::numbers::pi * (w.fx * u + w.fy * v) + w.phase);
      img(r, c) = value;
    }
  }

  for (int s = 0; s < style.shapes; ++s) {
    const double cx = rng.uniform(0.0, static_cast<double>(width));
    const double cy = rng.uniform(0.0, static_cast<double>(height));
    const double rx = rng.uniform(0.02, 0.15) * scale;
    const double ry = rng.uniform(0.02, 0.15) * scale;
    const double level = rng.uniform(10.0, 245.0);
    const double alpha = rng.uniform(0.4, 0.9);
    const bool ellipse = rng.bernoulli(0.5);
    const auto r0 = static_cast<Eigen::Index>(std::max(0.0, cy - ry));
    const auto r1 = static_cast<Eigen::Index>(std::min(static_cast<double>(height), cy + ry));
    const auto c0 = static_cast<Eigen::Index>(std::max(0.0, cx - rx));
    const auto c1 = static_cast<Eigen::Index>(std::min(static_cast<double>(width), cx + rx));
    for (Eigen::Index r = r0; r < r1; ++r)
      for (Eigen::Index c = c0; c < c1; ++c) {
        if (ellipse) {
          const double dx = (static_cast<double>(c) - cx) / rx;
          const double dy = (static_cast<double>(r) - cy) / ry;
          if (dx * dx + dy * dy > 1.0) continue;
        }
        img(r, c) = (1.0 - alpha) * img(r, c) + alpha * level;
      }
  }

  for (Eigen::Index r = 0; r < height; ++r)
    for (Eigen::Index c = 0; c < width; ++c)
      img(r, c) = std::clamp(std::round(img(r, c) + style.noise_sigma * rng.normal()), 0.0, 255.0);
  return img;
}

}  // namespace sdc
