#pragma once

// Detector evaluation metrics: confusion rates, missed relative error (MRE),
// expected error (EE), the overhead-gated EEOP fitness score, and the
// application quality measures (PSNR, relative error).

#include "sdc/types.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace sdc {

/// "Positive" means the detector says Incorrect.
struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + fp + tn + fn; }
  bool operator==(const ConfusionCounts&) const = default;
};

/// A rate whose denominator is zero is std::nullopt ("undefined").
struct ConfusionRates {
  std::optional<double> tpr;
  std::optional<double> fpr;
  std::optional<double> tnr;
  std::optional<double> fnr;
};

struct DetectorScore {
  std::optional<double> tpr;
  std::optional<double> fpr;
  std::optional<double> tnr;
  std::optional<double> fnr;
  double mre = 0.0;
  double ee = 0.0;
  double overhead = 0.0;
  double eeop = 0.0;
};

enum class QualityKind { PsnrDb, MeanRelativeError };

struct QualityReport {
  QualityKind kind = QualityKind::MeanRelativeError;
  double value = 0.0;
  double baseline_value = 0.0;
};

inline constexpr double kRelativeErrorGuard = 1e-12;
inline constexpr double kDefaultEpsilon = 0.33;
inline constexpr double kDefaultPeak = 255.0;

/// Throws std::invalid_argument("empty evaluation") when every count is zero.
ConfusionRates confusion_rates(const ConfusionCounts& counts);

/// (1 - tpr) * mre.
double expected_error(double tpr, double mre);

/// ee * overhead when overhead <= epsilon, +inf otherwise.
double eeop(double ee, double overhead, double epsilon = kDefaultEpsilon);

/// Mean over i of |a_i - b_i| / max(|b_i|, 1e-12). Elements that differ with a
/// non-finite ratio (NaN/inf corruption) contribute +inf.
template <typename T>
double elementwise_relative_error(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size()) throw std::invalid_argument("elementwise_relative_error: length mismatch");
  if (a.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ai = static_cast<double>(a[i]);
    const double bi = static_cast<double>(b[i]);
    if (ai == bi) continue;
    const double r = std::abs(ai - bi) / std::max(std::abs(bi), kRelativeErrorGuard);
    sum += std::isfinite(r) ? r : std::numeric_limits<double>::infinity();
  }
  return sum / static_cast<double>(a.size());
}

template <typename T>
double elementwise_relative_error(const std::vector<T>& a, const std::vector<T>& b) {
  return elementwise_relative_error(std::span<const T>(a), std::span<const T>(b));
}

/// One false-negative outcome: what the unreliable run produced vs. the truth.
struct OutputPair {
  TaskOutput observed;
  TaskOutput reliable;
};

/// Mean elementwise relative error over the missed (false-negative) outputs; 0 if none.
double missed_relative_error(std::span<const OutputPair> fn_pairs);

/// 10 log10(peak^2 / MSE); +inf for identical signals.
template <typename T>
double psnr(std::span<const T> a, std::span<const T> b, double peak = kDefaultPeak) {
  if (a.size() != b.size()) throw std::invalid_argument("psnr: length mismatch");
  if (!(peak > 0.0)) throw std::invalid_argument("psnr: peak must be positive");
  if (a.empty()) throw std::invalid_argument("psnr: empty signal");
  double sse = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    sse += d * d;
  }
  if (sse == 0.0) return std::numeric_limits<double>::infinity();
  const double mse = sse / static_cast<double>(a.size());
  return 10.0 * std::log10(peak * peak / mse);
}

template <typename Derived>
double psnr(const Eigen::DenseBase<Derived>& a, const Eigen::DenseBase<Derived>& b,
            double peak = kDefaultPeak) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("psnr: shape mismatch");
  using Scalar = typename Derived::Scalar;
  const Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> ea = a.derived().template cast<Scalar>();
  const Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> eb = b.derived().template cast<Scalar>();
  return psnr(std::span<const Scalar>(ea.data(), static_cast<std::size_t>(ea.size())),
              std::span<const Scalar>(eb.data(), static_cast<std::size_t>(eb.size())), peak);
}

/// Assembles every Table-style score field from raw outcomes.
DetectorScore score_detector(const ConfusionCounts& counts, double mre, double overhead,
                             double epsilon = kDefaultEpsilon);

}  // namespace sdc
