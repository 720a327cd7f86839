#include "sdc/kernels/inversek2j.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sdc::inversek2j {

namespace {
constexpr double kReachTolerance = 1e-12;
}

bool reachable(Point t, const Arm& arm) {
  const double r = std::hypot(t.x, t.y);
  return std::isfinite(r) && r >= std::abs(arm.l1 - arm.l2) - kReachTolerance && r <= arm.l1 + arm.l2 + kReachTolerance;
}

Angles solve(Point t, const Arm& arm) {
  if (!reachable(t, arm)) throw std::invalid_argument("inversek2j: target out of reach");
  const double c2 = (t.x * t.x + t.y * t.y - arm.l1 * arm.l1 - arm.l2 * arm.l2) / (2.0 * arm.l1 * arm.l2);
  const double theta2 = std::acos(std::clamp(c2, -1.0, 1.0));
  const double theta1 = std::atan2(t.y, t.x) - std::atan2(arm.l2 * std::sin(theta2), arm.l1 + arm.l2 * std::cos(theta2));
  return {theta1, theta2};
}

Point forward(Angles a, const Arm& arm) {
  return {arm.l1 * std::cos(a.theta1) + arm.l2 * std::cos(a.theta1 + a.theta2),
          arm.l1 * std::sin(a.theta1) + arm.l2 * std::sin(a.theta1 + a.theta2)};
}

}  // namespace sdc::inversek2j
