#pragma once

namespace sdc::inversek2j {

struct Arm {
  double l1 = 0.5;
  double l2 = 0.5;
};

struct Angles {
  double theta1 = 0.0;
  double theta2 = 0.0;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

bool reachable(Point target, const Arm& arm = {});

/// Closed-form two-link inverse kinematics, elbow angle in [0, pi].
/// Throws std::invalid_argument for unreachable targets.
Angles solve(Point target, const Arm& arm = {});

Point forward(Angles angles, const Arm& arm = {});

/// squares 2, add 1, sub 1, scale 1, clamp 2, acos 20, sin 20, cos 20,
/// l2*sin + l2*cos 2, add 1, two atan2 40, sub 1 (transcendentals weigh 20).
inline constexpr double kTaskCost = 111.0;

}  // namespace sdc::inversek2j
