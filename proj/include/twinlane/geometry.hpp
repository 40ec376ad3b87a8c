#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Core>

namespace twinlane {

using Vec2 = Eigen::Vector2d;

/// Planar pose: position in metres, heading in radians (CCW from +x).
struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;

  Vec2 position() const { return {x, y}; }
  bool operator==(const Pose2&) const = default;
};

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
  double r = std::remainder(a, 2.0 * std::numbers::pi);
  if (r <= -std::numbers::pi) r += 2.0 * std::numbers::pi;
  return r;
}

inline Eigen::Matrix2d rotation(double heading) {
  const double c = std::cos(heading), s = std::sin(heading);
  Eigen::Matrix2d r;
  r << c, -s, s, c;
  return r;
}

/// World point expressed in the frame of `pose` (x forward, y left).
inline Vec2 to_body(const Pose2& pose, const Vec2& world) {
  const double c = std::cos(pose.heading), s = std::sin(pose.heading);
  const Vec2 d = world - pose.position();
  return {c * d.x() + s * d.y(), -s * d.x() + c * d.y()};
}

inline Vec2 to_world(const Pose2& pose, const Vec2& body) {
  const double c = std::cos(pose.heading), s = std::sin(pose.heading);
  return {pose.x + c * body.x() - s * body.y(), pose.y + s * body.x() + c * body.y()};
}

}  // namespace twinlane
