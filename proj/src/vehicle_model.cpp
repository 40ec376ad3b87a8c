#include "twinlane/vehicle_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "twinlane/errors.hpp"
#include "twinlane/geometry.hpp"

namespace twinlane {
namespace {

void require(bool ok, const char* what) {
  if (!ok) throw InvalidArgument(std::string("VehicleParams: ") + what);
}

double clamp_or_zero(double v, double lo, double hi) {
  if (std::isnan(v)) return 0.0;
  return std::clamp(v, lo, hi);
}

double sign(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

void validate(const VehicleParams& p) {
  require(p.wheelbase > 0.0, "wheelbase must be > 0");
  require(p.track_width > 0.0, "track_width must be > 0");
  require(p.mass > 0.0, "mass must be > 0");
  require(p.wheel_radius > 0.0, "wheel_radius must be > 0");
  require(p.max_steer > 0.0 && p.max_steer < std::numbers::pi / 2, "max_steer must be in (0, pi/2)");
  require(p.steer_rate_limit > 0.0, "steer_rate_limit must be > 0");
  require(p.gear_ratio > 0.0, "gear_ratio must be > 0");
  require(p.motor_stall_torque >= 0.0, "motor_stall_torque must be >= 0");
  require(p.motor_noload_speed > 0.0, "motor_noload_speed must be > 0");
  require(p.brake_force_max >= 0.0, "brake_force_max must be >= 0");
  require(p.drag_coeff >= 0.0, "drag_coeff must be >= 0");
  require(p.rolling_coeff >= 0.0, "rolling_coeff must be >= 0");
  require(p.gravity >= 0.0, "gravity must be >= 0");
}

double kv_to_noload_speed(double kv, double supply_voltage) {
  return kv * supply_voltage * 2.0 * std::numbers::pi / 60.0;
}

VehicleParams default_art_params(double supply_voltage) {
  VehicleParams p;
  p.motor_noload_speed = kv_to_noload_speed(kArtMotorKv, supply_voltage);
  validate(p);
  return p;
}

DriverInputs::DriverInputs(double t, double b, double s)
    : throttle(clamp_or_zero(t, 0.0, 1.0)),
      braking(clamp_or_zero(b, 0.0, 1.0)),
      steering(clamp_or_zero(s, -1.0, 1.0)) {}

double steer_map(double cmd, double current, double dt, const VehicleParams& p) {
  const double goal = std::clamp(cmd, -1.0, 1.0) * p.max_steer;
  const double max_delta = p.steer_rate_limit * dt;
  const double next = current + std::clamp(goal - current, -max_delta, max_delta);
  return std::clamp(next, -p.max_steer, p.max_steer);
}

double motor_force(double throttle, double speed, const VehicleParams& p) {
  const double shaft_speed = speed / p.wheel_radius * p.gear_ratio;
  const double torque =
      throttle * p.motor_stall_torque * std::max(0.0, 1.0 - shaft_speed / p.motor_noload_speed);
  return torque * p.gear_ratio / p.wheel_radius;
}

VehicleState step(const VehicleState& s, const DriverInputs& in, double dt, const VehicleParams& p) {
  if (!(dt > 0.0 && dt <= kMaxStepDt)) {
    throw SimulationError("step: dt " + std::to_string(dt) + " outside (0, 0.05]");
  }
  for (double v : {s.x, s.y, s.heading, s.speed, s.steer_angle, s.time}) {
    if (!std::isfinite(v)) throw SimulationError("step: non-finite vehicle state");
  }

  VehicleState n = s;
  n.steer_angle = steer_map(in.steering, s.steer_angle, dt, p);

  // Resistive forces alone may bring the vehicle to rest but never reverse it.
  const double dir = sign(s.speed);
  const double resist = in.braking * p.brake_force_max * dir + p.drag_coeff * s.speed * std::abs(s.speed) +
                        p.rolling_coeff * p.mass * p.gravity * dir;
  double v = s.speed - resist / p.mass * dt;
  if (v * s.speed < 0.0) v = 0.0;
  v += motor_force(in.throttle, s.speed, p) / p.mass * dt;
  n.speed = v;

  n.x = s.x + v * std::cos(s.heading) * dt;
  n.y = s.y + v * std::sin(s.heading) * dt;
  n.heading = wrap_angle(s.heading + v * std::tan(n.steer_angle) / p.wheelbase * dt);
  n.time = s.time + dt;
  return n;
}

double turn_radius(double steer_angle, const VehicleParams& p) {
  if (steer_angle == 0.0) throw InvalidArgument("turn_radius: zero steer angle has infinite radius");
  return p.wheelbase / std::abs(std::tan(steer_angle));
}

double calibrate_max_steer(std::span<const double> radii, const VehicleParams& p) {
  if (radii.empty()) throw InvalidArgument("calibrate_max_steer: no measurements");
  for (double r : radii) {
    if (!(r > 0.0)) throw InvalidArgument("calibrate_max_steer: radius must be > 0");
  }
  const double mean = std::accumulate(radii.begin(), radii.end(), 0.0) / static_cast<double>(radii.size());
  return std::atan(p.wheelbase / mean);
}

}  // namespace twinlane
