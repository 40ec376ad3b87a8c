#pragma once

#include <numbers>
#include <span>

namespace twinlane {

inline constexpr double kArtMotorKv = 1300.0;          // rpm per volt
inline constexpr double kDefaultSupplyVoltage = 11.1;  // 3S pack

/// Physical parameters of the scale vehicle. Field names double as the
/// config keys under `vehicle:`.
struct VehicleParams {
  double wheelbase = 0.47;          // m
  double track_width = 0.34;        // m
  double mass = 12.0;               // kg
  double wheel_radius = 0.095;      // m
  double max_steer = 0.4;           // rad, road-wheel angle
  double steer_rate_limit = 3.0;    // rad/s
  double gear_ratio = 9.0;          // motor rev per wheel rev
  double motor_stall_torque = 1.2;  // N m
  double motor_noload_speed =       // rad/s at the motor shaft
      kArtMotorKv * kDefaultSupplyVoltage * 2.0 * std::numbers::pi / 60.0;
  double brake_force_max = 40.0;    // N
  double drag_coeff = 0.8;          // N s^2/m^2
  double rolling_coeff = 0.02;
  double gravity = 9.81;            // m/s^2

  bool operator==(const VehicleParams&) const = default;
};

/// Throws InvalidArgument naming the first violated invariant.
void validate(const VehicleParams& params);

/// No-load motor shaft speed in rad/s for a KV rating at a supply voltage.
double kv_to_noload_speed(double kv, double supply_voltage);

/// Parameters of the 1/6th-scale platform; unspecified values come from the
/// defaults in VehicleParams.
VehicleParams default_art_params(double supply_voltage = kDefaultSupplyVoltage);

/// Actuation command. Fields are clamped on construction.
struct DriverInputs {
  double throttle = 0.0;  // [0, 1]
  double braking = 0.0;   // [0, 1]
  double steering = 0.0;  // [-1, 1], positive turns left

  DriverInputs() = default;
  DriverInputs(double throttle, double braking, double steering);

  bool operator==(const DriverInputs&) const = default;
};

struct VehicleState {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;      // (-pi, pi]
  double speed = 0.0;        // longitudinal, signed
  double steer_angle = 0.0;  // actual road-wheel angle
  double time = 0.0;

  bool operator==(const VehicleState&) const = default;
};

/// Moves `current` toward cmd * max_steer, slew limited to steer_rate_limit * dt.
double steer_map(double cmd, double current, double dt, const VehicleParams& params);

/// Drive force at the contact patch from the linear torque-speed curve.
double motor_force(double throttle, double speed, const VehicleParams& params);

inline constexpr double kMaxStepDt = 0.05;

/// One semi-implicit Euler step of the single-track plant: steering and
/// speed are advanced first, then heading and position using the new speed.
/// Throws SimulationError on non-finite state or dt outside (0, kMaxStepDt].
VehicleState step(const VehicleState& state, const DriverInputs& inputs, double dt,
                  const VehicleParams& params);

/// Radius of the rear-axle path for a fixed road-wheel angle.
double turn_radius(double steer_angle, const VehicleParams& params);

/// Max steering angle implied by a set of minimum-radius turn measurements.
double calibrate_max_steer(std::span<const double> min_radius_measurements,
                           const VehicleParams& params);

}  // namespace twinlane
