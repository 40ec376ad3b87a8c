#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "twinlane/errors.hpp"
#include "twinlane/vehicle_model.hpp"

using namespace twinlane;

namespace {

oracle::Drive drive_of(const VehicleParams& p) {
  return {p.motor_stall_torque, p.motor_noload_speed, p.gear_ratio, p.wheel_radius,
          p.mass,               p.drag_coeff,         p.rolling_coeff, p.gravity};
}

// Holds the given road-wheel angle and regulates speed to 1 m/s, then fits a
// circle to one full revolution after the transient.
double circle_radius(double delta, const VehicleParams& p, double* worst_residual = nullptr) {
  const auto drv = drive_of(p);
  const double dt = 0.001;
  VehicleState s;
  s.speed = 1.0;
  s.steer_angle = delta;
  const double cmd = delta / p.max_steer;
  for (int i = 0; i < 2000; ++i) s = step(s, DriverInputs(drv.throttle_for(s.speed, 1.0), 0.0, cmd), dt, p);

  const double expected = p.wheelbase / std::tan(delta);
  const int n = static_cast<int>(std::ceil(2.0 * std::numbers::pi * expected / dt)) + 500;
  std::vector<oracle::P> pts;
  for (int i = 0; i < n; ++i) {
    s = step(s, DriverInputs(drv.throttle_for(s.speed, 1.0), 0.0, cmd), dt, p);
    pts.push_back({s.x, s.y});
  }
  const auto c = oracle::fit_circle(pts);
  if (worst_residual) {
    double worst = 0.0;
    for (const auto& q : pts) worst = std::max(worst, std::abs(std::hypot(q.x - c.cx, q.y - c.cy) - c.r));
    *worst_residual = worst;
  }
  return c.r;
}

}  // namespace

TEST(VehicleParams, DefaultsCarryPlatformGeometry) {
  const VehicleParams p = default_art_params();
  EXPECT_DOUBLE_EQ(p.wheelbase, 0.47);
  EXPECT_DOUBLE_EQ(p.track_width, 0.34);
}

TEST(VehicleParams, NoLoadSpeedFromKvRating) {
  const double expected = 1300.0 * 11.1 * 2.0 * std::numbers::pi / 60.0;
  EXPECT_NEAR(default_art_params().motor_noload_speed, expected, 1e-9);
  EXPECT_NEAR(expected, 1511.0, 0.5);
  EXPECT_NEAR(default_art_params(7.4).motor_noload_speed, 1300.0 * 7.4 * 2.0 * std::numbers::pi / 60.0, 1e-9);
}

TEST(VehicleParams, DefaultsValidate) { EXPECT_NO_THROW(validate(default_art_params())); }

TEST(VehicleParams, InvalidValuesRejected) {
  VehicleParams p;
  p.wheelbase = 0.0;
  EXPECT_THROW(validate(p), InvalidArgument);
  p = {};
  p.max_steer = 2.0;
  EXPECT_THROW(validate(p), InvalidArgument);
  p = {};
  p.mass = -1.0;
  EXPECT_THROW(validate(p), InvalidArgument);
}

TEST(DriverInputs, ClampsAndZeroesNaN) {
  const DriverInputs d(1.5, -0.2, -3.0);
  EXPECT_EQ(d.throttle, 1.0);
  EXPECT_EQ(d.braking, 0.0);
  EXPECT_EQ(d.steering, -1.0);
  const DriverInputs n(std::nan(""), std::nan(""), std::nan(""));
  EXPECT_EQ(n, DriverInputs{});
}

TEST(SteerMap, FixedPointAtZero) { EXPECT_EQ(steer_map(0.0, 0.0, 0.01, VehicleParams{}), 0.0); }

TEST(SteerMap, SaturatesAtMaxSteer) { EXPECT_DOUBLE_EQ(steer_map(1.0, 0.0, 1.0, VehicleParams{}), 0.4); }

TEST(SteerMap, OneStepSlew) {
  VehicleParams p;
  p.steer_rate_limit = 1.0;
  p.max_steer = 0.4;
  EXPECT_NEAR(steer_map(1.0, 0.0, 0.01, p), 1.0 * 0.01, 1e-15);
}

TEST(SteerMap, RandomCommandsRespectLimits) {
  const VehicleParams p;
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> cmd(-2.0, 2.0), dt(1e-4, 0.05);
  double cur = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double h = dt(gen);
    const double next = steer_map(cmd(gen), cur, h, p);
    ASSERT_LE(std::abs(next), p.max_steer);
    ASSERT_LE(std::abs(next - cur), p.steer_rate_limit * h + 1e-12);
    cur = next;
  }
}

TEST(MotorForce, ZeroThrottleGivesZero) {
  const VehicleParams p;
  for (double v : {0.0, 0.5, 3.0}) EXPECT_EQ(motor_force(0.0, v, p), 0.0);
}

TEST(MotorForce, NoLoadPointGivesZero) {
  const VehicleParams p;
  const double v = p.motor_noload_speed * p.wheel_radius / p.gear_ratio;
  EXPECT_NEAR(motor_force(1.0, v, p), 0.0, 1e-9);
}

TEST(MotorForce, HalfThrottleAtStall) {
  const VehicleParams p;
  EXPECT_NEAR(motor_force(0.5, 0.0, p), 0.5 * 1.2 * 9.0 / 0.095, 1e-9);
}

TEST(Step, RestStaysAtRest) {
  const VehicleState s;
  const VehicleState n = step(s, DriverInputs{}, 0.001, VehicleParams{});
  VehicleState expected = s;
  expected.time = 0.001;
  EXPECT_EQ(n, expected);
}

TEST(Step, CoastingDissipates) {
  const VehicleParams p;
  VehicleState s;
  s.speed = 1.0;
  double prev = s.speed;
  int steps = 0;
  while (s.speed > 0.0 && steps < 100000) {
    s = step(s, DriverInputs{}, 0.001, p);
    ASSERT_LT(s.speed, prev);
    ASSERT_GE(s.speed, 0.0);
    prev = s.speed;
    ++steps;
  }
  EXPECT_EQ(s.speed, 0.0);
}

TEST(Step, BrakingNeverReverses) {
  const VehicleParams p;
  VehicleState s;
  s.speed = 0.3;
  for (int i = 0; i < 2000; ++i) {
    s = step(s, DriverInputs(0.0, 1.0, 0.0), 0.001, p);
    ASSERT_GE(s.speed, 0.0);
  }
  EXPECT_EQ(s.speed, 0.0);
}

TEST(Step, ConvergesToTwoMetreCircle) {
  const VehicleParams p;
  double residual = 0.0;
  const double r = circle_radius(std::atan(p.wheelbase / 2.0), p, &residual);
  EXPECT_NEAR(r, 2.0, 0.02);
  EXPECT_LT(residual, 0.02);
}

TEST(Step, RejectsBadStepAndState) {
  const VehicleParams p;
  EXPECT_THROW(step(VehicleState{}, DriverInputs{}, 0.0, p), SimulationError);
  EXPECT_THROW(step(VehicleState{}, DriverInputs{}, 0.06, p), SimulationError);
  VehicleState s;
  s.x = std::nan("");
  EXPECT_THROW(step(s, DriverInputs{}, 0.001, p), SimulationError);
}

TEST(Step, FirstOrderConvergenceInDt) {
  const VehicleParams p;
  auto run = [&](double dt) {
    VehicleState s;
    const int n = static_cast<int>(std::lround(4.0 / dt));
    for (int i = 0; i < n; ++i) s = step(s, DriverInputs(0.5, 0.0, 0.5), dt, p);
    return s;
  };
  const VehicleState ref = run(0.00005);
  auto err = [&](double dt) {
    const VehicleState s = run(dt);
    return std::hypot(s.x - ref.x, s.y - ref.y);
  };
  const double e1 = err(0.004), e2 = err(0.002), e3 = err(0.001);
  EXPECT_GT(e1, e2);
  EXPECT_GT(e2, e3);
  EXPECT_NEAR(e1 / e2, 2.0, 0.5);
  EXPECT_NEAR(e2 / e3, 2.0, 0.5);
}

TEST(Step, Deterministic) {
  const VehicleParams p;
  auto run = [&] {
    VehicleState s;
    for (int i = 0; i < 3000; ++i) s = step(s, DriverInputs(0.3, 0.0, std::sin(i * 0.01)), 0.001, p);
    return s;
  };
  EXPECT_EQ(run(), run());
}

TEST(Step, HeadingStaysWrapped) {
  const VehicleParams p;
  VehicleState s;
  s.speed = 2.0;
  s.steer_angle = p.max_steer;
  for (int i = 0; i < 20000; ++i) {
    s = step(s, DriverInputs(0.2, 0.0, 1.0), 0.001, p);
    ASSERT_GT(s.heading, -std::numbers::pi);
    ASSERT_LE(s.heading, std::numbers::pi);
  }
}

TEST(TurnRadius, InverseOfDefinition) {
  VehicleParams p;
  EXPECT_NEAR(turn_radius(std::atan(0.47 / 1.0), p), 1.0, 1e-12);
}

TEST(TurnRadius, AtMaxSteer) {
  EXPECT_NEAR(turn_radius(0.4, VehicleParams{}), 0.47 / std::tan(0.4), 1e-12);
  EXPECT_NEAR(turn_radius(0.4, VehicleParams{}), 1.112, 5e-4);
}

TEST(TurnRadius, MonotoneDecreasingAndUnboundedNearZero) {
  const VehicleParams p;
  double prev = turn_radius(1e-6, p);
  EXPECT_GT(prev, 1e5);
  for (double d = 0.01; d <= 0.4; d += 0.01) {
    const double r = turn_radius(d, p);
    EXPECT_LT(r, prev);
    prev = r;
  }
  EXPECT_THROW(turn_radius(0.0, p), InvalidArgument);
}

TEST(CalibrateMaxSteer, SingleMeasurement) {
  const std::vector<double> m{1.0};
  EXPECT_NEAR(calibrate_max_steer(m, VehicleParams{}), std::atan(0.47), 1e-12);
  EXPECT_NEAR(std::atan(0.47), 0.43936, 5e-5);
}

TEST(CalibrateMaxSteer, RepeatedEqualsSingle) {
  const std::vector<double> one{1.3}, three{1.3, 1.3, 1.3};
  EXPECT_DOUBLE_EQ(calibrate_max_steer(three, VehicleParams{}), calibrate_max_steer(one, VehicleParams{}));
}

TEST(CalibrateMaxSteer, MeanThenArctan) {
  const std::vector<double> m{0.8, 1.2};
  EXPECT_NEAR(calibrate_max_steer(m, VehicleParams{}), std::atan(0.47 / 1.0), 1e-12);
}

TEST(CalibrateMaxSteer, RejectsBadInput) {
  EXPECT_THROW(calibrate_max_steer(std::vector<double>{}, VehicleParams{}), InvalidArgument);
  EXPECT_THROW(calibrate_max_steer(std::vector<double>{1.0, -1.0}, VehicleParams{}), InvalidArgument);
}

class CircleSweep : public ::testing::TestWithParam<double> {};

TEST_P(CircleSweep, RadiusMatchesGeometry) {
  const VehicleParams p;
  const double delta = GetParam();
  const double expected = p.wheelbase / std::tan(delta);
  EXPECT_NEAR(circle_radius(delta, p), expected, 0.01 * expected);
}

INSTANTIATE_TEST_SUITE_P(Steer, CircleSweep, ::testing::Values(0.1, 0.2, 0.3, 0.4));
