#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "twinlane/geometry.hpp"
#include "twinlane/sensors.hpp"
#include "twinlane/vehicle_model.hpp"
#include "twinlane/world.hpp"

namespace twinlane {

struct Detection {
  BBox bbox;
  ConeLabel label = ConeLabel::left_marker;
  double confidence = 0.0;
  std::optional<Vec2> position;  // vehicle frame: x forward, y left

  bool operator==(const Detection&) const = default;
};

/// Components smaller than this are treated as noise.
inline constexpr int kMinComponentArea = 4;
/// Pixel area at which a detection reaches full confidence.
inline constexpr double kReferenceArea = 400.0;

/// Colour-segmentation detector: exact label-colour pixels, 4-connected
/// components, tight boxes. Sorted by box area, largest first.
std::vector<Detection> detect_cones(const Image& img);

/// Fills `position` from the box height (range) and horizontal centre
/// (bearing). Throws InvalidArgument on a box with no height.
Detection estimate_position(Detection det, const CameraModel& cam, double cone_height = kDefaultConeHeight);

inline constexpr double kDefaultLaneWidth = 1.0;

struct Plan {
  std::vector<Vec2> left_points;
  std::vector<Vec2> right_points;
  Eigen::VectorXd left_curve;   // y(x) coefficients, ascending powers
  Eigen::VectorXd right_curve;
  Vec2 target = Vec2::Zero();
  bool valid = false;
};

/// Evaluates a polynomial with ascending coefficients.
double eval_curve(const Eigen::VectorXd& coeffs, double x);

/// Least-squares polynomial y(x) of the given degree.
Eigen::VectorXd fit_curve(const std::vector<Vec2>& points, int degree);

/// Boundary curves per side and a target on the centreline at the lookahead
/// station. A side with no cones is replaced by the other side offset half a
/// lane width; no cones at all gives an invalid plan.
Plan plan(const std::vector<Detection>& dets, double lookahead, double lane_width = kDefaultLaneWidth);

struct ControllerParams {
  double lookahead = 1.1;
  double target_speed = 0.6;
  double speed_gain = 0.5;
  double brake_gain = 0.5;

  bool operator==(const ControllerParams&) const = default;
};

void validate(const ControllerParams& cp);

/// Pure pursuit onto the plan target plus proportional speed control.
/// An invalid plan commands a full stop.
DriverInputs control(const Plan& plan, const VehicleState& state, const VehicleParams& vp,
                     const ControllerParams& cp);

/// Road-wheel angle that makes the rear axle pass through `target`.
double pure_pursuit_angle(const Vec2& target, double wheelbase);

std::pair<std::vector<Detection>, Plan> perceive_and_plan(const Image& img, const CameraModel& cam,
                                                          double cone_height, double lookahead,
                                                          double lane_width = kDefaultLaneWidth);

}  // namespace twinlane
