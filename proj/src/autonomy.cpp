#include "twinlane/autonomy.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/QR>

#include "twinlane/errors.hpp"

namespace twinlane {
namespace {

struct Component {
  int u_min, v_min, u_max, v_max;  // inclusive pixel bounds
  int area;
};

Component flood(const Image& img, int u0, int v0, Rgb color, std::vector<std::uint8_t>& seen,
                std::vector<std::pair<int, int>>& stack) {
  Component c{u0, v0, u0, v0, 0};
  stack.clear();
  stack.emplace_back(u0, v0);
  seen[static_cast<std::size_t>(v0) * img.width + u0] = 1;
  while (!stack.empty()) {
    const auto [u, v] = stack.back();
    stack.pop_back();
    ++c.area;
    c.u_min = std::min(c.u_min, u);
    c.u_max = std::max(c.u_max, u);
    c.v_min = std::min(c.v_min, v);
    c.v_max = std::max(c.v_max, v);
    constexpr int du[] = {1, -1, 0, 0};
    constexpr int dv[] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      const int nu = u + du[k], nv = v + dv[k];
      if (nu < 0 || nv < 0 || nu >= img.width || nv >= img.height) continue;
      auto& mark = seen[static_cast<std::size_t>(nv) * img.width + nu];
      if (mark || img.at(nu, nv) != color) continue;
      mark = 1;
      stack.emplace_back(nu, nv);
    }
  }
  return c;
}

}  // namespace

std::vector<Detection> detect_cones(const Image& img) {
  if (img.pixels.size() != static_cast<std::size_t>(img.width) * img.height * 3) {
    throw InvalidArgument("detect_cones: pixel buffer does not match image size");
  }
  std::vector<Detection> dets;
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(img.width) * img.height, 0);
  std::vector<std::pair<int, int>> stack;
  for (int v = 0; v < img.height; ++v) {
    for (int u = 0; u < img.width; ++u) {
      if (seen[static_cast<std::size_t>(v) * img.width + u]) continue;
      const Rgb color = img.at(u, v);
      ConeLabel label;
      if (color == kLeftConeColor) {
        label = ConeLabel::left_marker;
      } else if (color == kRightConeColor) {
        label = ConeLabel::right_marker;
      } else {
        continue;
      }
      const Component c = flood(img, u, v, color, seen, stack);
      if (c.area < kMinComponentArea) continue;
      Detection d;
      d.bbox = {double(c.u_min), double(c.v_min), double(c.u_max + 1), double(c.v_max + 1)};
      d.label = label;
      d.confidence = std::min(1.0, c.area / kReferenceArea);
      dets.push_back(d);
    }
  }
  std::stable_sort(dets.begin(), dets.end(),
                   [](const Detection& a, const Detection& b) { return a.bbox.area() > b.bbox.area(); });
  return dets;
}

Detection estimate_position(Detection det, const CameraModel& cam, double cone_height) {
  const double pixel_height = det.bbox.height();
  if (!(pixel_height > 0.0)) throw InvalidArgument("estimate_position: degenerate bounding box");
  const double depth = cam.fy * cone_height / pixel_height;
  const double lateral = -(det.bbox.u_center() - cam.cx) * depth / cam.fx;
  det.position = Vec2{depth + cam.mount_forward, lateral};
  return det;
}

double eval_curve(const Eigen::VectorXd& coeffs, double x) {
  double y = 0.0;
  for (Eigen::Index i = coeffs.size(); i-- > 0;) y = y * x + coeffs[i];
  return y;
}

Eigen::VectorXd fit_curve(const std::vector<Vec2>& points, int degree) {
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd a(n, degree + 1);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double p = 1.0;
    for (int k = 0; k <= degree; ++k) {
      a(i, k) = p;
      p *= points[static_cast<std::size_t>(i)].x();
    }
    b[i] = points[static_cast<std::size_t>(i)].y();
  }
  return a.colPivHouseholderQr().solve(b);
}

namespace {

Eigen::VectorXd fit_boundary(const std::vector<Vec2>& pts) {
  std::set<double> distinct_x;
  for (const Vec2& p : pts) distinct_x.insert(p.x());
  const int degree = std::min<int>(2, static_cast<int>(distinct_x.size()) - 1);
  return fit_curve(pts, degree);
}

double max_x(const std::vector<Vec2>& pts) {
  return std::max_element(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) { return a.x() < b.x(); })->x();
}

}  // namespace

namespace {

// Vertical shift that moves a locally straight boundary by `distance` along
// its normal, so a steep boundary still yields a half-lane clearance.
double normal_offset(const Eigen::VectorXd& curve, double x, double distance) {
  double slope = 0.0;
  for (Eigen::Index k = curve.size() - 1; k >= 1; --k) slope = slope * x + static_cast<double>(k) * curve[k];
  return distance * std::sqrt(1.0 + slope * slope);
}

}  // namespace

Plan plan(const std::vector<Detection>& dets, double lookahead, double lane_width) {
  Plan out;
  for (const Detection& d : dets) {
    if (!d.position) throw InvalidArgument("plan: detection without an estimated position");
    (d.label == ConeLabel::left_marker ? out.left_points : out.right_points).push_back(*d.position);
  }
  const auto by_x = [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  };
  std::sort(out.left_points.begin(), out.left_points.end(), by_x);
  std::sort(out.right_points.begin(), out.right_points.end(), by_x);

  const bool has_left = !out.left_points.empty(), has_right = !out.right_points.empty();
  if (!has_left && !has_right) return out;
  if (has_left) out.left_curve = fit_boundary(out.left_points);
  if (has_right) out.right_curve = fit_boundary(out.right_points);

  double x_t, y_t;
  if (has_left && has_right) {
    x_t = std::min(lookahead, std::min(max_x(out.left_points), max_x(out.right_points)));
    y_t = (eval_curve(out.left_curve, x_t) + eval_curve(out.right_curve, x_t)) / 2.0;
  } else if (has_left) {
    x_t = std::min(lookahead, max_x(out.left_points));
    y_t = eval_curve(out.left_curve, x_t) - normal_offset(out.left_curve, x_t, lane_width / 2.0);
  } else {
    x_t = std::min(lookahead, max_x(out.right_points));
    y_t = eval_curve(out.right_curve, x_t) + normal_offset(out.right_curve, x_t, lane_width / 2.0);
  }
  if (!(x_t > 0.0) || !std::isfinite(y_t)) return out;
  out.target = {x_t, y_t};
  out.valid = true;
  return out;
}

void validate(const ControllerParams& cp) {
  if (!(cp.lookahead > 0.0)) throw InvalidArgument("controller: lookahead must be > 0");
  if (!(cp.target_speed > 0.0)) throw InvalidArgument("controller: target_speed must be > 0");
  if (!(cp.speed_gain >= 0.0) || !(cp.brake_gain >= 0.0)) throw InvalidArgument("controller: gains must be >= 0");
}

double pure_pursuit_angle(const Vec2& target, double wheelbase) {
  const double alpha = std::atan2(target.y(), target.x());
  return std::atan(2.0 * wheelbase * std::sin(alpha) / target.norm());
}

DriverInputs control(const Plan& plan, const VehicleState& state, const VehicleParams& vp,
                     const ControllerParams& cp) {
  if (!plan.valid) return DriverInputs(0.0, 1.0, 0.0);
  const double delta = pure_pursuit_angle(plan.target, vp.wheelbase);
  const double error = cp.target_speed - state.speed;
  return DriverInputs(cp.speed_gain * error, cp.brake_gain * -error, delta / vp.max_steer);
}

std::pair<std::vector<Detection>, Plan> perceive_and_plan(const Image& img, const CameraModel& cam,
                                                          double cone_height, double lookahead,
                                                          double lane_width) {
  std::vector<Detection> dets = detect_cones(img);
  for (Detection& d : dets) d = estimate_position(d, cam, cone_height);
  Plan p = plan(dets, lookahead, lane_width);
  return {std::move(dets), std::move(p)};
}

}  // namespace twinlane
