#include "twinlane/harness/course_gen.hpp"

#include <cmath>
#include <numbers>

namespace twinlane::harness {
namespace {

void add_pair(Course& course, const Vec2& center, const Vec2& tangent, double lane_width) {
  const Vec2 normal{-tangent.y(), tangent.x()};
  const Vec2 left = center + normal * (lane_width / 2.0);
  const Vec2 right = center - normal * (lane_width / 2.0);
  course.cones.push_back({left.x(), left.y(), ConeLabel::left_marker});
  course.cones.push_back({right.x(), right.y(), ConeLabel::right_marker});
}

}  // namespace

Course generate_course(const CourseSpec& spec) {
  if (spec.pairs < 1) throw InvalidArgument("course: pairs must be >= 1");
  if (!(spec.lane_width > 0.0) || !(spec.spacing > 0.0)) throw InvalidArgument("course: lane_width and spacing must be > 0");
  Course course;
  course.name = spec.kind;
  if (spec.kind == "straight") {
    for (int i = 1; i <= spec.pairs; ++i) add_pair(course, {i * spec.spacing, 0.0}, {1.0, 0.0}, spec.lane_width);
  } else if (spec.kind == "slalom") {
    if (!(spec.period > 0.0)) throw InvalidArgument("course: period must be > 0");
    const double k = 2.0 * std::numbers::pi / spec.period;
    const auto slope = [&](double x) { return spec.amplitude * k * std::cos(k * x); };
    for (int i = 1; i <= spec.pairs; ++i) {
      const double x = i * spec.spacing;
      add_pair(course, {x, spec.amplitude * std::sin(k * x)}, Vec2(1.0, slope(x)).normalized(), spec.lane_width);
    }
    course.start_pose.heading = std::atan(slope(0.0));
  } else if (spec.kind == "arc") {
    if (!(spec.radius > spec.lane_width / 2.0)) throw InvalidArgument("course: radius must exceed half the lane width");
    for (int i = 1; i <= spec.pairs; ++i) {
      const double phi = i * spec.spacing / spec.radius;
      add_pair(course, {spec.radius * std::sin(phi), spec.radius * (1.0 - std::cos(phi))},
               {std::cos(phi), std::sin(phi)}, spec.lane_width);
    }
  } else {
    throw InvalidArgument("course: unknown kind '" + spec.kind + "'");
  }
  return course;
}

Course scenario_course(const ScenarioConfig& cfg) {
  Course course = cfg.course_path.empty() ? generate_course(cfg.course) : load_course(cfg.course_path);
  for (Cone& c : course.cones) {
    c.base_radius = cfg.cone_base_radius;
    c.height = cfg.cone_height;
  }
  validate_drivable(course);
  return course;
}

}  // namespace twinlane::harness
