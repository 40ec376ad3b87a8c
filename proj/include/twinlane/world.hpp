#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "twinlane/geometry.hpp"

namespace twinlane {

enum class ConeLabel { left_marker, right_marker };

inline constexpr double kDefaultConeRadius = 0.1;
inline constexpr double kDefaultConeHeight = 0.3;

struct Cone {
  double x = 0.0;
  double y = 0.0;
  ConeLabel label = ConeLabel::left_marker;
  double base_radius = kDefaultConeRadius;
  double height = kDefaultConeHeight;

  Vec2 position() const { return {x, y}; }
  bool operator==(const Cone&) const = default;
};

struct Course {
  std::vector<Cone> cones;
  Pose2 start_pose;
  std::string name;

  bool operator==(const Course&) const = default;
};

std::string_view to_string(ConeLabel label);
ConeLabel cone_label_from_string(std::string_view text);

/// Cones of one side in file order.
std::vector<Cone> cones_with_label(const Course& course, ConeLabel label);

/// Throws CourseError unless both sides carry a cone and positions are finite.
void validate_drivable(const Course& course);

// Course text format:
//   # twinlane-course v1
//   start,x,y,heading
//   x,y,L|R
// Other '#' lines and blank lines are ignored. Cone geometry uses the
// defaults above.
inline constexpr std::string_view kCourseHeader = "# twinlane-course v1";

Course parse_course(std::string_view text, std::string name = {});
std::string format_course(const Course& course);
Course load_course(const std::filesystem::path& path);
void save_course(const Course& course, const std::filesystem::path& path);

/// FNV-1a of the formatted course; identifies the world a log was run on.
std::uint64_t course_hash(const Course& course);

/// Vehicle collision rectangle. It is centred `forward_offset` ahead of the
/// reference point along the heading.
struct Footprint {
  double length = 0.67;
  double width = 0.40;
  double forward_offset = 0.0;
};

/// Indices of cones whose base circle touches the footprint (closed test).
std::vector<std::size_t> check_collisions(const Course& course, const Pose2& vehicle_pose,
                                          const Footprint& footprint);

}  // namespace twinlane
