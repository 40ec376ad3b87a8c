#include "twinlane/world.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "twinlane/errors.hpp"
#include "twinlane/text.hpp"

namespace twinlane {

std::string_view to_string(ConeLabel label) {
  return label == ConeLabel::left_marker ? "left_marker" : "right_marker";
}

ConeLabel cone_label_from_string(std::string_view text) {
  if (text == "left_marker" || text == "L") return ConeLabel::left_marker;
  if (text == "right_marker" || text == "R") return ConeLabel::right_marker;
  throw InvalidArgument("unknown cone label '" + std::string(text) + "'");
}

std::vector<Cone> cones_with_label(const Course& course, ConeLabel label) {
  std::vector<Cone> out;
  std::copy_if(course.cones.begin(), course.cones.end(), std::back_inserter(out),
               [label](const Cone& c) { return c.label == label; });
  return out;
}

void validate_drivable(const Course& course) {
  bool left = false, right = false;
  for (const Cone& c : course.cones) {
    if (!std::isfinite(c.x) || !std::isfinite(c.y)) throw CourseError("course has a non-finite cone position");
    if (!(c.base_radius > 0.0) || !(c.height > 0.0)) throw CourseError("cone geometry must be positive");
    (c.label == ConeLabel::left_marker ? left : right) = true;
  }
  if (!left || !right) throw CourseError("course needs at least one cone per side");
}

Course parse_course(std::string_view text, std::string name) {
  Course course;
  course.name = std::move(name);
  bool header_seen = false;
  std::size_t line_no = 0;
  for (std::string_view line : split_lines(text)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (line == kCourseHeader) header_seen = true;
      continue;
    }
    if (!header_seen) throw CourseError("course: missing header '" + std::string(kCourseHeader) + "'");
    const auto fields = split(line, ',');
    const auto where = [&] { return "course line " + std::to_string(line_no); };
    try {
      if (trim(fields[0]) == "start") {
        if (fields.size() != 4) throw CourseError(where() + ": expected start,x,y,heading");
        course.start_pose = {parse_double(trim(fields[1])), parse_double(trim(fields[2])),
                             parse_double(trim(fields[3]))};
        continue;
      }
      if (fields.size() != 3) throw CourseError(where() + ": expected x,y,label");
      const auto label = trim(fields[2]);
      if (label != "L" && label != "R") throw CourseError(where() + ": label must be L or R");
      Cone cone;
      cone.x = parse_double(trim(fields[0]));
      cone.y = parse_double(trim(fields[1]));
      cone.label = cone_label_from_string(label);
      course.cones.push_back(cone);
    } catch (const InvalidArgument& e) {
      throw CourseError(where() + ": " + e.what());
    }
  }
  if (!header_seen) throw CourseError("course: missing header '" + std::string(kCourseHeader) + "'");
  return course;
}

std::string format_course(const Course& course) {
  std::string out(kCourseHeader);
  out += '\n';
  out += "start," + format_double(course.start_pose.x) + ',' + format_double(course.start_pose.y) + ',' +
         format_double(course.start_pose.heading) + '\n';
  for (const Cone& c : course.cones) {
    out += format_double(c.x) + ',' + format_double(c.y) + ',' +
           (c.label == ConeLabel::left_marker ? "L" : "R") + '\n';
  }
  return out;
}

Course load_course(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CourseError("cannot open course file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_course(buf.str(), path.stem().string());
}

void save_course(const Course& course, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write course file " + path.string());
  out << format_course(course);
  if (!out) throw IoError("failed writing course file " + path.string());
}

std::uint64_t course_hash(const Course& course) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : format_course(course)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<std::size_t> check_collisions(const Course& course, const Pose2& pose, const Footprint& fp) {
  if (!(fp.length > 0.0) || !(fp.width > 0.0)) throw InvalidArgument("footprint dimensions must be > 0");
  const double half_l = fp.length / 2.0, half_w = fp.width / 2.0;
  std::vector<std::size_t> hits;
  for (std::size_t i = 0; i < course.cones.size(); ++i) {
    const Cone& cone = course.cones[i];
    Vec2 local = to_body(pose, cone.position());
    local.x() -= fp.forward_offset;
    const double dx = std::max(std::abs(local.x()) - half_l, 0.0);
    const double dy = std::max(std::abs(local.y()) - half_w, 0.0);
    if (dx * dx + dy * dy <= cone.base_radius * cone.base_radius) hits.push_back(i);
  }
  return hits;
}

}  // namespace twinlane
