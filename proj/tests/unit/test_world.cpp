#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "twinlane/errors.hpp"
#include "twinlane/harness/course_gen.hpp"
#include "twinlane/world.hpp"

using namespace twinlane;

namespace {

Course two_cone_course() {
  Course c;
  c.cones = {{1.0, 0.5, ConeLabel::left_marker}, {1.0, -0.5, ConeLabel::right_marker}};
  c.start_pose = {0.0, 0.0, 0.25};
  return c;
}

}  // namespace

TEST(CourseText, ParsesHeaderStartAndCones) {
  const Course c = parse_course("# twinlane-course v1\n# comment\n\nstart,0.5,-1,0.1\n1,0.5,L\n 1 , -0.5 , R \n", "demo");
  EXPECT_EQ(c.name, "demo");
  EXPECT_EQ(c.start_pose, (Pose2{0.5, -1.0, 0.1}));
  ASSERT_EQ(c.cones.size(), 2u);
  EXPECT_EQ(c.cones[0].label, ConeLabel::left_marker);
  EXPECT_EQ(c.cones[1].label, ConeLabel::right_marker);
  EXPECT_EQ(c.cones[1].y, -0.5);
  EXPECT_EQ(c.cones[0].base_radius, kDefaultConeRadius);
  EXPECT_EQ(c.cones[0].height, kDefaultConeHeight);
}

TEST(CourseText, RoundTripsExactly) {
  Course c = two_cone_course();
  c.cones.push_back({0.1 + 0.2, 1.0 / 3.0, ConeLabel::left_marker});
  const Course back = parse_course(format_course(c));
  EXPECT_EQ(back, c);
  EXPECT_EQ(format_course(back), format_course(c));
}

TEST(CourseText, Errors) {
  EXPECT_THROW(parse_course("1,2,L\n"), CourseError);
  EXPECT_THROW(parse_course("# twinlane-course v1\n1,2,X\n"), CourseError);
  EXPECT_THROW(parse_course("# twinlane-course v1\n1,two,L\n"), CourseError);
  EXPECT_THROW(parse_course("# twinlane-course v1\nstart,1,2\n"), CourseError);
  try {
    parse_course("# twinlane-course v1\n1,2,L\n3,4\n");
    FAIL();
  } catch (const CourseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(CourseText, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "twinlane_world_test.course";
  save_course(two_cone_course(), path);
  Course back = load_course(path);
  EXPECT_EQ(back.name, "twinlane_world_test");
  back.name.clear();
  EXPECT_EQ(back, two_cone_course());
  std::filesystem::remove(path);
  EXPECT_THROW(load_course(path), CourseError);
}

TEST(CourseHash, StableAndSensitive) {
  Course a = two_cone_course();
  EXPECT_EQ(course_hash(a), course_hash(two_cone_course()));
  a.cones[0].x += 1e-9;
  EXPECT_NE(course_hash(a), course_hash(two_cone_course()));
}

TEST(Drivable, NeedsBothSides) {
  Course c = two_cone_course();
  EXPECT_NO_THROW(validate_drivable(c));
  c.cones.pop_back();
  EXPECT_THROW(validate_drivable(c), CourseError);
}

TEST(Collisions, FarConeMisses) {
  Course c;
  c.cones = {{5.0, 0.0, ConeLabel::left_marker}};
  EXPECT_TRUE(check_collisions(c, {}, Footprint{}).empty());
}

TEST(Collisions, ConeAtCentreHits) {
  Course c;
  c.cones = {{3.0, 0.0, ConeLabel::right_marker}, {0.0, 0.0, ConeLabel::left_marker}};
  EXPECT_EQ(check_collisions(c, {}, Footprint{}), std::vector<std::size_t>{1});
}

TEST(Collisions, CornerPlusRadiusIsClosedBoundary) {
  // 2 x 1 footprint, corner at (1, 0.5); cone radius 0.625 centred 0.625 from it.
  const Footprint fp{2.0, 1.0, 0.0};
  Course c;
  Cone cone{1.375, 1.0, ConeLabel::left_marker};
  cone.base_radius = 0.625;
  c.cones = {cone};
  EXPECT_EQ(oracle::point_rect_distance(1.375, 1.0, 1.0, 0.5), 0.625);
  EXPECT_EQ(check_collisions(c, {}, fp).size(), 1u);

  c.cones[0].x = std::nextafter(1.375, 2.0);
  EXPECT_TRUE(check_collisions(c, {}, fp).empty());
}

TEST(Collisions, DiagonalFromCorner) {
  const Footprint fp{2.0, 1.0, 0.0};
  const double r = 0.1;
  const double ux = 1.0 / std::sqrt(1.25), uy = 0.5 / std::sqrt(1.25);
  for (double scale : {1.0 - 1e-9, 1.0 + 1e-9}) {
    Course c;
    Cone cone{1.0 + r * scale * ux, 0.5 + r * scale * uy, ConeLabel::left_marker};
    cone.base_radius = r;
    c.cones = {cone};
    EXPECT_EQ(check_collisions(c, {}, fp).size(), scale < 1.0 ? 1u : 0u) << scale;
  }
}

TEST(Collisions, MatchesOracleUnderRandomPoses) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> pos(-2.0, 2.0), ang(-3.14, 3.14);
  const Footprint fp{0.67, 0.40, 0.235};
  int hits = 0;
  for (int trial = 0; trial < 5000; ++trial) {
    const Pose2 pose{pos(gen), pos(gen), ang(gen)};
    Course c;
    c.cones = {{pos(gen), pos(gen), ConeLabel::left_marker}};
    const double dx = c.cones[0].x - pose.x, dy = c.cones[0].y - pose.y;
    const double lx = std::cos(pose.heading) * dx + std::sin(pose.heading) * dy - fp.forward_offset;
    const double ly = -std::sin(pose.heading) * dx + std::cos(pose.heading) * dy;
    const double d = oracle::point_rect_distance(lx, ly, fp.length / 2, fp.width / 2);
    if (std::abs(d - c.cones[0].base_radius) < 1e-9) continue;
    const bool expected = d < c.cones[0].base_radius;
    hits += expected;
    ASSERT_EQ(!check_collisions(c, pose, fp).empty(), expected);
  }
  EXPECT_GT(hits, 50);
}

TEST(CourseGen, StraightHasPairedCones) {
  const Course c = harness::generate_course({"straight", 10, 1.0, 1.0});
  ASSERT_EQ(c.cones.size(), 20u);
  for (int i = 0; i < 10; ++i) {
    EXPECT_EQ(c.cones[2 * i], (Cone{i + 1.0, 0.5, ConeLabel::left_marker}));
    EXPECT_EQ(c.cones[2 * i + 1], (Cone{i + 1.0, -0.5, ConeLabel::right_marker}));
  }
}

TEST(CourseGen, SlalomConesStraddleSine) {
  harness::CourseSpec spec;
  spec.kind = "slalom";
  spec.pairs = 12;
  const Course c = harness::generate_course(spec);
  ASSERT_EQ(c.cones.size(), 24u);
  for (int i = 0; i < 12; ++i) {
    const Cone& l = c.cones[2 * i];
    const Cone& r = c.cones[2 * i + 1];
    const double x = i + 1.0;
    EXPECT_NEAR((l.x + r.x) / 2, x, 1e-12);
    EXPECT_NEAR((l.y + r.y) / 2, 0.5 * std::sin(2 * M_PI * x / 4.0), 1e-12);
    EXPECT_NEAR(std::hypot(l.x - r.x, l.y - r.y), 1.0, 1e-12);
  }
  EXPECT_NEAR(c.start_pose.heading, std::atan(0.5 * 2 * M_PI / 4.0), 1e-12);
}

TEST(CourseGen, ArcConesAtRadius) {
  harness::CourseSpec spec;
  spec.kind = "arc";
  spec.radius = 3.0;
  const Course c = harness::generate_course(spec);
  for (const Cone& cone : c.cones) {
    const double r = std::hypot(cone.x, cone.y - 3.0);
    EXPECT_NEAR(r, cone.label == ConeLabel::left_marker ? 2.5 : 3.5, 1e-12);
  }
  spec.kind = "zigzag";
  EXPECT_THROW(harness::generate_course(spec), InvalidArgument);
}
