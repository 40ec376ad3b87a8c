#pragma once

#include <vector>

#include "twinlane/harness/episode.hpp"
#include "twinlane/world.hpp"

namespace twinlane::harness {

/// Polyline through the midpoints of index-paired left/right cones.
class Centerline {
 public:
  /// Pairs the i-th left cone with the i-th right cone. Side counts may
  /// differ by one (the extra cone is ignored); anything else, or fewer than
  /// two pairs, throws CourseError.
  explicit Centerline(const Course& course);
  explicit Centerline(std::vector<Vec2> points);

  struct Projection {
    double station = 0.0;  // arclength from the first midpoint
    double offset = 0.0;   // signed, left of travel positive
  };

  /// Nearest-segment projection. The first and last segments extend as rays
  /// so poses before the first or after the last midpoint measure their
  /// perpendicular offset.
  Projection project(const Vec2& p) const;

  const std::vector<Vec2>& points() const { return points_; }
  const std::vector<double>& stations() const { return stations_; }
  double length() const { return stations_.back(); }

 private:
  void build();
  std::vector<Vec2> points_;
  std::vector<double> stations_;
};

/// The vehicle has passed the final pair once it is beyond the penultimate
/// midpoint and the camera has lost sight of both final cones (they are
/// alongside or behind it), or once it is beyond the final midpoint.
bool passed_last_pair(const Course& course, const Centerline& centerline, const Pose2& pose,
                      const CameraModel& camera);

struct RunMetrics {
  double cross_track_rmse = 0.0;
  double cross_track_max = 0.0;
  int cones_hit = 0;
  bool completed = false;
  double progress = 0.0;
  double mean_speed = 0.0;
};

RunMetrics compute_metrics(const RunLog& log, const Course& course);
/// Same, using the course stored in the log.
RunMetrics compute_metrics(const RunLog& log);

Json to_json(const RunMetrics& m);

struct GapReport {
  double pose_rmse = 0.0;
  double pose_max_divergence = 0.0;
  double heading_rmse = 0.0;
  struct InputRmse {
    double throttle = 0.0;
    double braking = 0.0;
    double steering = 0.0;
  } input_rmse;
  /// proxy - nominal for each RunMetrics field (booleans as 0/1).
  struct MetricDeltas {
    double cross_track_rmse = 0.0;
    double cross_track_max = 0.0;
    double cones_hit = 0.0;
    double completed = 0.0;
    double progress = 0.0;
    double mean_speed = 0.0;
  } metric_deltas;
  std::size_t ticks_compared = 0;
};

/// Aligns ticks by index over the common prefix. Throws InvalidArgument when
/// the logs differ in dt_autonomy or course.
GapReport gap_report(const RunLog& nominal, const RunLog& proxy);

Json to_json(const GapReport& g);

}  // namespace twinlane::harness
