#include "twinlane/harness/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace twinlane::harness {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

std::vector<Vec2> midpoints(const Course& course) {
  const auto left = cones_with_label(course, ConeLabel::left_marker);
  const auto right = cones_with_label(course, ConeLabel::right_marker);
  const std::size_t diff = left.size() > right.size() ? left.size() - right.size() : right.size() - left.size();
  if (diff > 1) {
    throw CourseError("centerline: cone sides differ by " + std::to_string(diff) + " (at most 1 allowed)");
  }
  const std::size_t n = std::min(left.size(), right.size());
  std::vector<Vec2> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    pts.emplace_back(0.5 * (left[i].x + right[i].x), 0.5 * (left[i].y + right[i].y));
  }
  return pts;
}

ScenarioConfig logged_scenario(const RunLog& log) {
  return scenario_from_config(merge_config(default_config(), log.config));
}

double rms(double sum_sq, std::size_t n) { return n == 0 ? 0.0 : std::sqrt(sum_sq / static_cast<double>(n)); }

}  // namespace

Centerline::Centerline(const Course& course) : points_(midpoints(course)) { build(); }

Centerline::Centerline(std::vector<Vec2> points) : points_(std::move(points)) { build(); }

void Centerline::build() {
  if (points_.size() < 2) throw CourseError("centerline: need at least two cone pairs");
  stations_.assign(1, 0.0);
  for (std::size_t i = 1; i < points_.size(); ++i) {
    stations_.push_back(stations_.back() + (points_[i] - points_[i - 1]).norm());
  }
  if (stations_.back() <= 0.0) throw CourseError("centerline: all midpoints coincide");
}

Centerline::Projection Centerline::project(const Vec2& p) const {
  const std::size_t segs = points_.size() - 1;
  Projection best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < segs; ++i) {
    const Vec2 a = points_[i];
    const Vec2 d = points_[i + 1] - a;
    const double len2 = d.squaredNorm();
    if (len2 == 0.0) continue;
    double t = (p - a).dot(d) / len2;
    const double lo = i == 0 ? -std::numeric_limits<double>::infinity() : 0.0;
    const double hi = i + 1 == segs ? std::numeric_limits<double>::infinity() : 1.0;
    t = std::clamp(t, lo, hi);
    const Vec2 foot = a + t * d;
    const double dist = (p - foot).norm();
    if (dist < best_dist) {
      best_dist = dist;
      const double len = std::sqrt(len2);
      best.station = stations_[i] + t * len;
      best.offset = cross(d, p - a) < 0.0 ? -dist : dist;
    }
  }
  return best;
}

bool passed_last_pair(const Course& course, const Centerline& centerline, const Pose2& pose,
                      const CameraModel& camera) {
  const auto proj = centerline.project(pose.position());
  const auto& st = centerline.stations();
  if (proj.station >= st.back()) return true;
  if (proj.station < st[st.size() - 2]) return false;

  const std::size_t pairs = centerline.points().size();
  const auto left = cones_with_label(course, ConeLabel::left_marker);
  const auto right = cones_with_label(course, ConeLabel::right_marker);
  return !project_cone(left[pairs - 1], pose, camera) && !project_cone(right[pairs - 1], pose, camera);
}

RunMetrics compute_metrics(const RunLog& log, const Course& course) {
  const ScenarioConfig cfg = logged_scenario(log);
  const Centerline cl(course);
  RunMetrics m;

  double sum_sq = 0.0, speed_sum = 0.0;
  for (const TickRecord& t : log.ticks) {
    const double off = cl.project(Vec2{t.state.x, t.state.y}).offset;
    sum_sq += off * off;
    m.cross_track_max = std::max(m.cross_track_max, std::abs(off));
    speed_sum += t.state.speed;
  }
  m.cross_track_rmse = rms(sum_sq, log.ticks.size());
  if (!log.ticks.empty()) m.mean_speed = speed_sum / static_cast<double>(log.ticks.size());

  std::vector<Pose2> poses = log.trace;
  if (poses.empty()) {
    for (const TickRecord& t : log.ticks) poses.push_back({t.state.x, t.state.y, t.state.heading});
    poses.push_back({log.final_state.x, log.final_state.y, log.final_state.heading});
  }
  std::set<std::size_t> hit;
  double furthest = 0.0;
  for (const Pose2& p : poses) {
    for (std::size_t idx : check_collisions(course, p, cfg.footprint)) hit.insert(idx);
    furthest = std::max(furthest, cl.project(p.position()).station);
  }
  m.cones_hit = static_cast<int>(hit.size());
  m.progress = std::clamp(furthest, 0.0, cl.length());
  m.completed = log.termination == Termination::completed;
  return m;
}

RunMetrics compute_metrics(const RunLog& log) { return compute_metrics(log, parse_course(log.course_text)); }

Json to_json(const RunMetrics& m) {
  return {{"cross_track_rmse", m.cross_track_rmse}, {"cross_track_max", m.cross_track_max},
          {"cones_hit", m.cones_hit},               {"completed", m.completed},
          {"progress", m.progress},                 {"mean_speed", m.mean_speed}};
}

GapReport gap_report(const RunLog& nominal, const RunLog& proxy) {
  if (nominal.dt_autonomy != proxy.dt_autonomy || nominal.dt_physics != proxy.dt_physics) {
    throw InvalidArgument("gap_report: logs use different time steps");
  }
  if (nominal.course_hash != proxy.course_hash) throw InvalidArgument("gap_report: logs ran on different courses");

  GapReport g;
  const std::size_t n = std::min(nominal.ticks.size(), proxy.ticks.size());
  g.ticks_compared = n;
  double pose_sq = 0.0, heading_sq = 0.0, thr_sq = 0.0, brk_sq = 0.0, str_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = nominal.ticks[i];
    const auto& b = proxy.ticks[i];
    const double dist = std::hypot(b.state.x - a.state.x, b.state.y - a.state.y);
    pose_sq += dist * dist;
    g.pose_max_divergence = std::max(g.pose_max_divergence, dist);
    const double dh = wrap_angle(b.state.heading - a.state.heading);
    heading_sq += dh * dh;
    const double dt = b.inputs.throttle - a.inputs.throttle;
    const double db = b.inputs.braking - a.inputs.braking;
    const double ds = b.inputs.steering - a.inputs.steering;
    thr_sq += dt * dt;
    brk_sq += db * db;
    str_sq += ds * ds;
  }
  g.pose_rmse = rms(pose_sq, n);
  g.heading_rmse = rms(heading_sq, n);
  g.input_rmse = {rms(thr_sq, n), rms(brk_sq, n), rms(str_sq, n)};

  const Course course = parse_course(nominal.course_text);
  const RunMetrics mn = compute_metrics(nominal, course);
  const RunMetrics mp = compute_metrics(proxy, course);
  g.metric_deltas = {mp.cross_track_rmse - mn.cross_track_rmse,
                     mp.cross_track_max - mn.cross_track_max,
                     static_cast<double>(mp.cones_hit - mn.cones_hit),
                     static_cast<double>(mp.completed) - static_cast<double>(mn.completed),
                     mp.progress - mn.progress,
                     mp.mean_speed - mn.mean_speed};
  return g;
}

Json to_json(const GapReport& g) {
  const auto& d = g.metric_deltas;
  return {{"pose_rmse", g.pose_rmse},
          {"pose_max_divergence", g.pose_max_divergence},
          {"heading_rmse", g.heading_rmse},
          {"input_rmse", {{"throttle", g.input_rmse.throttle}, {"braking", g.input_rmse.braking}, {"steering", g.input_rmse.steering}}},
          {"metric_deltas",
           {{"cross_track_rmse", d.cross_track_rmse},
            {"cross_track_max", d.cross_track_max},
            {"cones_hit", d.cones_hit},
            {"completed", d.completed},
            {"progress", d.progress},
            {"mean_speed", d.mean_speed}}},
          {"ticks_compared", g.ticks_compared}};
}

}  // namespace twinlane::harness
