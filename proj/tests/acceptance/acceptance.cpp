// Acceptance gate: prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fuzz.hpp"
#include "oracles.hpp"
#include "overlay_cases.hpp"
#include "twinlane/autonomy.hpp"
#include "twinlane/bridge/frame.hpp"
#include "twinlane/harness/config.hpp"
#include "twinlane/harness/course_gen.hpp"
#include "twinlane/harness/episode.hpp"
#include "twinlane/harness/metrics.hpp"
#include "twinlane/sensors.hpp"
#include "twinlane/vehicle_model.hpp"

using namespace twinlane;
using namespace twinlane::harness;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

template <class... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ScenarioConfig scenario(const std::string& yaml) {
  return scenario_from_config(merge_config(default_config(), parse_config_text(yaml)));
}

const char* kSlalom = "course: {kind: slalom, pairs: 12, amplitude: 0.5, period: 4.0}\n";

bool identical(const RunLog& a, const RunLog& b) { return to_json(a).dump() == to_json(b).dump(); }

Outcome closed_loop_navigation() {
  const ScenarioConfig cfg = scenario("course: {kind: straight, pairs: 10, lane_width: 1.0, spacing: 1.0}");
  const RunLog log = run_episode(cfg);
  const RunMetrics m = compute_metrics(log);

  // Wall-clock budget for a full-length episode: a course long enough that
  // the vehicle is still driving when the 30 s duration ends.
  const ScenarioConfig long_cfg = scenario("course: {kind: straight, pairs: 60}\nduration: 30.0");
  const auto t0 = std::chrono::steady_clock::now();
  const RunLog long_log = run_episode(long_cfg);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double sim = long_log.ticks.size() * long_cfg.dt_autonomy;

  const bool ok = m.completed && m.cones_hit == 0 && m.cross_track_max <= 0.25 &&
                  long_log.termination == Termination::duration && sim >= 30.0 - 1e-9 && wall < 30.0;
  return {ok, fmt("completed=%d cones_hit=%d cross_track_max=%.4f m; 30 s episode took %.2f s wall", m.completed,
                  m.cones_hit, m.cross_track_max, wall)};
}

Outcome slalom_robustness() {
  const RunLog log = run_episode(scenario(kSlalom));
  const RunMetrics m = compute_metrics(log);
  return {m.cones_hit == 0, fmt("cones_hit=%d completed=%d cross_track_rmse=%.3f m", m.cones_hit, m.completed,
                                m.cross_track_rmse)};
}

Outcome circle_property() {
  const VehicleParams p;
  const oracle::Drive drv{p.motor_stall_torque, p.motor_noload_speed, p.gear_ratio, p.wheel_radius,
                          p.mass,               p.drag_coeff,         p.rolling_coeff, p.gravity};
  const double dt = 0.001;
  double worst = 0.0;
  std::string detail;
  for (double delta : {0.1, 0.2, 0.3, 0.4}) {
    VehicleState s;
    s.speed = 1.0;
    s.steer_angle = delta;
    const double cmd = delta / p.max_steer;
    for (int i = 0; i < 2000; ++i) s = step(s, DriverInputs(drv.throttle_for(s.speed, 1.0), 0.0, cmd), dt, p);
    const double expected = p.wheelbase / std::tan(delta);
    const int n = static_cast<int>(std::ceil(2.0 * std::numbers::pi * expected / dt));
    std::vector<oracle::P> pts;
    for (int i = 0; i < n; ++i) {
      s = step(s, DriverInputs(drv.throttle_for(s.speed, 1.0), 0.0, cmd), dt, p);
      pts.push_back({s.x, s.y});
    }
    const double err = std::abs(oracle::fit_circle(pts).r - expected) / expected;
    worst = std::max(worst, err);
    detail += fmt("%s%.1f:%.4f%%", detail.empty() ? "" : " ", delta, 100 * err);
  }
  return {worst <= 0.01, "relative radius error per delta " + detail};
}

Outcome projection_round_trip() {
  CameraModel cam;
  cam.max_range = 11.0;
  double worst_range = 0.0, worst_bearing = 0.0;
  int points = 0;
  for (double range = 1.0; range <= 10.0 + 1e-9; range += 0.25) {
    for (double deg = -25.0; deg <= 25.0 + 1e-9; deg += 2.5) {
      const double b = deg * std::numbers::pi / 180.0;
      const Cone cone{cam.mount_forward + range * std::cos(b), range * std::sin(b), ConeLabel::left_marker};
      const auto proj = project_cone(cone, {}, cam);
      if (!proj) return {false, fmt("cone at %.2f m, %.1f deg did not project", range, deg)};
      Detection d;
      d.bbox = proj->first;
      const Vec2 est = *estimate_position(d, cam).position;
      const double r = std::hypot(est.x() - cam.mount_forward, est.y());
      const double bearing = std::atan2(est.y(), est.x() - cam.mount_forward);
      worst_range = std::max(worst_range, std::abs(r - range) / range);
      worst_bearing = std::max(worst_bearing, std::abs(bearing - b) * 180.0 / std::numbers::pi);
      ++points;
    }
  }
  return {worst_range <= 0.02 && worst_bearing <= 0.5,
          fmt("%d grid points; worst range error %.3g%%, worst bearing error %.3g deg", points, 100 * worst_range,
              worst_bearing)};
}

Outcome detector_oracle() {
  const CameraModel cam;
  std::mt19937_64 g(20240607);
  std::uniform_real_distribution<double> range(0.9, 2.3), bearing(-0.6, 0.6);
  std::uniform_int_distribution<int> count(1, 6);
  double worst_iou = 1.0;
  int cones_total = 0;
  for (int scene = 0; scene < 100; ++scene) {
    const int n = count(g);
    Course course;
    std::vector<BBox> boxes;
    int attempts = 0;
    while (static_cast<int>(course.cones.size()) < n && attempts++ < 10000) {
      const double r = range(g), b = bearing(g);
      const Cone cone{cam.mount_forward + r * std::cos(b), r * std::sin(b),
                      std::bernoulli_distribution(0.5)(g) ? ConeLabel::left_marker : ConeLabel::right_marker};
      const auto proj = project_cone(cone, {}, cam);
      if (!proj) continue;
      const BBox& box = proj->first;
      // Keep boxes at least two pixels apart so no two cones touch in the raster.
      bool clear = box.u_min >= 2 && box.u_max <= cam.width - 2;
      for (const BBox& o : boxes) {
        if (box.u_min < o.u_max + 2 && o.u_min < box.u_max + 2 && box.v_min < o.v_max + 2 && o.v_min < box.v_max + 2) {
          clear = false;
        }
      }
      if (!clear) continue;
      course.cones.push_back(cone);
      boxes.push_back(box);
    }
    if (static_cast<int>(course.cones.size()) != n) return {false, fmt("scene %d: could not place %d cones", scene, n)};
    const auto dets = detect_cones(render_image(course, {}, cam));
    if (dets.size() != boxes.size()) {
      return {false, fmt("scene %d: %zu detections for %zu cones", scene, dets.size(), boxes.size())};
    }
    std::vector<bool> used(dets.size(), false);
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      std::size_t best = dets.size();
      double best_iou = 0.0;
      for (std::size_t k = 0; k < dets.size(); ++k) {
        const double v = iou(boxes[i], dets[k].bbox);
        if (!used[k] && v > best_iou) {
          best_iou = v;
          best = k;
        }
      }
      if (best == dets.size()) return {false, fmt("scene %d: cone %zu unmatched", scene, i)};
      used[best] = true;
      if (dets[best].label != course.cones[i].label) return {false, fmt("scene %d: label mismatch", scene)};
      worst_iou = std::min(worst_iou, best_iou);
    }
    cones_total += n;
  }
  return {worst_iou >= 0.9, fmt("100 scenes, %d cones, counts and labels exact, min IoU %.4f", cones_total, worst_iou)};
}

Outcome bridge_fuzz() {
  using namespace twinlane::bridge;
  std::mt19937_64 g(77);
  Bytes stream;
  std::vector<Envelope> sent;
  for (int i = 0; i < 10000; ++i) {
    sent.push_back(fuzz::random_envelope(g));
    append_frame(stream, sent.back());
  }
  FrameReader reader;
  std::size_t pos = 0, received = 0, mismatches = 0;
  while (pos < stream.size()) {
    const std::size_t n =
        std::min<std::size_t>(stream.size() - pos, std::uniform_int_distribution<std::size_t>(1, 512)(g));
    reader.feed(std::span(stream.data() + pos, n));
    pos += n;
    while (auto e = reader.next()) {
      if (received >= sent.size() || !(*e == sent[received]) || encode_frame(*e) != encode_frame(sent[received])) {
        ++mismatches;
      }
      ++received;
    }
  }

  auto kind_of = [](const Bytes& body, bool prefix_only = false) -> std::string {
    Bytes buf;
    if (prefix_only) {
      buf = body;
    } else {
      const auto len = static_cast<std::uint32_t>(body.size());
      buf = {static_cast<std::uint8_t>(len >> 24), static_cast<std::uint8_t>(len >> 16),
             static_cast<std::uint8_t>(len >> 8), static_cast<std::uint8_t>(len)};
      buf.insert(buf.end(), body.begin(), body.end());
    }
    try {
      decode_frame(buf);
    } catch (const FrameError& e) {
      return std::string(to_string(e.kind()));
    }
    return "none";
  };
  auto text = [](const std::string& s) { return Bytes(s.begin(), s.end()); };
  const std::string k_prefix = kind_of(Bytes{0x80, 0, 0, 0}, true);
  const std::string k_utf8 = kind_of(Bytes{'"', 0xfe, '"'});
  const std::string k_json = kind_of(text("{\"topic\":\"a\","));
  const std::string k_field = kind_of(text(R"({"topic":"a","type":"x","seq":0,"data":{}})"));
  const bool kinds_ok = k_prefix == "frame_too_large" && k_utf8 == "invalid_utf8" && k_json == "invalid_json" &&
                        k_field == "missing_field";
  return {received == sent.size() && mismatches == 0 && reader.buffered() == 0 && kinds_ok,
          fmt("%zu/%zu envelopes bit-exact over %zu bytes; errors: prefix=%s utf8=%s json=%s field=%s", received - mismatches,
              sent.size(), stream.size(), k_prefix.c_str(), k_utf8.c_str(), k_json.c_str(), k_field.c_str())};
}

Outcome transport_determinism() {
  const ScenarioConfig in_proc = scenario(std::string(kSlalom) + "seed: 3\n");
  const ScenarioConfig tcp = scenario(std::string(kSlalom) + "seed: 3\ntransport: {mode: tcp}\n");
  const RunLog a = run_episode(in_proc);
  const RunLog b = run_episode(in_proc);
  const RunLog c = run_episode(tcp);
  const bool ab = identical(a, b), ac = identical(a, c);
  return {ab && ac, fmt("%zu ticks; in_process repeat identical=%d, tcp identical=%d", a.ticks.size(), ab, ac)};
}

bool all_zero(const GapReport& g) {
  const auto& d = g.metric_deltas;
  return g.pose_rmse == 0 && g.pose_max_divergence == 0 && g.heading_rmse == 0 && g.input_rmse.throttle == 0 &&
         g.input_rmse.braking == 0 && g.input_rmse.steering == 0 && d.cross_track_rmse == 0 &&
         d.cross_track_max == 0 && d.cones_hit == 0 && d.completed == 0 && d.progress == 0 && d.mean_speed == 0;
}

Outcome null_perturbation() {
  const ScenarioConfig cfg = scenario(kSlalom);
  const ScenarioConfig null_cfg = scenario(std::string(kSlalom) +
                                           "perturbation: {param_scales: {motor_stall_torque: 1.0, mass: 1.0}, "
                                           "sensor_noise_scale: 1.0, actuation_delay_steps: 0, "
                                           "mount_offset_error: [0.0, 0.0]}\n");
  const ScenarioConfig heavy = scenario(std::string(kSlalom) + "perturbation: {param_scales: {motor_stall_torque: 1.3}}\n");
  const RunLog a = run_episode(cfg);
  const RunLog b = run_episode(cfg);
  const RunLog n = run_episode(null_cfg);
  const RunLog h = run_episode(heavy);
  const bool same = all_zero(gap_report(a, b));
  const bool null_zero = all_zero(gap_report(a, n));
  const GapReport gh = gap_report(a, h);
  return {same && null_zero && gh.pose_rmse > 0.0,
          fmt("identical-config gap zero=%d, null perturbation gap zero=%d, stall torque x1.3 pose_rmse=%.4f m", same,
              null_zero, gh.pose_rmse)};
}

Outcome latency_monotonicity() {
  const RunLog nominal = run_episode(scenario(kSlalom));
  std::string detail;
  double prev = -1.0;
  bool ok = true;
  for (int d : {0, 1, 3, 5}) {
    const RunLog proxy = run_episode(scenario(std::string(kSlalom) + fmt("perturbation: {actuation_delay_steps: %d}\n", d)));
    const GapReport g = gap_report(nominal, proxy);
    ok = ok && g.pose_rmse >= prev;
    prev = g.pose_rmse;
    detail += fmt("%sd=%d:%.4f(%zu ticks,%s)", detail.empty() ? "" : " ", d, g.pose_rmse, g.ticks_compared,
                  std::string(to_string(proxy.termination)).c_str());
  }
  return {ok, "pose_rmse " + detail};
}

Outcome config_overlay() {
  int passed = 0;
  std::string failed;
  const auto cases = overlay_cases::table();
  for (const auto& c : cases) {
    bool ok = false;
    try {
      const Json merged = merge_config(default_config(), parse_config_text(c.overlay_yaml));
      if (!c.error) {
        Json expected = default_config();
        for (const auto& [ptr, value] : c.changes) expected[Json::json_pointer(ptr)] = value;
        scenario_from_config(merged);
        ok = merged == expected;
      }
    } catch (const ConfigError& e) {
      ok = c.error && e.kind() == *c.error && e.path() == c.error_path &&
           std::string(e.what()).find(c.error_path) != std::string::npos;
    }
    if (ok) {
      ++passed;
    } else {
      failed += " [" + c.name + "]";
    }
  }
  return {passed == static_cast<int>(cases.size()) && cases.size() == 10,
          fmt("%d/%zu overlay cases", passed, cases.size()) + (failed.empty() ? "" : "; failed:" + failed)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"closed-loop navigation", closed_loop_navigation},
      {"slalom robustness", slalom_robustness},
      {"circle-property physics", circle_property},
      {"projection round-trip", projection_round_trip},
      {"detector/oracle agreement", detector_oracle},
      {"bridge fuzz", bridge_fuzz},
      {"transport equivalence and determinism", transport_determinism},
      {"null-perturbation zero gap", null_perturbation},
      {"latency monotonicity", latency_monotonicity},
      {"config overlay", config_overlay},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
