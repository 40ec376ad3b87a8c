#include "twinlane/sensors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "twinlane/errors.hpp"
#include "twinlane/random.hpp"

namespace twinlane {
namespace {

// First and one-past-last pixel index whose centre lies in [lo, hi).
std::pair<int, int> pixel_span(double lo, double hi, int limit) {
  const int first = std::clamp(static_cast<int>(std::ceil(lo - 0.5)), 0, limit);
  const int last = std::clamp(static_cast<int>(std::ceil(hi - 0.5)), 0, limit);
  return {first, std::max(first, last)};
}

Pose2 camera_pose(const Pose2& vehicle, const CameraModel& cam) {
  const Vec2 p = to_world(vehicle, {cam.mount_forward, 0.0});
  return {p.x(), p.y(), vehicle.heading};
}

}  // namespace

void validate(const CameraModel& cam) {
  if (cam.width <= 0 || cam.height <= 0) throw InvalidArgument("camera: image size must be positive");
  if (!(cam.fx > 0.0) || !(cam.fy > 0.0)) throw InvalidArgument("camera: fx, fy must be > 0");
  if (!(cam.cx > 0.0 && cam.cx < cam.width) || !(cam.cy > 0.0 && cam.cy < cam.height)) {
    throw InvalidArgument("camera: principal point must lie inside the image");
  }
  if (!(cam.max_range > 0.0)) throw InvalidArgument("camera: max_range must be > 0");
}

Image::Image(int w, int h, Rgb fill) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3) {
  for (std::size_t i = 0; i < pixels.size(); i += 3) {
    pixels[i] = fill[0];
    pixels[i + 1] = fill[1];
    pixels[i + 2] = fill[2];
  }
}

double iou(const BBox& a, const BBox& b) {
  const double w = std::min(a.u_max, b.u_max) - std::max(a.u_min, b.u_min);
  const double h = std::min(a.v_max, b.v_max) - std::max(a.v_min, b.v_min);
  if (w <= 0.0 || h <= 0.0) return 0.0;
  const double inter = w * h;
  return inter / (a.area() + b.area() - inter);
}

std::optional<std::pair<BBox, ConeLabel>> project_cone(const Cone& cone, const Pose2& vehicle_pose,
                                                       const CameraModel& cam) {
  const Vec2 rel = to_body(camera_pose(vehicle_pose, cam), cone.position());
  const double depth = rel.x();
  if (depth <= 1e-9) return std::nullopt;
  if (rel.norm() > cam.max_range) return std::nullopt;

  const double u_center = cam.cx - cam.fx * rel.y() / depth;
  const double half_width = cam.fx * cone.base_radius / depth;
  BBox box{u_center - half_width, cam.cy + cam.fy * (cam.mount_up - cone.height) / depth,
           u_center + half_width, cam.cy + cam.fy * cam.mount_up / depth};

  box.u_min = std::max(box.u_min, 0.0);
  box.v_min = std::max(box.v_min, 0.0);
  box.u_max = std::min(box.u_max, static_cast<double>(cam.width));
  box.v_max = std::min(box.v_max, static_cast<double>(cam.height));
  if (box.u_min >= box.u_max || box.v_min >= box.v_max) return std::nullopt;
  return std::pair{box, cone.label};
}

Image render_image(const Course& course, const Pose2& vehicle_pose, const CameraModel& cam) {
  Image img(cam.width, cam.height, kGroundColor);
  // Level camera: the horizon sits on the principal row.
  const auto [sky_begin, sky_end] = pixel_span(0.0, cam.cy, cam.height);
  for (int v = sky_begin; v < sky_end; ++v) {
    for (int u = 0; u < cam.width; ++u) img.set(u, v, kSkyColor);
  }

  struct Visible {
    double depth;
    std::size_t index;
    BBox box;
  };
  std::vector<Visible> visible;
  const Pose2 cam_pose = camera_pose(vehicle_pose, cam);
  for (std::size_t i = 0; i < course.cones.size(); ++i) {
    if (auto proj = project_cone(course.cones[i], vehicle_pose, cam)) {
      visible.push_back({to_body(cam_pose, course.cones[i].position()).x(), i, proj->first});
    }
  }
  std::stable_sort(visible.begin(), visible.end(),
                   [](const Visible& a, const Visible& b) { return a.depth > b.depth; });

  for (const Visible& vis : visible) {
    const Rgb color = label_color(course.cones[vis.index].label);
    const auto [u0, u1] = pixel_span(vis.box.u_min, vis.box.u_max, cam.width);
    const auto [v0, v1] = pixel_span(vis.box.v_min, vis.box.v_max, cam.height);
    for (int v = v0; v < v1; ++v) {
      for (int u = u0; u < u1; ++u) img.set(u, v, color);
    }
  }
  return img;
}

void write_ppm(const Image& image, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write image " + path.string());
  out << "P6\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()), static_cast<std::streamsize>(image.pixels.size()));
  if (!out) throw IoError("failed writing image " + path.string());
}

LidarScan lidar_scan(const Course& course, const Pose2& vehicle_pose, const LidarConfig& config) {
  if (config.n_beams < 1) throw InvalidArgument("lidar: n_beams must be >= 1");
  LidarScan scan{config.angle_min, config.angle_max, config.n_beams,
                 std::vector<double>(static_cast<std::size_t>(config.n_beams), config.max_range), config.max_range};
  const Vec2 origin = to_world(vehicle_pose, {config.mount_forward, 0.0});
  const int n = config.n_beams;

  for (int i = 0; i < n; ++i) {
    // Weighted form keeps beam angles exactly antisymmetric for symmetric limits.
    const double a = n == 1 ? config.angle_min
                            : (config.angle_min * (n - 1 - i) + config.angle_max * i) / (n - 1);
    const double heading = vehicle_pose.heading + a;
    const Vec2 dir{std::cos(heading), std::sin(heading)};
    double best = config.max_range;
    for (const Cone& cone : course.cones) {
      const Vec2 d = cone.position() - origin;
      const double b = d.dot(dir);
      const double disc = b * b - (d.squaredNorm() - cone.base_radius * cone.base_radius);
      if (disc < 0.0) continue;
      const double root = std::sqrt(disc);
      double t = b - root;
      if (t <= 0.0) t = b + root;
      if (t > 0.0) best = std::min(best, t);
    }
    scan.ranges[static_cast<std::size_t>(i)] = best;
  }
  return scan;
}

ImuSample imu_sample(const VehicleState& prev, const VehicleState& curr, const ImuNoise& noise,
                     std::uint64_t rng_seed) {
  const double dt = curr.time - prev.time;
  if (!(dt > 0.0)) throw InvalidArgument("imu_sample: time must increase between states");
  const double yaw_rate = wrap_angle(curr.heading - prev.heading) / dt;
  const CounterRng rng(rng_seed);
  ImuSample s;
  s.ax = (curr.speed - prev.speed) / dt + noise.sigma_accel * rng.normal(0);
  s.ay = curr.speed * yaw_rate + noise.sigma_accel * rng.normal(1);
  s.gyro_z = yaw_rate + noise.sigma_gyro * rng.normal(2);
  s.noise_sigma_accel = noise.sigma_accel;
  s.noise_sigma_gyro = noise.sigma_gyro;
  return s;
}

MocapPose mocap_pose(const VehicleState& state, double sigma_position, std::uint64_t rng_seed) {
  if (!(sigma_position >= 0.0)) throw InvalidArgument("mocap_pose: sigma_position must be >= 0");
  const CounterRng rng(rng_seed);
  return {state.x + sigma_position * rng.normal(0), state.y + sigma_position * rng.normal(1), state.heading,
          sigma_position};
}

}  // namespace twinlane
