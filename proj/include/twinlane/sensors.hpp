#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include "twinlane/geometry.hpp"
#include "twinlane/vehicle_model.hpp"
#include "twinlane/world.hpp"

namespace twinlane {

/// Level pinhole camera looking along the vehicle's forward axis.
struct CameraModel {
  int width = 1280;
  int height = 960;
  double fx = 320.0;
  double fy = 320.0;
  double cx = 640.0;
  double cy = 480.0;
  double mount_forward = 0.57;  // m ahead of the reference point (front bumper)
  double mount_up = 0.15;       // m above ground
  double max_range = 2.5;       // m

  bool operator==(const CameraModel&) const = default;
};

void validate(const CameraModel& cam);

using Rgb = std::array<std::uint8_t, 3>;

// Flat-shading palette of the synthetic camera.
inline constexpr Rgb kLeftConeColor{255, 0, 0};
inline constexpr Rgb kRightConeColor{0, 255, 0};
inline constexpr Rgb kGroundColor{90, 90, 90};
inline constexpr Rgb kSkyColor{200, 220, 255};

inline constexpr Rgb label_color(ConeLabel label) {
  return label == ConeLabel::left_marker ? kLeftConeColor : kRightConeColor;
}

struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major RGB8

  Image() = default;
  Image(int width, int height, Rgb fill = {0, 0, 0});

  Rgb at(int u, int v) const {
    const auto i = 3 * (static_cast<std::size_t>(v) * width + u);
    return {pixels[i], pixels[i + 1], pixels[i + 2]};
  }
  void set(int u, int v, Rgb c) {
    const auto i = 3 * (static_cast<std::size_t>(v) * width + u);
    pixels[i] = c[0];
    pixels[i + 1] = c[1];
    pixels[i + 2] = c[2];
  }
  bool operator==(const Image&) const = default;
};

/// Half-open box in image coordinates (v grows downward). A pixel (u, v) is
/// covered when its centre (u + 0.5, v + 0.5) lies inside.
struct BBox {
  double u_min = 0.0;
  double v_min = 0.0;
  double u_max = 0.0;
  double v_max = 0.0;

  double width() const { return u_max - u_min; }
  double height() const { return v_max - v_min; }
  double area() const { return width() * height(); }
  double u_center() const { return 0.5 * (u_min + u_max); }
  bool operator==(const BBox&) const = default;
};

double iou(const BBox& a, const BBox& b);

/// Pinhole projection of a cone's bounding cylinder, clipped to the image.
/// Empty when the cone is behind the image plane, beyond max_range, or
/// entirely outside the frame.
std::optional<std::pair<BBox, ConeLabel>> project_cone(const Cone& cone, const Pose2& vehicle_pose,
                                                       const CameraModel& cam);

/// Flat-shaded raster: sky above the horizon row, ground below, each visible
/// cone filled over its projected box, painted far to near.
Image render_image(const Course& course, const Pose2& vehicle_pose, const CameraModel& cam);

/// Binary PPM (P6) export for debugging.
void write_ppm(const Image& image, const std::filesystem::path& path);

struct LidarConfig {
  double angle_min = -std::numbers::pi + std::numbers::pi / 360.0;
  double angle_max = std::numbers::pi - std::numbers::pi / 360.0;
  int n_beams = 360;
  double max_range = 10.0;
  double mount_forward = 0.2;
};

struct LidarScan {
  double angle_min = 0.0;
  double angle_max = 0.0;
  int n_beams = 0;
  std::vector<double> ranges;
  double max_range = 0.0;

  bool operator==(const LidarScan&) const = default;
};

/// Single horizontal ring; beams uniformly spaced with both endpoints included.
LidarScan lidar_scan(const Course& course, const Pose2& vehicle_pose, const LidarConfig& config);

struct ImuNoise {
  double sigma_accel = 0.0;  // m/s^2
  double sigma_gyro = 0.0;   // rad/s
};

struct ImuSample {
  double ax = 0.0;  // body frame, forward
  double ay = 0.0;  // body frame, left
  double gyro_z = 0.0;
  double noise_sigma_accel = 0.0;
  double noise_sigma_gyro = 0.0;

  bool operator==(const ImuSample&) const = default;
};

/// Finite-difference IMU between two states plus seeded Gaussian noise.
ImuSample imu_sample(const VehicleState& prev, const VehicleState& curr, const ImuNoise& noise,
                     std::uint64_t rng_seed);

inline constexpr double kDefaultMocapSigma = 0.001;

struct MocapPose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  double sigma_position = 0.0;

  bool operator==(const MocapPose&) const = default;
};

MocapPose mocap_pose(const VehicleState& state, double sigma_position = kDefaultMocapSigma,
                     std::uint64_t rng_seed = 0);

}  // namespace twinlane
