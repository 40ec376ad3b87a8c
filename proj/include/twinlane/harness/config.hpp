#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>

#include "twinlane/autonomy.hpp"
#include "twinlane/bridge/frame.hpp"
#include "twinlane/sensors.hpp"
#include "twinlane/vehicle_model.hpp"
#include "twinlane/world.hpp"

namespace twinlane::harness {

using Json = bridge::Json;

enum class ConfigErrorKind { parse, unknown_key, type_conflict, invalid_value };

class ConfigError : public Error {
 public:
  ConfigError(ConfigErrorKind kind, std::string path, const std::string& what)
      : Error(what), kind_(kind), path_(std::move(path)) {}
  ConfigErrorKind kind() const noexcept { return kind_; }
  /// Dotted key path, e.g. "vehicle.mass"; empty for whole-file errors.
  const std::string& path() const noexcept { return path_; }
  const char* category() const noexcept override { return "config"; }

 private:
  ConfigErrorKind kind_;
  std::string path_;
};

/// Full default tree. Every accepted key appears here; a null value accepts
/// an overlay of any shape.
Json default_config();

/// Deep merge: maps merge recursively, scalars and lists replace wholesale.
/// Keys absent from `defaults` are rejected with their dotted path, as is an
/// overlay that swaps a map for a non-map (or the reverse).
Json merge_config(const Json& defaults, const Json& overlay);

/// YAML (block or flow; JSON is accepted) into a config tree.
Json parse_config_text(std::string_view text);
Json load_config_file(const std::filesystem::path& path);

struct CourseSpec {
  std::string kind = "straight";  // straight | slalom | arc
  int pairs = 10;
  double lane_width = 1.0;
  double spacing = 1.0;
  double amplitude = 0.5;  // slalom
  double period = 4.0;     // slalom
  double radius = 3.0;     // arc

  bool operator==(const CourseSpec&) const = default;
};

struct NoiseConfig {
  double imu_accel_sigma = 0.05;
  double imu_gyro_sigma = 0.005;
  double mocap_sigma = kDefaultMocapSigma;
};

enum class TransportMode { in_process, tcp };

struct TransportConfig {
  TransportMode mode = TransportMode::in_process;
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;
  /// Run the autonomy side on a local thread; otherwise connect to an
  /// external `twinlane stack` at host:port.
  bool spawn_stack = true;
};

/// Deterministic stand-in for the physical platform.
struct Perturbation {
  std::map<std::string, double> param_scales;  // VehicleParams field -> factor
  double sensor_noise_scale = 1.0;
  int actuation_delay_steps = 0;
  std::array<double, 2> mount_offset_error{0.0, 0.0};  // forward, up (m)

  bool is_null() const;
};

/// Vehicle parameters with each named field multiplied by its factor.
VehicleParams apply_scales(const Perturbation& perturbation, VehicleParams params);

struct ScenarioConfig {
  std::string course_path;
  CourseSpec course;
  double cone_base_radius = kDefaultConeRadius;
  double cone_height = kDefaultConeHeight;
  VehicleParams vehicle;
  CameraModel camera;
  ControllerParams controller;
  double lane_width = kDefaultLaneWidth;
  Footprint footprint;
  NoiseConfig noise;
  double dt_physics = 0.001;
  double dt_autonomy = 0.05;
  double duration = 30.0;
  std::uint64_t seed = 1;
  bool safety_stop = true;
  bool record_trace = true;
  TransportConfig transport;
  Perturbation perturbation;
  Json tree;  // resolved tree this config was bound from

  int steps_per_tick() const;
  int tick_count() const;
};

/// Binds and validates a merged tree. Throws ConfigError naming the path.
ScenarioConfig scenario_from_config(const Json& tree);

/// defaults <- overlay files in order <- inline overrides.
ScenarioConfig load_scenario(std::span<const std::filesystem::path> overlays, const Json& overrides = Json::object());

Json to_json(const VehicleParams& p);
VehicleParams vehicle_params_from_json(const Json& j);

}  // namespace twinlane::harness
