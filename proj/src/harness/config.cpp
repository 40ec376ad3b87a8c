#include "twinlane/harness/config.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "twinlane/text.hpp"

namespace twinlane::harness {
namespace {

// Field order matches VehicleParams.
constexpr std::array<const char*, 13> kVehicleFields = {
    "wheelbase",          "track_width",     "mass",       "wheel_radius",  "max_steer",
    "steer_rate_limit",   "gear_ratio",      "motor_stall_torque", "motor_noload_speed",
    "brake_force_max",    "drag_coeff",      "rolling_coeff",      "gravity"};

std::array<double*, 13> vehicle_fields(VehicleParams& p) {
  return {&p.wheelbase,          &p.track_width,        &p.mass,          &p.wheel_radius, &p.max_steer,
          &p.steer_rate_limit,   &p.gear_ratio,         &p.motor_stall_torque, &p.motor_noload_speed,
          &p.brake_force_max,    &p.drag_coeff,         &p.rolling_coeff, &p.gravity};
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

enum class Shape { null, map, list, scalar };

Shape shape_of(const Json& j) {
  if (j.is_null()) return Shape::null;
  if (j.is_object()) return Shape::map;
  if (j.is_array()) return Shape::list;
  return Shape::scalar;
}

const char* shape_name(Shape s) {
  switch (s) {
    case Shape::null: return "null";
    case Shape::map: return "map";
    case Shape::list: return "list";
    case Shape::scalar: return "scalar";
  }
  return "?";
}

Json merge_at(const Json& base, const Json& overlay, const std::string& path) {
  const Shape bs = shape_of(base), os = shape_of(overlay);
  if (bs == Shape::null) return overlay;
  if (bs != os) {
    throw ConfigError(ConfigErrorKind::type_conflict, path,
                      "config: type conflict at '" + (path.empty() ? "<root>" : path) + "': expected " +
                          shape_name(bs) + ", got " + shape_name(os));
  }
  if (bs != Shape::map) return overlay;
  Json out = base;
  for (const auto& [key, value] : overlay.items()) {
    const std::string sub = join(path, key);
    const auto it = base.find(key);
    if (it == base.end()) throw ConfigError(ConfigErrorKind::unknown_key, sub, "config: unknown key '" + sub + "'");
    out[key] = merge_at(*it, value, sub);
  }
  return out;
}

Json yaml_scalar(const YAML::Node& node) {
  const std::string& text = node.Scalar();
  if (node.Tag() == "!") return text;  // quoted
  if (text == "~" || text == "null" || text == "Null" || text == "NULL" || text.empty()) return nullptr;
  if (text == "true" || text == "True" || text == "TRUE") return true;
  if (text == "false" || text == "False" || text == "FALSE") return false;
  std::int64_t i = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (auto [p, ec] = std::from_chars(first, last, i); ec == std::errc() && p == last) return i;
  try {
    return parse_double(text);
  } catch (const InvalidArgument&) {
    return text;
  }
}

Json yaml_to_json(const YAML::Node& node) {
  switch (node.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined:
      return nullptr;
    case YAML::NodeType::Scalar:
      return yaml_scalar(node);
    case YAML::NodeType::Sequence: {
      Json arr = Json::array();
      for (const auto& item : node) arr.push_back(yaml_to_json(item));
      return arr;
    }
    case YAML::NodeType::Map: {
      Json obj = Json::object();
      for (const auto& kv : node) obj[kv.first.as<std::string>()] = yaml_to_json(kv.second);
      return obj;
    }
  }
  return nullptr;
}

// ---- binding helpers ----

[[noreturn]] void bad_value(const std::string& path, const std::string& what) {
  throw ConfigError(ConfigErrorKind::invalid_value, path, "config: '" + path + "' " + what);
}

const Json& at(const Json& tree, const std::string& dotted) {
  const Json* cur = &tree;
  for (std::string_view part : split(dotted, '.')) {
    const auto it = cur->find(std::string(part));
    if (it == cur->end()) bad_value(dotted, "is missing");
    cur = &*it;
  }
  return *cur;
}

double num(const Json& tree, const std::string& path) {
  const Json& v = at(tree, path);
  if (!v.is_number()) bad_value(path, "must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) bad_value(path, "must be finite");
  return d;
}

double positive(const Json& tree, const std::string& path) {
  const double d = num(tree, path);
  if (!(d > 0.0)) bad_value(path, "must be > 0");
  return d;
}

std::int64_t integer(const Json& tree, const std::string& path) {
  const Json& v = at(tree, path);
  if (!v.is_number_integer()) bad_value(path, "must be an integer");
  return v.get<std::int64_t>();
}

bool boolean(const Json& tree, const std::string& path) {
  const Json& v = at(tree, path);
  if (!v.is_boolean()) bad_value(path, "must be true or false");
  return v.get<bool>();
}

std::string str(const Json& tree, const std::string& path) {
  const Json& v = at(tree, path);
  if (!v.is_string()) bad_value(path, "must be a string");
  return v.get<std::string>();
}

template <class Fn>
void rethrow_as_config(const std::string& path, Fn&& fn) {
  try {
    fn();
  } catch (const InvalidArgument& e) {
    throw ConfigError(ConfigErrorKind::invalid_value, path, std::string("config: ") + e.what());
  }
}

}  // namespace

Json default_config() {
  const VehicleParams vp;
  const CameraModel cam;
  const ControllerParams cp;
  const Footprint fp;
  const NoiseConfig noise;
  const CourseSpec course;

  Json vehicle = to_json(vp);
  vehicle["motor_noload_speed"] = nullptr;  // derived from motor.kv and motor.supply_voltage

  Json scales = Json::object();
  for (const char* f : kVehicleFields) scales[f] = 1.0;

  Json tree = Json::object();
  tree["course_path"] = "";
  tree["course"] = {{"kind", course.kind},           {"pairs", course.pairs},
                    {"lane_width", course.lane_width}, {"spacing", course.spacing},
                    {"amplitude", course.amplitude}, {"period", course.period},
                    {"radius", course.radius}};
  tree["cone"] = {{"base_radius", kDefaultConeRadius}, {"height", kDefaultConeHeight}};
  tree["motor"] = {{"kv", kArtMotorKv}, {"supply_voltage", kDefaultSupplyVoltage}};
  tree["vehicle"] = vehicle;
  tree["camera"] = {{"width", cam.width},
                    {"height", cam.height},
                    {"fx", cam.fx},
                    {"fy", cam.fy},
                    {"cx", cam.cx},
                    {"cy", cam.cy},
                    {"mount_forward", cam.mount_forward},
                    {"mount_up", cam.mount_up},
                    {"max_range", cam.max_range}};
  tree["controller"] = {{"lookahead", cp.lookahead},
                        {"target_speed", cp.target_speed},
                        {"speed_gain", cp.speed_gain},
                        {"brake_gain", cp.brake_gain},
                        {"lane_width", kDefaultLaneWidth}};
  tree["footprint"] = {{"length", fp.length}, {"width", fp.width}, {"forward_offset", vp.wheelbase / 2.0}};
  tree["noise"] = {{"imu_accel_sigma", noise.imu_accel_sigma},
                   {"imu_gyro_sigma", noise.imu_gyro_sigma},
                   {"mocap_sigma", noise.mocap_sigma}};
  tree["dt_physics"] = 0.001;
  tree["dt_autonomy"] = 0.05;
  tree["duration"] = 30.0;
  tree["seed"] = 1;
  tree["safety_stop"] = true;
  tree["record_trace"] = true;
  tree["transport"] = {{"mode", "in_process"}, {"host", "127.0.0.1"}, {"port", 0}, {"spawn_stack", true}};
  tree["perturbation"] = {{"param_scales", scales},
                          {"sensor_noise_scale", 1.0},
                          {"actuation_delay_steps", 0},
                          {"mount_offset_error", {0.0, 0.0}}};
  return tree;
}

Json merge_config(const Json& defaults, const Json& overlay) { return merge_at(defaults, overlay, ""); }

Json parse_config_text(std::string_view text) {
  YAML::Node node;
  try {
    node = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(ConfigErrorKind::parse, "", std::string("config: YAML parse error: ") + e.what());
  }
  Json j = yaml_to_json(node);
  if (j.is_null()) return Json::object();
  if (!j.is_object()) throw ConfigError(ConfigErrorKind::parse, "", "config: top level must be a map");
  return j;
}

Json load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(ConfigErrorKind::parse, "", "config: cannot open '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config_text(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(e.kind(), e.path(), path.string() + ": " + e.what());
  }
}

bool Perturbation::is_null() const {
  for (const auto& [name, factor] : param_scales) {
    if (factor != 1.0) return false;
  }
  return sensor_noise_scale == 1.0 && actuation_delay_steps == 0 && mount_offset_error[0] == 0.0 &&
         mount_offset_error[1] == 0.0;
}

VehicleParams apply_scales(const Perturbation& perturbation, VehicleParams params) {
  const auto fields = vehicle_fields(params);
  for (const auto& [name, factor] : perturbation.param_scales) {
    const auto it = std::find_if(kVehicleFields.begin(), kVehicleFields.end(),
                                 [&](const char* f) { return name == f; });
    if (it == kVehicleFields.end()) throw InvalidArgument("perturbation: unknown vehicle field '" + name + "'");
    *fields[static_cast<std::size_t>(it - kVehicleFields.begin())] *= factor;
  }
  return params;
}

Json to_json(const VehicleParams& p) {
  Json j = Json::object();
  auto copy = p;
  const auto fields = vehicle_fields(copy);
  for (std::size_t i = 0; i < kVehicleFields.size(); ++i) j[kVehicleFields[i]] = *fields[i];
  return j;
}

VehicleParams vehicle_params_from_json(const Json& j) {
  VehicleParams p;
  const auto fields = vehicle_fields(p);
  for (std::size_t i = 0; i < kVehicleFields.size(); ++i) *fields[i] = num(j, kVehicleFields[i]);
  return p;
}

int ScenarioConfig::steps_per_tick() const { return static_cast<int>(std::lround(dt_autonomy / dt_physics)); }

int ScenarioConfig::tick_count() const { return static_cast<int>(std::floor(duration / dt_autonomy + 1e-9)); }

ScenarioConfig scenario_from_config(const Json& tree) {
  ScenarioConfig c;
  c.tree = tree;
  c.course_path = str(tree, "course_path");
  c.course.kind = str(tree, "course.kind");
  if (c.course.kind != "straight" && c.course.kind != "slalom" && c.course.kind != "arc") {
    bad_value("course.kind", "must be straight, slalom or arc");
  }
  c.course.pairs = static_cast<int>(integer(tree, "course.pairs"));
  if (c.course.pairs < 2) bad_value("course.pairs", "must be >= 2");
  c.course.lane_width = positive(tree, "course.lane_width");
  c.course.spacing = positive(tree, "course.spacing");
  c.course.amplitude = num(tree, "course.amplitude");
  c.course.period = positive(tree, "course.period");
  c.course.radius = positive(tree, "course.radius");
  c.cone_base_radius = positive(tree, "cone.base_radius");
  c.cone_height = positive(tree, "cone.height");

  Json vehicle = at(tree, "vehicle");
  if (vehicle["motor_noload_speed"].is_null()) {
    vehicle["motor_noload_speed"] = kv_to_noload_speed(positive(tree, "motor.kv"), positive(tree, "motor.supply_voltage"));
  }
  for (const char* f : kVehicleFields) {
    if (!vehicle[f].is_number()) bad_value(join("vehicle", f), "must be a number");
  }
  c.vehicle = vehicle_params_from_json(vehicle);
  rethrow_as_config("vehicle", [&] { validate(c.vehicle); });

  c.camera.width = static_cast<int>(integer(tree, "camera.width"));
  c.camera.height = static_cast<int>(integer(tree, "camera.height"));
  c.camera.fx = num(tree, "camera.fx");
  c.camera.fy = num(tree, "camera.fy");
  c.camera.cx = num(tree, "camera.cx");
  c.camera.cy = num(tree, "camera.cy");
  c.camera.mount_forward = num(tree, "camera.mount_forward");
  c.camera.mount_up = num(tree, "camera.mount_up");
  c.camera.max_range = num(tree, "camera.max_range");
  rethrow_as_config("camera", [&] { validate(c.camera); });

  c.controller.lookahead = num(tree, "controller.lookahead");
  c.controller.target_speed = num(tree, "controller.target_speed");
  c.controller.speed_gain = num(tree, "controller.speed_gain");
  c.controller.brake_gain = num(tree, "controller.brake_gain");
  c.lane_width = positive(tree, "controller.lane_width");
  rethrow_as_config("controller", [&] { validate(c.controller); });

  c.footprint = {positive(tree, "footprint.length"), positive(tree, "footprint.width"),
                 num(tree, "footprint.forward_offset")};
  c.noise = {num(tree, "noise.imu_accel_sigma"), num(tree, "noise.imu_gyro_sigma"), num(tree, "noise.mocap_sigma")};
  if (c.noise.imu_accel_sigma < 0 || c.noise.imu_gyro_sigma < 0 || c.noise.mocap_sigma < 0) {
    bad_value("noise", "sigmas must be >= 0");
  }

  c.dt_physics = positive(tree, "dt_physics");
  c.dt_autonomy = positive(tree, "dt_autonomy");
  c.duration = positive(tree, "duration");
  if (c.dt_physics > kMaxStepDt) bad_value("dt_physics", "must be <= 0.05");
  const double ratio = c.dt_autonomy / c.dt_physics;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio || std::round(ratio) < 1) {
    bad_value("dt_autonomy", "must be an integer multiple of dt_physics");
  }
  const std::int64_t seed = integer(tree, "seed");
  c.seed = static_cast<std::uint64_t>(seed);
  c.safety_stop = boolean(tree, "safety_stop");
  c.record_trace = boolean(tree, "record_trace");

  const std::string mode = str(tree, "transport.mode");
  if (mode == "in_process") {
    c.transport.mode = TransportMode::in_process;
  } else if (mode == "tcp") {
    c.transport.mode = TransportMode::tcp;
  } else {
    bad_value("transport.mode", "must be in_process or tcp");
  }
  c.transport.host = str(tree, "transport.host");
  const std::int64_t port = integer(tree, "transport.port");
  if (port < 0 || port > 65535) bad_value("transport.port", "must be in [0, 65535]");
  c.transport.port = static_cast<std::uint16_t>(port);
  c.transport.spawn_stack = boolean(tree, "transport.spawn_stack");

  for (const auto& [name, value] : at(tree, "perturbation.param_scales").items()) {
    const std::string path = "perturbation.param_scales." + name;
    c.perturbation.param_scales[name] = positive(tree, path);
  }
  c.perturbation.sensor_noise_scale = positive(tree, "perturbation.sensor_noise_scale");
  const std::int64_t delay = integer(tree, "perturbation.actuation_delay_steps");
  if (delay < 0) bad_value("perturbation.actuation_delay_steps", "must be >= 0");
  c.perturbation.actuation_delay_steps = static_cast<int>(delay);
  const Json& mount = at(tree, "perturbation.mount_offset_error");
  if (!mount.is_array() || mount.size() != 2 || !mount[0].is_number() || !mount[1].is_number()) {
    bad_value("perturbation.mount_offset_error", "must be a list of two numbers");
  }
  c.perturbation.mount_offset_error = {mount[0].get<double>(), mount[1].get<double>()};
  rethrow_as_config("perturbation", [&] { validate(apply_scales(c.perturbation, c.vehicle)); });
  return c;
}

ScenarioConfig load_scenario(std::span<const std::filesystem::path> overlays, const Json& overrides) {
  Json tree = default_config();
  for (const auto& path : overlays) {
    try {
      tree = merge_config(tree, load_config_file(path));
    } catch (const ConfigError& e) {
      if (e.kind() == ConfigErrorKind::parse) throw;
      throw ConfigError(e.kind(), e.path(), path.string() + ": " + e.what());
    }
  }
  tree = merge_config(tree, overrides);
  return scenario_from_config(tree);
}

}  // namespace twinlane::harness
