#include "twinlane/bridge/codec.hpp"

namespace twinlane::bridge {

void CodecRegistry::register_codec(Codec codec) {
  if (codec.type_tag.empty()) throw CodecError("codec: empty type tag");
  const std::string tag = codec.type_tag;
  if (!codecs_.emplace(tag, std::move(codec)).second) {
    throw CodecError("codec: type tag '" + tag + "' already registered");
  }
}

const Codec& CodecRegistry::lookup(const std::string& type_tag, std::type_index type) const {
  const auto it = codecs_.find(type_tag);
  if (it == codecs_.end()) throw CodecError("codec: no codec for type tag '" + type_tag + "'");
  if (it->second.value_type != type) throw CodecError("codec: '" + type_tag + "' used with the wrong value type");
  return it->second;
}

const Json& field(const Json& obj, const char* name) {
  if (!obj.is_object()) throw CodecError(std::string("codec: expected an object holding '") + name + "'");
  const auto it = obj.find(name);
  if (it == obj.end()) throw CodecError(std::string("codec: missing field '") + name + "'");
  return *it;
}

double number_field(const Json& obj, const char* name) {
  const Json& v = field(obj, name);
  if (!v.is_number()) throw CodecError(std::string("codec: field '") + name + "' must be a number");
  return v.get<double>();
}

namespace {

std::string string_field(const Json& obj, const char* name) {
  const Json& v = field(obj, name);
  if (!v.is_string()) throw CodecError(std::string("codec: field '") + name + "' must be a string");
  return v.get<std::string>();
}

template <class T>
T integer_field(const Json& obj, const char* name) {
  const Json& v = field(obj, name);
  if (!v.is_number_integer()) throw CodecError(std::string("codec: field '") + name + "' must be an integer");
  return v.get<T>();
}

ConeLabel label_field(const Json& obj) {
  try {
    return cone_label_from_string(string_field(obj, "label"));
  } catch (const InvalidArgument& e) {
    throw CodecError(std::string("codec: field 'label': ") + e.what());
  }
}

}  // namespace

Json to_json(const DriverInputs& v) {
  return {{"throttle", v.throttle}, {"braking", v.braking}, {"steering", v.steering}};
}

DriverInputs driver_inputs_from_json(const Json& j) {
  return {number_field(j, "throttle"), number_field(j, "braking"), number_field(j, "steering")};
}

Json to_json(const VehicleState& v) {
  return {{"x", v.x},         {"y", v.y},
          {"heading", v.heading}, {"speed", v.speed},
          {"steer_angle", v.steer_angle}, {"time", v.time}};
}

VehicleState vehicle_state_from_json(const Json& j) {
  return {number_field(j, "x"),     number_field(j, "y"),           number_field(j, "heading"),
          number_field(j, "speed"), number_field(j, "steer_angle"), number_field(j, "time")};
}

Json to_json(const Detection& v) {
  Json j{{"bbox", {v.bbox.u_min, v.bbox.v_min, v.bbox.u_max, v.bbox.v_max}},
         {"label", to_string(v.label)},
         {"confidence", v.confidence}};
  j["position"] = v.position ? Json{v.position->x(), v.position->y()} : Json(nullptr);
  return j;
}

Detection detection_from_json(const Json& j) {
  Detection d;
  const Json& box = field(j, "bbox");
  if (!box.is_array() || box.size() != 4) throw CodecError("codec: field 'bbox' must hold 4 numbers");
  d.bbox = {box[0].get<double>(), box[1].get<double>(), box[2].get<double>(), box[3].get<double>()};
  d.label = label_field(j);
  d.confidence = number_field(j, "confidence");
  const Json& pos = field(j, "position");
  if (!pos.is_null()) {
    if (!pos.is_array() || pos.size() != 2) throw CodecError("codec: field 'position' must hold 2 numbers");
    d.position = Vec2{pos[0].get<double>(), pos[1].get<double>()};
  }
  return d;
}

Json to_json(const std::vector<Detection>& v) {
  Json arr = Json::array();
  for (const auto& d : v) arr.push_back(to_json(d));
  return Json{{"detections", std::move(arr)}};
}

std::vector<Detection> detections_from_json(const Json& j) {
  const Json& arr = field(j, "detections");
  if (!arr.is_array()) throw CodecError("codec: field 'detections' must be an array");
  std::vector<Detection> out;
  for (const auto& item : arr) out.push_back(detection_from_json(item));
  return out;
}

Json to_json(const LidarScan& v) {
  return {{"angle_min", v.angle_min}, {"angle_max", v.angle_max}, {"n_beams", v.n_beams},
          {"ranges", v.ranges},       {"max_range", v.max_range}};
}

LidarScan lidar_scan_from_json(const Json& j) {
  LidarScan s;
  s.angle_min = number_field(j, "angle_min");
  s.angle_max = number_field(j, "angle_max");
  s.n_beams = integer_field<int>(j, "n_beams");
  const Json& ranges = field(j, "ranges");
  if (!ranges.is_array()) throw CodecError("codec: field 'ranges' must be an array");
  s.ranges = ranges.get<std::vector<double>>();
  s.max_range = number_field(j, "max_range");
  if (s.ranges.size() != static_cast<std::size_t>(s.n_beams)) throw CodecError("codec: 'ranges' length != n_beams");
  return s;
}

Json to_json(const ImuSample& v) {
  return {{"ax", v.ax},
          {"ay", v.ay},
          {"gyro_z", v.gyro_z},
          {"noise_sigma_accel", v.noise_sigma_accel},
          {"noise_sigma_gyro", v.noise_sigma_gyro}};
}

ImuSample imu_from_json(const Json& j) {
  return {number_field(j, "ax"), number_field(j, "ay"), number_field(j, "gyro_z"),
          number_field(j, "noise_sigma_accel"), number_field(j, "noise_sigma_gyro")};
}

Json to_json(const MocapPose& v) {
  return {{"x", v.x}, {"y", v.y}, {"heading", v.heading}, {"sigma_position", v.sigma_position}};
}

MocapPose mocap_pose_from_json(const Json& j) {
  return {number_field(j, "x"), number_field(j, "y"), number_field(j, "heading"), number_field(j, "sigma_position")};
}

Json to_json(const ImageMeta& v) {
  return {{"width", v.width}, {"height", v.height}, {"encoding", v.encoding}, {"frame", v.frame}};
}

ImageMeta image_meta_from_json(const Json& j) {
  ImageMeta m;
  m.width = integer_field<int>(j, "width");
  m.height = integer_field<int>(j, "height");
  m.encoding = string_field(j, "encoding");
  m.frame = integer_field<std::uint64_t>(j, "frame");
  return m;
}

CodecRegistry CodecRegistry::with_builtins() {
  CodecRegistry r;
  r.register_codec(Codec::make<DriverInputs>("driver_inputs", [](const DriverInputs& v) { return to_json(v); },
                                             driver_inputs_from_json));
  r.register_codec(Codec::make<VehicleState>("vehicle_state", [](const VehicleState& v) { return to_json(v); },
                                             vehicle_state_from_json));
  r.register_codec(Codec::make<std::vector<Detection>>(
      "detections", [](const std::vector<Detection>& v) { return to_json(v); }, detections_from_json));
  r.register_codec(
      Codec::make<LidarScan>("lidar_scan", [](const LidarScan& v) { return to_json(v); }, lidar_scan_from_json));
  r.register_codec(Codec::make<ImuSample>("imu", [](const ImuSample& v) { return to_json(v); }, imu_from_json));
  r.register_codec(
      Codec::make<MocapPose>("mocap_pose", [](const MocapPose& v) { return to_json(v); }, mocap_pose_from_json));
  r.register_codec(
      Codec::make<ImageMeta>("image_meta", [](const ImageMeta& v) { return to_json(v); }, image_meta_from_json));
  return r;
}

}  // namespace twinlane::bridge
