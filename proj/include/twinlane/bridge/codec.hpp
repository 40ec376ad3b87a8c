#pragma once

#include <any>
#include <functional>
#include <map>
#include <string>
#include <typeindex>
#include <vector>

#include "twinlane/autonomy.hpp"
#include "twinlane/bridge/frame.hpp"
#include "twinlane/sensors.hpp"
#include "twinlane/vehicle_model.hpp"

namespace twinlane::bridge {

class CodecError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "codec"; }
};

/// Type-erased serialize/deserialize pair for one type tag.
struct Codec {
  std::string type_tag;
  std::type_index value_type = typeid(void);
  std::function<Json(const std::any&)> serialize;
  std::function<std::any(const Json&)> deserialize;

  template <class T>
  static Codec make(std::string tag, std::function<Json(const T&)> to_json, std::function<T(const Json&)> from_json) {
    return {std::move(tag), typeid(T),
            [f = std::move(to_json)](const std::any& v) { return f(std::any_cast<const T&>(v)); },
            [f = std::move(from_json)](const Json& j) { return std::any(f(j)); }};
  }
};

class CodecRegistry {
 public:
  /// Throws CodecError when the tag is already taken.
  void register_codec(Codec codec);
  bool contains(const std::string& type_tag) const { return codecs_.contains(type_tag); }

  template <class T>
  Json serialize(const std::string& type_tag, const T& value) const {
    return lookup(type_tag, typeid(T)).serialize(std::any(value));
  }

  template <class T>
  T deserialize(const std::string& type_tag, const Json& payload) const {
    return std::any_cast<T>(lookup(type_tag, typeid(T)).deserialize(payload));
  }

  /// Registry preloaded with driver_inputs, vehicle_state, detections,
  /// lidar_scan, imu, mocap_pose and image_meta.
  static CodecRegistry with_builtins();

 private:
  const Codec& lookup(const std::string& type_tag, std::type_index type) const;
  std::map<std::string, Codec> codecs_;
};

/// Header sent ahead of raw RGB8 pixels.
struct ImageMeta {
  int width = 0;
  int height = 0;
  std::string encoding = "rgb8";
  std::uint64_t frame = 0;

  bool operator==(const ImageMeta&) const = default;
};

// Helpers shared by codec implementations: missing or mistyped fields raise
// CodecError naming the field.
const Json& field(const Json& obj, const char* name);
double number_field(const Json& obj, const char* name);

Json to_json(const DriverInputs& v);
DriverInputs driver_inputs_from_json(const Json& j);
Json to_json(const VehicleState& v);
VehicleState vehicle_state_from_json(const Json& j);
Json to_json(const Detection& v);
Detection detection_from_json(const Json& j);
Json to_json(const std::vector<Detection>& v);
std::vector<Detection> detections_from_json(const Json& j);
Json to_json(const LidarScan& v);
LidarScan lidar_scan_from_json(const Json& j);
Json to_json(const ImuSample& v);
ImuSample imu_from_json(const Json& j);
Json to_json(const MocapPose& v);
MocapPose mocap_pose_from_json(const Json& j);
Json to_json(const ImageMeta& v);
ImageMeta image_meta_from_json(const Json& j);

}  // namespace twinlane::bridge
