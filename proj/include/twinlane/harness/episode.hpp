#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "twinlane/autonomy.hpp"
#include "twinlane/bridge/codec.hpp"
#include "twinlane/bridge/endpoint.hpp"
#include "twinlane/harness/config.hpp"
#include "twinlane/sensors.hpp"

namespace twinlane::harness {

struct PlanSummary {
  Vec2 target = Vec2::Zero();
  bool valid = false;

  bool operator==(const PlanSummary&) const = default;
};

Json to_json(const PlanSummary& p);
PlanSummary plan_summary_from_json(const Json& j);

struct TickRecord {
  double time = 0.0;
  VehicleState state;
  DriverInputs inputs;  // as commanded, before any actuation delay
  std::vector<Detection> detections;
  PlanSummary plan;
  ImuSample imu;
  MocapPose mocap;
};

enum class Termination { duration, completed, safety_stop };

std::string_view to_string(Termination t);
Termination termination_from_string(std::string_view s);

struct RunLog {
  Json config;  // resolved scenario tree without the transport section
  std::uint64_t seed = 0;
  double dt_physics = 0.0;
  double dt_autonomy = 0.0;
  std::string course_text;
  std::uint64_t course_hash = 0;
  std::vector<TickRecord> ticks;
  std::vector<Pose2> trace;  // every physics step when recorded
  VehicleState final_state;
  Termination termination = Termination::duration;
};

Json to_json(const RunLog& log);
RunLog run_log_from_json(const Json& j);

/// Topic names of the plant <-> stack link.
namespace topics {
inline constexpr const char* kImage = "camera/image";
inline constexpr const char* kState = "vehicle/state";
inline constexpr const char* kDetections = "perception/detections";
inline constexpr const char* kPlan = "planning/plan";
inline constexpr const char* kInputs = "control/driver_inputs";
}  // namespace topics

/// Built-in codecs plus the harness-internal `plan_summary`.
const bridge::CodecRegistry& harness_codecs();

struct StackConfig {
  CameraModel camera;
  double cone_height = kDefaultConeHeight;
  VehicleParams vehicle;
  ControllerParams controller;
  double lane_width = kDefaultLaneWidth;
};

StackConfig stack_config(const ScenarioConfig& cfg);

/// Autonomy side of the link: for every camera frame it replies with
/// detections, the plan summary and driver inputs, in that order.
class StackNode {
 public:
  explicit StackNode(StackConfig config) : config_(std::move(config)) {}

  static std::vector<bridge::TopicDeclaration> declarations();

  /// Handles everything already received; returns the number of frames answered.
  int service(bridge::Endpoint& endpoint);

  /// Blocking loop until the peer closes the connection.
  void run(bridge::Endpoint& endpoint, std::chrono::milliseconds idle_timeout = std::chrono::seconds(30));

 private:
  StackConfig config_;
  VehicleState latest_state_;
};

std::vector<bridge::TopicDeclaration> plant_declarations();

/// Closed-loop episode. Physics runs every dt_physics with the (possibly
/// delayed) latest inputs; every dt_autonomy the plant renders the camera,
/// exchanges one lock-step round with the stack over the configured
/// transport, and logs the tick.
RunLog run_episode(const ScenarioConfig& cfg);

/// Serves the stack over TCP for one plant connection (hardware-in-the-loop).
void serve_stack(const StackConfig& config, const std::string& host, std::uint16_t port,
                 std::chrono::milliseconds accept_timeout = std::chrono::seconds(60));

}  // namespace twinlane::harness
