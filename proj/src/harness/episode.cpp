#include "twinlane/harness/episode.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <deque>
#include <exception>
#include <optional>
#include <thread>

#include "twinlane/harness/course_gen.hpp"
#include "twinlane/harness/metrics.hpp"
#include "twinlane/random.hpp"

namespace twinlane::harness {

using bridge::Direction;
using bridge::Endpoint;
using bridge::Envelope;
using bridge::TopicDeclaration;

namespace {

constexpr auto kReplyTimeout = std::chrono::seconds(30);

// Sub-stream ids of the per-tick noise keys.
constexpr std::uint64_t kImuStream = 1;
constexpr std::uint64_t kMocapStream = 2;

Json pose_json(const Pose2& p) { return Json::array({p.x, p.y, p.heading}); }

double number_at(const Json& j, std::size_t i) {
  if (!j.is_array() || j.size() <= i || !j[i].is_number()) throw InvalidArgument("run log: malformed number list");
  return j[i].get<double>();
}

}  // namespace

// ---- serialization ----

Json to_json(const PlanSummary& p) {
  return {{"target", {p.target.x(), p.target.y()}}, {"valid", p.valid}};
}

PlanSummary plan_summary_from_json(const Json& j) {
  const Json& target = bridge::field(j, "target");
  const Json& valid = bridge::field(j, "valid");
  if (!target.is_array() || target.size() != 2) throw bridge::CodecError("codec: field 'target' must hold 2 numbers");
  if (!valid.is_boolean()) throw bridge::CodecError("codec: field 'valid' must be a boolean");
  return {Vec2{target[0].get<double>(), target[1].get<double>()}, valid.get<bool>()};
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::duration: return "duration";
    case Termination::completed: return "completed";
    case Termination::safety_stop: return "safety_stop";
  }
  return "duration";
}

Termination termination_from_string(std::string_view s) {
  if (s == "duration") return Termination::duration;
  if (s == "completed") return Termination::completed;
  if (s == "safety_stop") return Termination::safety_stop;
  throw InvalidArgument("unknown termination '" + std::string(s) + "'");
}

Json to_json(const RunLog& log) {
  Json ticks = Json::array();
  for (const TickRecord& t : log.ticks) {
    ticks.push_back({{"time", t.time},
                     {"state", bridge::to_json(t.state)},
                     {"inputs", bridge::to_json(t.inputs)},
                     {"detections", bridge::to_json(t.detections)["detections"]},
                     {"plan", to_json(t.plan)},
                     {"imu", bridge::to_json(t.imu)},
                     {"mocap", bridge::to_json(t.mocap)}});
  }
  Json trace = Json::array();
  for (const Pose2& p : log.trace) trace.push_back(pose_json(p));
  return {{"config", log.config},
          {"seed", log.seed},
          {"dt_physics", log.dt_physics},
          {"dt_autonomy", log.dt_autonomy},
          {"course", log.course_text},
          {"course_hash", log.course_hash},
          {"termination", to_string(log.termination)},
          {"final_state", bridge::to_json(log.final_state)},
          {"ticks", std::move(ticks)},
          {"trace", std::move(trace)}};
}

RunLog run_log_from_json(const Json& j) {
  try {
    RunLog log;
    log.config = bridge::field(j, "config");
    log.seed = bridge::field(j, "seed").get<std::uint64_t>();
    log.dt_physics = bridge::number_field(j, "dt_physics");
    log.dt_autonomy = bridge::number_field(j, "dt_autonomy");
    log.course_text = bridge::field(j, "course").get<std::string>();
    log.course_hash = bridge::field(j, "course_hash").get<std::uint64_t>();
    log.termination = termination_from_string(bridge::field(j, "termination").get<std::string>());
    log.final_state = bridge::vehicle_state_from_json(bridge::field(j, "final_state"));
    for (const Json& t : bridge::field(j, "ticks")) {
      TickRecord r;
      r.time = bridge::number_field(t, "time");
      r.state = bridge::vehicle_state_from_json(bridge::field(t, "state"));
      r.inputs = bridge::driver_inputs_from_json(bridge::field(t, "inputs"));
      r.detections = bridge::detections_from_json(Json{{"detections", bridge::field(t, "detections")}});
      r.plan = plan_summary_from_json(bridge::field(t, "plan"));
      r.imu = bridge::imu_from_json(bridge::field(t, "imu"));
      r.mocap = bridge::mocap_pose_from_json(bridge::field(t, "mocap"));
      log.ticks.push_back(std::move(r));
    }
    for (const Json& p : bridge::field(j, "trace")) log.trace.push_back({number_at(p, 0), number_at(p, 1), number_at(p, 2)});
    return log;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("run log: ") + e.what());
  }
}

const bridge::CodecRegistry& harness_codecs() {
  static const bridge::CodecRegistry registry = [] {
    auto r = bridge::CodecRegistry::with_builtins();
    r.register_codec(bridge::Codec::make<PlanSummary>(
        "plan_summary", [](const PlanSummary& p) { return to_json(p); }, plan_summary_from_json));
    return r;
  }();
  return registry;
}

// ---- nodes ----

StackConfig stack_config(const ScenarioConfig& cfg) {
  return {cfg.camera, cfg.cone_height, cfg.vehicle, cfg.controller, cfg.lane_width};
}

std::vector<TopicDeclaration> StackNode::declarations() {
  return {{topics::kImage, "image_meta", Direction::inbound},
          {topics::kState, "vehicle_state", Direction::inbound},
          {topics::kDetections, "detections", Direction::outbound},
          {topics::kPlan, "plan_summary", Direction::outbound},
          {topics::kInputs, "driver_inputs", Direction::outbound}};
}

std::vector<TopicDeclaration> plant_declarations() {
  return {{topics::kImage, "image_meta", Direction::outbound},
          {topics::kState, "vehicle_state", Direction::outbound},
          {topics::kDetections, "detections", Direction::inbound},
          {topics::kPlan, "plan_summary", Direction::inbound},
          {topics::kInputs, "driver_inputs", Direction::inbound}};
}

int StackNode::service(Endpoint& endpoint) {
  const auto& codecs = harness_codecs();
  int answered = 0;
  for (Envelope& env : endpoint.poll()) {
    if (env.topic == topics::kState) {
      latest_state_ = codecs.deserialize<VehicleState>(env.type_tag, env.payload);
      continue;
    }
    if (env.topic != topics::kImage) continue;
    const auto meta = codecs.deserialize<bridge::ImageMeta>(env.type_tag, env.payload);
    if (meta.encoding != "rgb8" || meta.width <= 0 || meta.height <= 0 ||
        env.attachment.size() != static_cast<std::size_t>(meta.width) * meta.height * 3) {
      throw bridge::CodecError("stack: image attachment does not match image_meta");
    }
    Image img;
    img.width = meta.width;
    img.height = meta.height;
    img.pixels = std::move(env.attachment);

    auto [dets, p] =
        perceive_and_plan(img, config_.camera, config_.cone_height, config_.controller.lookahead, config_.lane_width);
    const DriverInputs cmd = control(p, latest_state_, config_.vehicle, config_.controller);
    endpoint.publish(topics::kDetections, env.stamp, codecs.serialize(std::string("detections"), dets));
    endpoint.publish(topics::kPlan, env.stamp, codecs.serialize(std::string("plan_summary"), PlanSummary{p.target, p.valid}));
    endpoint.publish(topics::kInputs, env.stamp, codecs.serialize(std::string("driver_inputs"), cmd));
    ++answered;
  }
  return answered;
}

void StackNode::run(Endpoint& endpoint, std::chrono::milliseconds idle_timeout) {
  try {
    while (true) {
      if (!endpoint.wait(idle_timeout)) {
        endpoint.poll(1);  // throws once the plant has gone
        throw bridge::TransportError("stack: no traffic from plant within timeout");
      }
      service(endpoint);
    }
  } catch (const bridge::TransportClosed&) {
    spdlog::debug("stack: plant closed the connection");
  }
}

void serve_stack(const StackConfig& config, const std::string& host, std::uint16_t port,
                 std::chrono::milliseconds accept_timeout) {
  bridge::TcpListener listener(host, port);
  spdlog::info("stack: listening on {}:{}", host, listener.port());
  Endpoint endpoint(listener.accept(accept_timeout), StackNode::declarations());
  for (const auto& w : endpoint.handshake().warnings) spdlog::warn("stack handshake: {}", w);
  StackNode node(config);
  node.run(endpoint);
}

// ---- episode ----

namespace {

struct Round {
  std::vector<Detection> detections;
  PlanSummary plan;
  DriverInputs inputs;
};

/// Plant-side view of the link; owns the in-process stack or the TCP peer thread.
class Link {
 public:
  explicit Link(const ScenarioConfig& cfg) {
    const auto& t = cfg.transport;
    if (t.mode == TransportMode::in_process) {
      auto [plant_side, stack_side] = bridge::make_loopback_pair();
      plant_.emplace(std::move(plant_side), plant_declarations());
      stack_ep_.emplace(std::move(stack_side), StackNode::declarations());
      stack_.emplace(stack_config(cfg));
      plant_->send_handshake();
      stack_ep_->send_handshake();
      stack_ep_->receive_handshake();
    } else if (t.spawn_stack) {
      listener_.emplace(t.host, t.port);
      thread_ = std::thread([this, scfg = stack_config(cfg)] {
        try {
          Endpoint ep(listener_->accept(), StackNode::declarations());
          ep.handshake();
          StackNode(scfg).run(ep);
        } catch (...) {
          stack_error_ = std::current_exception();
        }
      });
      try {
        plant_.emplace(bridge::tcp_connect(t.host, listener_->port()), plant_declarations());
      } catch (...) {
        thread_.join();
        throw;
      }
      plant_->send_handshake();
    } else {
      plant_.emplace(bridge::tcp_connect(t.host, t.port), plant_declarations());
      plant_->send_handshake();
    }
    for (const auto& w : plant_->receive_handshake().warnings) spdlog::warn("plant handshake: {}", w);
  }

  ~Link() {
    if (plant_) plant_->close();
    if (thread_.joinable()) thread_.join();
  }

  Round exchange(const VehicleState& state, const Image& img, std::uint64_t frame) {
    const auto& codecs = harness_codecs();
    plant_->publish(topics::kState, state.time, codecs.serialize(std::string("vehicle_state"), state));
    plant_->publish(topics::kImage, state.time,
                    codecs.serialize(std::string("image_meta"), bridge::ImageMeta{img.width, img.height, "rgb8", frame}),
                    img.pixels);
    if (stack_) stack_->service(*stack_ep_);

    Round round;
    bool have_dets = false, have_plan = false;
    while (true) {
      if (!plant_->wait(kReplyTimeout)) {
        if (stack_error_) std::rethrow_exception(stack_error_);
        plant_->poll(1);
        throw bridge::TransportError("plant: no reply from stack within timeout");
      }
      for (const Envelope& env : plant_->poll()) {
        if (env.topic == topics::kDetections) {
          round.detections = codecs.deserialize<std::vector<Detection>>(env.type_tag, env.payload);
          have_dets = true;
        } else if (env.topic == topics::kPlan) {
          round.plan = codecs.deserialize<PlanSummary>(env.type_tag, env.payload);
          have_plan = true;
        } else if (env.topic == topics::kInputs) {
          if (!have_dets || !have_plan) throw bridge::TransportError("plant: driver inputs arrived before plan");
          round.inputs = codecs.deserialize<DriverInputs>(env.type_tag, env.payload);
          return round;
        }
      }
    }
  }

  void finish() {
    if (plant_) plant_->close();
    if (thread_.joinable()) thread_.join();
    if (stack_error_) std::rethrow_exception(stack_error_);
  }

 private:
  std::optional<Endpoint> plant_;
  std::optional<Endpoint> stack_ep_;
  std::optional<StackNode> stack_;
  std::optional<bridge::TcpListener> listener_;
  std::thread thread_;
  std::exception_ptr stack_error_;
};

void require_finite(const VehicleState& s) {
  for (double v : {s.x, s.y, s.heading, s.speed, s.steer_angle, s.time}) {
    if (!std::isfinite(v)) {
      throw SimulationError("episode: non-finite vehicle state at t=" + std::to_string(s.time));
    }
  }
}

}  // namespace

RunLog run_episode(const ScenarioConfig& cfg) {
  const Course course = scenario_course(cfg);
  const Centerline centerline(course);
  const VehicleParams plant = apply_scales(cfg.perturbation, cfg.vehicle);
  validate(plant);

  CameraModel true_camera = cfg.camera;
  true_camera.mount_forward += cfg.perturbation.mount_offset_error[0];
  true_camera.mount_up += cfg.perturbation.mount_offset_error[1];

  const double noise_scale = cfg.perturbation.sensor_noise_scale;
  const ImuNoise imu_noise{cfg.noise.imu_accel_sigma * noise_scale, cfg.noise.imu_gyro_sigma * noise_scale};
  const double mocap_sigma = cfg.noise.mocap_sigma * noise_scale;
  const CounterRng rng(cfg.seed);
  const CounterRng imu_keys = rng.fork(kImuStream), mocap_keys = rng.fork(kMocapStream);

  RunLog log;
  log.config = cfg.tree;
  log.config.erase("transport");
  log.seed = cfg.seed;
  log.dt_physics = cfg.dt_physics;
  log.dt_autonomy = cfg.dt_autonomy;
  log.course_text = format_course(course);
  log.course_hash = course_hash(course);

  VehicleState state;
  state.x = course.start_pose.x;
  state.y = course.start_pose.y;
  state.heading = wrap_angle(course.start_pose.heading);
  VehicleState prev = state;
  prev.time = state.time - cfg.dt_physics;

  std::deque<DriverInputs> pending(static_cast<std::size_t>(cfg.perturbation.actuation_delay_steps), DriverInputs{});
  const int n_ticks = cfg.tick_count();
  const int steps = cfg.steps_per_tick();
  if (cfg.record_trace) log.trace.reserve(static_cast<std::size_t>(n_ticks) * steps);

  Link link(cfg);
  for (int k = 0; k < n_ticks; ++k) {
    const Pose2 pose{state.x, state.y, state.heading};
    const Image img = render_image(course, pose, true_camera);
    Round round = link.exchange(state, img, static_cast<std::uint64_t>(k));

    TickRecord rec;
    rec.time = state.time;
    rec.state = state;
    rec.inputs = round.inputs;
    rec.detections = std::move(round.detections);
    rec.plan = round.plan;
    rec.imu = imu_sample(prev, state, imu_noise, imu_keys.bits(static_cast<std::uint64_t>(k)));
    rec.mocap = mocap_pose(state, mocap_sigma, mocap_keys.bits(static_cast<std::uint64_t>(k)));
    log.ticks.push_back(std::move(rec));

    pending.push_back(round.inputs);
    const DriverInputs applied = pending.front();
    pending.pop_front();

    bool hit = false;
    for (int s = 0; s < steps; ++s) {
      prev = state;
      state = step(state, applied, cfg.dt_physics, plant);
      require_finite(state);
      const Pose2 p{state.x, state.y, state.heading};
      if (cfg.record_trace) log.trace.push_back(p);
      if (!hit && !check_collisions(course, p, cfg.footprint).empty()) hit = true;
    }

    const Pose2 end_pose{state.x, state.y, state.heading};
    if (hit && cfg.safety_stop) {
      spdlog::info("episode: cone contact, safety stop at t={:.3f}", state.time);
      log.termination = Termination::safety_stop;
      break;
    }
    if (passed_last_pair(course, centerline, end_pose, cfg.camera)) {
      log.termination = Termination::completed;
      break;
    }
  }
  log.final_state = state;
  link.finish();
  return log;
}

}  // namespace twinlane::harness
