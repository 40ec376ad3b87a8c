#include "twinlane/bridge/endpoint.hpp"

#include <utility>

namespace twinlane::bridge {
namespace {

using TopicTypes = std::map<std::string, std::string>;

void split_by_direction(std::span<const TopicDeclaration> decls, TopicTypes& out, TopicTypes& in,
                        const char* side) {
  for (const auto& d : decls) {
    TopicTypes& target = d.direction == Direction::outbound ? out : in;
    if (!target.emplace(d.topic, d.type_tag).second) {
      throw HandshakeError(std::string(side) + " declares topic '" + d.topic + "' twice in one direction");
    }
  }
}

void pair_topics(const TopicTypes& local, const TopicTypes& remote, std::set<std::string>& paired,
                 std::vector<std::string>& warnings, const char* what) {
  for (const auto& [topic, type] : local) {
    const auto it = remote.find(topic);
    if (it == remote.end()) {
      warnings.push_back("topic '" + topic + "' unmatched: " + what);
      continue;
    }
    if (it->second != type) {
      throw HandshakeError("type conflict on topic '" + topic + "': local '" + type + "', remote '" + it->second +
                           "'");
    }
    paired.insert(topic);
  }
}

}  // namespace

Negotiation negotiate(std::span<const TopicDeclaration> mine, std::span<const TopicDeclaration> theirs) {
  TopicTypes mine_out, mine_in, their_out, their_in;
  split_by_direction(mine, mine_out, mine_in, "local endpoint");
  split_by_direction(theirs, their_out, their_in, "remote endpoint");
  Negotiation n;
  pair_topics(mine_out, their_in, n.outbound, n.warnings, "no remote subscriber");
  pair_topics(mine_in, their_out, n.inbound, n.warnings, "no remote publisher");
  return n;
}

Json declarations_to_json(std::span<const TopicDeclaration> decls) {
  Json arr = Json::array();
  for (const auto& d : decls) {
    arr.push_back({{"topic", d.topic},
                   {"type", d.type_tag},
                   {"direction", d.direction == Direction::outbound ? "outbound" : "inbound"}});
  }
  return arr;
}

std::vector<TopicDeclaration> declarations_from_json(const Json& j) {
  if (!j.is_array()) throw HandshakeError("handshake: topics must be an array");
  std::vector<TopicDeclaration> out;
  for (const auto& item : j) {
    if (!item.is_object() || !item.contains("topic") || !item.contains("type") || !item.contains("direction")) {
      throw HandshakeError("handshake: malformed topic declaration");
    }
    const auto dir = item["direction"].get<std::string>();
    if (dir != "outbound" && dir != "inbound") throw HandshakeError("handshake: bad direction '" + dir + "'");
    out.push_back({item["topic"].get<std::string>(), item["type"].get<std::string>(),
                   dir == "outbound" ? Direction::outbound : Direction::inbound});
  }
  return out;
}

Endpoint::Endpoint(std::unique_ptr<Transport> transport, std::vector<TopicDeclaration> declarations,
                   std::size_t max_frame_size)
    : transport_(std::move(transport)), declarations_(std::move(declarations)), reader_(max_frame_size) {
  for (const auto& d : declarations_) {
    if (!valid_topic(d.topic) || d.topic == kHandshakeTopic) {
      throw InvalidArgument("bridge: invalid topic name '" + d.topic + "'");
    }
  }
  split_by_direction(declarations_, outbound_types_, inbound_types_, "local endpoint");
}

void Endpoint::send_handshake() {
  Envelope env;
  env.topic = std::string(kHandshakeTopic);
  env.type_tag = std::string(kHandshakeType);
  env.payload = Json{{"topics", declarations_to_json(declarations_)}};
  transport_->write(encode_frame(env));
}

const Negotiation& Endpoint::receive_handshake(std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (true) {
    pump();
    if (auto env = reader_.next()) {
      if (env->topic != kHandshakeTopic || env->type_tag != kHandshakeType) {
        throw HandshakeError("first frame on connection is '" + env->topic + "', not a handshake");
      }
      if (!env->payload.is_object() || !env->payload.contains("topics")) {
        throw HandshakeError("handshake: missing topic list");
      }
      const auto theirs = declarations_from_json(env->payload["topics"]);
      negotiation_ = negotiate(declarations_, theirs);
      return *negotiation_;
    }
    if (transport_->peer_closed()) throw TransportClosed("peer closed before handshake");
    const auto now = std::chrono::steady_clock::now();
    if (now >= deadline) throw HandshakeError("handshake timed out");
    transport_->wait_readable(std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now) +
                              std::chrono::milliseconds(1));
  }
}

void Endpoint::publish(const std::string& topic, double stamp, Json payload, Bytes attachment) {
  const auto it = outbound_types_.find(topic);
  if (it == outbound_types_.end()) throw UndeclaredTopic("publish on undeclared topic '" + topic + "'");
  if (!negotiation_) throw HandshakeError("publish before handshake");
  if (!negotiation_->outbound.contains(topic)) {
    ++unmatched_sends_;
    return;
  }
  Envelope env;
  env.topic = topic;
  env.type_tag = it->second;
  env.seq = next_seq_[topic];
  env.stamp = stamp;
  env.payload = std::move(payload);
  env.attachment = std::move(attachment);
  scratch_.clear();
  append_frame(scratch_, env);
  transport_->write(scratch_);
  ++next_seq_[topic];
}

void Endpoint::pump() {
  scratch_.clear();
  while (transport_->read_available(scratch_) > 0) {
    reader_.feed(scratch_);
    scratch_.clear();
  }
}

std::optional<Envelope> Endpoint::next_deliverable() {
  while (auto env = reader_.next()) {
    const auto it = inbound_types_.find(env->topic);
    if (it == inbound_types_.end() || it->second != env->type_tag) {
      ++dropped_;
      continue;
    }
    return env;
  }
  return std::nullopt;
}

std::vector<Envelope> Endpoint::poll(std::size_t budget) {
  if (budget == 0) throw InvalidArgument("poll: budget must be >= 1");
  std::vector<Envelope> out;
  if (pending_) {
    out.push_back(std::move(*pending_));
    pending_.reset();
  }
  pump();
  while (out.size() < budget) {
    auto env = next_deliverable();
    if (!env) break;
    out.push_back(std::move(*env));
  }
  if (out.empty() && transport_->peer_closed()) throw TransportClosed("peer closed the connection");
  return out;
}

bool Endpoint::wait(std::chrono::milliseconds timeout) {
  if (pending_) return true;
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (true) {
    pump();
    pending_ = next_deliverable();
    if (pending_) return true;
    if (transport_->peer_closed()) return false;
    const auto now = std::chrono::steady_clock::now();
    if (now >= deadline) return false;
    transport_->wait_readable(std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now) +
                              std::chrono::milliseconds(1));
  }
}

}  // namespace twinlane::bridge
