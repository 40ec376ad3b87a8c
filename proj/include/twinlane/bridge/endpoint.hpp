#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "twinlane/bridge/frame.hpp"
#include "twinlane/bridge/transport.hpp"

namespace twinlane::bridge {

enum class Direction { outbound, inbound };

struct TopicDeclaration {
  std::string topic;
  std::string type_tag;
  Direction direction = Direction::outbound;

  bool operator==(const TopicDeclaration&) const = default;
};

inline constexpr std::string_view kHandshakeTopic = "@handshake";
inline constexpr std::string_view kHandshakeType = "handshake";

class HandshakeError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "bridge"; }
};

/// Publishing on a topic this endpoint never declared outbound.
class UndeclaredTopic : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "bridge"; }
};

/// Pairs local outbound topics with remote inbound ones and vice versa.
struct Negotiation {
  std::set<std::string> outbound;  // we publish, they subscribe
  std::set<std::string> inbound;   // they publish, we subscribe
  std::vector<std::string> warnings;
};

/// Throws HandshakeError on duplicate (topic, direction) or when both sides
/// use one topic with different type tags. Unmatched topics only warn.
Negotiation negotiate(std::span<const TopicDeclaration> mine, std::span<const TopicDeclaration> theirs);

Json declarations_to_json(std::span<const TopicDeclaration> decls);
std::vector<TopicDeclaration> declarations_from_json(const Json& j);

/// One side of a bridge connection. Owned by one execution context at a time.
class Endpoint {
 public:
  Endpoint(std::unique_ptr<Transport> transport, std::vector<TopicDeclaration> declarations,
           std::size_t max_frame_size = kDefaultMaxFrameSize);

  /// Sends the local declaration list as the first frame.
  void send_handshake();
  /// Waits for the peer's declaration list and negotiates topics.
  const Negotiation& receive_handshake(std::chrono::milliseconds timeout = std::chrono::seconds(10));
  const Negotiation& handshake(std::chrono::milliseconds timeout = std::chrono::seconds(10)) {
    send_handshake();
    return receive_handshake(timeout);
  }
  const std::optional<Negotiation>& negotiation() const { return negotiation_; }

  /// Assigns the topic's next seq and writes one frame. Declared topics the
  /// peer did not subscribe to are counted in unmatched_sends() and skipped.
  void publish(const std::string& topic, double stamp, Json payload, Bytes attachment = {});

  /// Up to `budget` complete messages already received, without blocking.
  /// Messages on topics not declared inbound are dropped and counted.
  std::vector<Envelope> poll(std::size_t budget = SIZE_MAX);

  /// Blocks until at least one deliverable message is buffered or `timeout`
  /// elapses; returns false on timeout.
  bool wait(std::chrono::milliseconds timeout);

  std::size_t dropped() const { return dropped_; }
  std::size_t unmatched_sends() const { return unmatched_sends_; }
  void close() { transport_->close(); }

 private:
  void pump();
  std::optional<Envelope> next_deliverable();

  std::unique_ptr<Transport> transport_;
  std::vector<TopicDeclaration> declarations_;
  std::map<std::string, std::string> outbound_types_;
  std::map<std::string, std::string> inbound_types_;
  std::map<std::string, std::uint64_t> next_seq_;
  std::optional<Negotiation> negotiation_;
  FrameReader reader_;
  std::optional<Envelope> pending_;
  std::size_t dropped_ = 0;
  std::size_t unmatched_sends_ = 0;
  Bytes scratch_;
};

}  // namespace twinlane::bridge
