#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "twinlane/errors.hpp"

namespace twinlane::bridge {

/// Insertion-ordered JSON so payload key order survives a round trip.
using Json = nlohmann::ordered_json;
using Bytes = std::vector<std::uint8_t>;

/// One message on a topic. A non-empty `attachment` travels as a raw frame
/// directly after the JSON frame; the JSON body then carries its length.
struct Envelope {
  std::string topic;
  std::string type_tag;
  std::uint64_t seq = 0;
  double stamp = 0.0;
  Json payload = Json::object();
  Bytes attachment;

  bool operator==(const Envelope&) const = default;
};

inline constexpr std::size_t kPrefixBytes = 4;
inline constexpr std::size_t kDefaultMaxFrameSize = std::size_t{16} << 20;

enum class FrameErrorKind {
  invalid_topic,
  unrepresentable_payload,
  frame_too_large,
  invalid_utf8,
  invalid_json,
  missing_field,
  bad_field_type,
};

std::string_view to_string(FrameErrorKind kind);

class FrameError : public Error {
 public:
  FrameError(FrameErrorKind kind, const std::string& what)
      : Error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  FrameErrorKind kind() const noexcept { return kind_; }
  const char* category() const noexcept override { return "bridge"; }

 private:
  FrameErrorKind kind_;
};

/// Non-empty and free of whitespace and control characters.
bool valid_topic(std::string_view topic);

/// True when `bytes` is well-formed UTF-8 (no overlongs or surrogates).
bool valid_utf8(std::span<const std::uint8_t> bytes);

/// Canonical body: {"topic","type","seq","stamp","data"} in that order with
/// no insignificant whitespace, plus a trailing "attachment" length when set.
std::string canonical_body(const Envelope& env);

/// 4-byte big-endian body length, then the body; then the attachment frame.
Bytes encode_frame(const Envelope& env);
void append_frame(Bytes& out, const Envelope& env);

struct Decoded {
  Envelope envelope;
  std::span<const std::uint8_t> remaining;
};

/// Consumes exactly one message from the front of `buf`. Returns nullopt when
/// more bytes are needed; nothing is consumed in that case.
std::optional<Decoded> decode_frame(std::span<const std::uint8_t> buf,
                                    std::size_t max_frame_size = kDefaultMaxFrameSize);

/// Incremental decoder over an arbitrarily chunked byte stream.
class FrameReader {
 public:
  explicit FrameReader(std::size_t max_frame_size = kDefaultMaxFrameSize) : max_frame_size_(max_frame_size) {}

  void feed(std::span<const std::uint8_t> chunk);
  std::optional<Envelope> next();
  std::size_t buffered() const { return buffer_.size() - head_; }

 private:
  std::size_t max_frame_size_;
  Bytes buffer_;
  std::size_t head_ = 0;
};

}  // namespace twinlane::bridge
