#include "twinlane/bridge/frame.hpp"

#include <cmath>
#include <limits>

namespace twinlane::bridge {
namespace {

void put_u32(Bytes& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b) {
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) | b[3];
}

bool all_finite(const Json& j) {
  switch (j.type()) {
    case Json::value_t::number_float:
      return std::isfinite(j.get<double>());
    case Json::value_t::object:
    case Json::value_t::array:
      for (const auto& item : j) {
        if (!all_finite(item)) return false;
      }
      return true;
    default:
      return true;
  }
}

// Integral stamps are written as JSON integers; -0.0 keeps its float form.
Json stamp_value(double stamp) {
  constexpr double kExactIntLimit = 9007199254740992.0;  // 2^53
  if (stamp == std::trunc(stamp) && std::abs(stamp) < kExactIntLimit && !(stamp == 0.0 && std::signbit(stamp))) {
    return static_cast<std::int64_t>(stamp);
  }
  return stamp;
}

const Json& require_field(const Json& body, const char* name) {
  const auto it = body.find(name);
  if (it == body.end()) throw FrameError(FrameErrorKind::missing_field, std::string("missing field '") + name + "'");
  return *it;
}

}  // namespace

std::string_view to_string(FrameErrorKind kind) {
  switch (kind) {
    case FrameErrorKind::invalid_topic: return "invalid_topic";
    case FrameErrorKind::unrepresentable_payload: return "unrepresentable_payload";
    case FrameErrorKind::frame_too_large: return "frame_too_large";
    case FrameErrorKind::invalid_utf8: return "invalid_utf8";
    case FrameErrorKind::invalid_json: return "invalid_json";
    case FrameErrorKind::missing_field: return "missing_field";
    case FrameErrorKind::bad_field_type: return "bad_field_type";
  }
  return "unknown";
}

bool valid_topic(std::string_view topic) {
  if (topic.empty()) return false;
  for (unsigned char c : topic) {
    if (c <= 0x20 || c == 0x7f) return false;
  }
  return true;
}

bool valid_utf8(std::span<const std::uint8_t> s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const std::uint8_t c = s[i];
    if (c < 0x80) {
      ++i;
      continue;
    }
    std::size_t len;
    std::uint32_t cp;
    if ((c & 0xe0) == 0xc0) {
      len = 2;
      cp = c & 0x1f;
    } else if ((c & 0xf0) == 0xe0) {
      len = 3;
      cp = c & 0x0f;
    } else if ((c & 0xf8) == 0xf0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > s.size()) return false;
    for (std::size_t k = 1; k < len; ++k) {
      if ((s[i + k] & 0xc0) != 0x80) return false;
      cp = (cp << 6) | (s[i + k] & 0x3f);
    }
    constexpr std::uint32_t kMinForLength[] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMinForLength[len] || cp > 0x10ffff || (cp >= 0xd800 && cp <= 0xdfff)) return false;
    i += len;
  }
  return true;
}

std::string canonical_body(const Envelope& env) {
  if (!valid_topic(env.topic)) {
    throw FrameError(FrameErrorKind::invalid_topic, "topic '" + env.topic + "' is empty or contains whitespace");
  }
  if (!all_finite(env.payload) || !std::isfinite(env.stamp)) {
    throw FrameError(FrameErrorKind::unrepresentable_payload, "non-finite number on topic '" + env.topic + "'");
  }
  Json body = Json::object();
  body["topic"] = env.topic;
  body["type"] = env.type_tag;
  body["seq"] = env.seq;
  body["stamp"] = stamp_value(env.stamp);
  body["data"] = env.payload;
  if (!env.attachment.empty()) body["attachment"] = env.attachment.size();
  try {
    return body.dump();
  } catch (const nlohmann::json::exception& e) {
    throw FrameError(FrameErrorKind::unrepresentable_payload, e.what());
  }
}

void append_frame(Bytes& out, const Envelope& env) {
  const std::string body = canonical_body(env);
  if (body.size() > std::numeric_limits<std::uint32_t>::max() ||
      env.attachment.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw FrameError(FrameErrorKind::frame_too_large, "frame exceeds 4 GiB");
  }
  out.reserve(out.size() + 2 * kPrefixBytes + body.size() + env.attachment.size());
  put_u32(out, static_cast<std::uint32_t>(body.size()));
  out.insert(out.end(), body.begin(), body.end());
  if (!env.attachment.empty()) {
    put_u32(out, static_cast<std::uint32_t>(env.attachment.size()));
    out.insert(out.end(), env.attachment.begin(), env.attachment.end());
  }
}

Bytes encode_frame(const Envelope& env) {
  Bytes out;
  append_frame(out, env);
  return out;
}

std::optional<Decoded> decode_frame(std::span<const std::uint8_t> buf, std::size_t max_frame_size) {
  if (buf.size() < kPrefixBytes) return std::nullopt;
  const std::size_t body_len = get_u32(buf);
  if (body_len > max_frame_size) {
    throw FrameError(FrameErrorKind::frame_too_large,
                     "prefix claims " + std::to_string(body_len) + " bytes, limit " + std::to_string(max_frame_size));
  }
  if (buf.size() < kPrefixBytes + body_len) return std::nullopt;
  const auto body = buf.subspan(kPrefixBytes, body_len);
  if (!valid_utf8(body)) throw FrameError(FrameErrorKind::invalid_utf8, "frame body is not valid UTF-8");

  Json j = Json::parse(body.begin(), body.end(), nullptr, false);
  if (j.is_discarded()) throw FrameError(FrameErrorKind::invalid_json, "frame body is not valid JSON");
  if (!j.is_object()) throw FrameError(FrameErrorKind::bad_field_type, "frame body is not a JSON object");

  Envelope env;
  const Json& topic = require_field(j, "topic");
  const Json& type = require_field(j, "type");
  const Json& seq = require_field(j, "seq");
  const Json& stamp = require_field(j, "stamp");
  const Json& data = require_field(j, "data");
  if (!topic.is_string() || !type.is_string()) {
    throw FrameError(FrameErrorKind::bad_field_type, "topic and type must be strings");
  }
  if (!seq.is_number_unsigned()) throw FrameError(FrameErrorKind::bad_field_type, "seq must be an unsigned integer");
  if (!stamp.is_number()) throw FrameError(FrameErrorKind::bad_field_type, "stamp must be a number");
  env.topic = topic.get<std::string>();
  if (!valid_topic(env.topic)) throw FrameError(FrameErrorKind::invalid_topic, "topic '" + env.topic + "' is invalid");
  env.type_tag = type.get<std::string>();
  env.seq = seq.get<std::uint64_t>();
  env.stamp = stamp.get<double>();
  env.payload = data;

  std::size_t consumed = kPrefixBytes + body_len;
  if (const auto it = j.find("attachment"); it != j.end()) {
    if (!it->is_number_unsigned()) throw FrameError(FrameErrorKind::bad_field_type, "attachment must be a length");
    const std::size_t att_len = it->get<std::size_t>();
    if (att_len > max_frame_size) throw FrameError(FrameErrorKind::frame_too_large, "attachment exceeds frame limit");
    if (buf.size() < consumed + kPrefixBytes) return std::nullopt;
    if (get_u32(buf.subspan(consumed)) != att_len) {
      throw FrameError(FrameErrorKind::bad_field_type, "attachment prefix does not match declared length");
    }
    if (buf.size() < consumed + kPrefixBytes + att_len) return std::nullopt;
    const auto att = buf.subspan(consumed + kPrefixBytes, att_len);
    env.attachment.assign(att.begin(), att.end());
    consumed += kPrefixBytes + att_len;
  }
  return Decoded{std::move(env), buf.subspan(consumed)};
}

void FrameReader::feed(std::span<const std::uint8_t> chunk) {
  if (head_ > 0 && head_ >= buffer_.size() / 2) {
    buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(head_));
    head_ = 0;
  }
  buffer_.insert(buffer_.end(), chunk.begin(), chunk.end());
}

std::optional<Envelope> FrameReader::next() {
  const std::span<const std::uint8_t> pending(buffer_.data() + head_, buffer_.size() - head_);
  auto decoded = decode_frame(pending, max_frame_size_);
  if (!decoded) return std::nullopt;
  head_ += pending.size() - decoded->remaining.size();
  return std::move(decoded->envelope);
}

}  // namespace twinlane::bridge
