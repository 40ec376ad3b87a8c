#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "twinlane/bridge/frame.hpp"

namespace fuzz {

using twinlane::bridge::Bytes;
using twinlane::bridge::Envelope;
using twinlane::bridge::Json;

// Random UTF-8 text mixing ASCII, escapes and multi-byte code points.
inline std::string random_text(std::mt19937_64& g, int max_len) {
  static const char* pieces[] = {"a", "Z", "0", " ", "\"", "\\", "\n", "\t", "/", "\xc3\xa9",
                                 "\xe2\x82\xac", "\xf0\x9f\x9a\x97", "\x01", "{", "}", ":"};
  std::uniform_int_distribution<int> len(0, max_len), pick(0, 15);
  std::string s;
  for (int n = len(g); n > 0; --n) s += pieces[pick(g)];
  return s;
}

inline std::string random_topic(std::mt19937_64& g) {
  static const char alphabet[] = "abcdefghijklmnopqrstuvwxyz/_-.@0123456789";
  std::uniform_int_distribution<int> len(1, 24), pick(0, sizeof alphabet - 2);
  std::string s;
  for (int n = len(g); n > 0; --n) s += alphabet[pick(g)];
  return s;
}

inline double random_double(std::mt19937_64& g) {
  std::uniform_int_distribution<int> kind(0, 4);
  switch (kind(g)) {
    case 0: return std::uniform_real_distribution<double>(-1e3, 1e3)(g);
    case 1: return std::ldexp(std::uniform_real_distribution<double>(-1, 1)(g), std::uniform_int_distribution<int>(-1000, 1000)(g));
    case 2: return static_cast<double>(std::uniform_int_distribution<int>(-100000, 100000)(g));
    case 3: return 0.1 * std::uniform_int_distribution<int>(-50, 50)(g);
    default: return -0.0;
  }
}

inline Json random_json(std::mt19937_64& g, int depth) {
  std::uniform_int_distribution<int> kind(0, depth > 0 ? 7 : 5);
  switch (kind(g)) {
    case 0: return nullptr;
    case 1: return std::bernoulli_distribution(0.5)(g);
    case 2: return std::uniform_int_distribution<std::int64_t>(INT64_MIN, INT64_MAX)(g);
    case 3: return std::uniform_int_distribution<std::uint64_t>(0, UINT64_MAX)(g);
    case 4: return random_double(g);
    case 5: return random_text(g, 12);
    case 6: {
      Json arr = Json::array();
      for (int n = std::uniform_int_distribution<int>(0, 4)(g); n > 0; --n) arr.push_back(random_json(g, depth - 1));
      return arr;
    }
    default: {
      Json obj = Json::object();
      for (int n = std::uniform_int_distribution<int>(0, 4)(g); n > 0; --n) obj[random_text(g, 6)] = random_json(g, depth - 1);
      return obj;
    }
  }
}

inline Envelope random_envelope(std::mt19937_64& g) {
  Envelope env;
  env.topic = random_topic(g);
  env.type_tag = random_text(g, 10);
  env.seq = std::uniform_int_distribution<std::uint64_t>(0, UINT64_MAX)(g);
  env.stamp = random_double(g);
  env.payload = random_json(g, 3);
  if (std::bernoulli_distribution(0.2)(g)) {
    env.attachment.resize(std::uniform_int_distribution<std::size_t>(1, 300)(g));
    for (auto& b : env.attachment) b = static_cast<std::uint8_t>(g());
  }
  return env;
}

}  // namespace fuzz
