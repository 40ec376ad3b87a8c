#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>

#include "twinlane/bridge/frame.hpp"

namespace twinlane::bridge {

class TransportError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "bridge"; }
};

/// Raised on write to, or drained read from, a connection the peer closed.
class TransportClosed : public TransportError {
 public:
  using TransportError::TransportError;
};

/// Reliable ordered byte stream.
class Transport {
 public:
  virtual ~Transport() = default;

  /// Writes every byte or throws TransportClosed / TransportError.
  virtual void write(std::span<const std::uint8_t> bytes) = 0;
  /// Appends whatever is available to `out` without blocking.
  virtual std::size_t read_available(Bytes& out) = 0;
  /// Blocks until bytes are readable or the peer closed; false on timeout.
  virtual bool wait_readable(std::chrono::milliseconds timeout) = 0;
  /// True once the peer has closed and no unread bytes remain.
  virtual bool peer_closed() const = 0;
  virtual void close() = 0;
};

/// In-memory connected pair. Each read returns at most `chunk_size` bytes
/// (0 = unlimited) so tests can exercise arbitrary stream splits.
std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> make_loopback_pair(std::size_t chunk_size = 0);

/// Plain TCP stream.
std::unique_ptr<Transport> tcp_connect(const std::string& host, std::uint16_t port,
                                       std::chrono::milliseconds timeout = std::chrono::seconds(5));

class TcpListener {
 public:
  /// Port 0 binds an ephemeral port; see port().
  TcpListener(const std::string& host, std::uint16_t port);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  std::uint16_t port() const { return port_; }
  /// Accepts one connection; throws TransportError on timeout.
  std::unique_ptr<Transport> accept(std::chrono::milliseconds timeout = std::chrono::seconds(10));

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

}  // namespace twinlane::bridge
