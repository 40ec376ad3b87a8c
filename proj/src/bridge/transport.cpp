#include "twinlane/bridge/transport.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>

namespace twinlane::bridge {
namespace {

// ---- loopback ----

struct Channel {
  std::deque<std::uint8_t> bytes;
  bool writer_closed = false;
};

struct SharedPipe {
  std::mutex mutex;
  std::condition_variable ready;
  Channel channels[2];  // channels[i] is read by side i
};

class LoopbackTransport final : public Transport {
 public:
  LoopbackTransport(std::shared_ptr<SharedPipe> pipe, int side, std::size_t chunk)
      : pipe_(std::move(pipe)), side_(side), chunk_(chunk) {}
  ~LoopbackTransport() override { close(); }

  void write(std::span<const std::uint8_t> bytes) override {
    std::lock_guard lock(pipe_->mutex);
    if (closed_) throw TransportClosed("loopback: write on closed endpoint");
    Channel& out = pipe_->channels[1 - side_];
    if (pipe_->channels[side_].writer_closed) throw TransportClosed("loopback: peer closed");
    out.bytes.insert(out.bytes.end(), bytes.begin(), bytes.end());
    pipe_->ready.notify_all();
  }

  std::size_t read_available(Bytes& out) override {
    std::lock_guard lock(pipe_->mutex);
    Channel& in = pipe_->channels[side_];
    std::size_t n = in.bytes.size();
    if (chunk_ > 0) n = std::min(n, chunk_);
    out.insert(out.end(), in.bytes.begin(), in.bytes.begin() + static_cast<std::ptrdiff_t>(n));
    in.bytes.erase(in.bytes.begin(), in.bytes.begin() + static_cast<std::ptrdiff_t>(n));
    return n;
  }

  bool wait_readable(std::chrono::milliseconds timeout) override {
    std::unique_lock lock(pipe_->mutex);
    const Channel& in = pipe_->channels[side_];
    return pipe_->ready.wait_for(lock, timeout, [&] { return !in.bytes.empty() || in.writer_closed; });
  }

  bool peer_closed() const override {
    std::lock_guard lock(pipe_->mutex);
    const Channel& in = pipe_->channels[side_];
    return in.writer_closed && in.bytes.empty();
  }

  void close() override {
    std::lock_guard lock(pipe_->mutex);
    if (closed_) return;
    closed_ = true;
    pipe_->channels[1 - side_].writer_closed = true;
    pipe_->ready.notify_all();
  }

 private:
  std::shared_ptr<SharedPipe> pipe_;
  int side_;
  std::size_t chunk_;
  bool closed_ = false;
};

// ---- tcp ----

std::string errno_text(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

class TcpTransport final : public Transport {
 public:
  explicit TcpTransport(int fd) : fd_(fd) {
    const int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  }
  ~TcpTransport() override { close(); }

  void write(std::span<const std::uint8_t> bytes) override {
    if (fd_ < 0) throw TransportClosed("tcp: write on closed socket");
    std::size_t sent = 0;
    while (sent < bytes.size()) {
      const ssize_t n = ::send(fd_, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        if (errno == EAGAIN || errno == EWOULDBLOCK) {
          pollfd p{fd_, POLLOUT, 0};
          ::poll(&p, 1, 1000);
          continue;
        }
        if (errno == EPIPE || errno == ECONNRESET) throw TransportClosed(errno_text("tcp: peer closed"));
        throw TransportError(errno_text("tcp: send"));
      }
      sent += static_cast<std::size_t>(n);
    }
  }

  std::size_t read_available(Bytes& out) override {
    if (fd_ < 0) return 0;
    std::size_t total = 0;
    std::uint8_t buf[65536];
    while (true) {
      const ssize_t n = ::recv(fd_, buf, sizeof buf, MSG_DONTWAIT);
      if (n > 0) {
        out.insert(out.end(), buf, buf + n);
        total += static_cast<std::size_t>(n);
        continue;
      }
      if (n == 0) {
        eof_ = true;
        break;
      }
      if (errno == EINTR) continue;
      if (errno == EAGAIN || errno == EWOULDBLOCK) break;
      if (errno == ECONNRESET) {
        eof_ = true;
        break;
      }
      throw TransportError(errno_text("tcp: recv"));
    }
    return total;
  }

  bool wait_readable(std::chrono::milliseconds timeout) override {
    if (fd_ < 0 || eof_) return true;
    pollfd p{fd_, POLLIN, 0};
    int rc;
    do {
      rc = ::poll(&p, 1, static_cast<int>(timeout.count()));
    } while (rc < 0 && errno == EINTR);
    if (rc < 0) throw TransportError(errno_text("tcp: poll"));
    return rc > 0;
  }

  bool peer_closed() const override { return eof_; }

  void close() override {
    if (fd_ >= 0) {
      ::shutdown(fd_, SHUT_RDWR);
      ::close(fd_);
      fd_ = -1;
    }
  }

 private:
  int fd_;
  bool eof_ = false;
};

sockaddr_in resolve(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (const int rc = ::getaddrinfo(host.c_str(), nullptr, &hints, &res); rc != 0 || res == nullptr) {
    throw TransportError("tcp: cannot resolve host '" + host + "': " + ::gai_strerror(rc));
  }
  sockaddr_in addr = *reinterpret_cast<sockaddr_in*>(res->ai_addr);
  ::freeaddrinfo(res);
  addr.sin_port = htons(port);
  return addr;
}

}  // namespace

std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> make_loopback_pair(std::size_t chunk_size) {
  auto pipe = std::make_shared<SharedPipe>();
  return {std::make_unique<LoopbackTransport>(pipe, 0, chunk_size),
          std::make_unique<LoopbackTransport>(pipe, 1, chunk_size)};
}

std::unique_ptr<Transport> tcp_connect(const std::string& host, std::uint16_t port,
                                       std::chrono::milliseconds timeout) {
  const sockaddr_in addr = resolve(host, port);
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (true) {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw TransportError(errno_text("tcp: socket"));
    if (::connect(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) == 0) {
      return std::make_unique<TcpTransport>(fd);
    }
    const int err = errno;
    ::close(fd);
    if (err != ECONNREFUSED || std::chrono::steady_clock::now() >= deadline) {
      errno = err;
      throw TransportError(errno_text(("tcp: connect to " + host + ":" + std::to_string(port)).c_str()));
    }
    ::usleep(20000);
  }
}

TcpListener::TcpListener(const std::string& host, std::uint16_t port) {
  const sockaddr_in addr = resolve(host, port);
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw TransportError(errno_text("tcp: socket"));
  const int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  if (::bind(fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0 || ::listen(fd_, 1) != 0) {
    const std::string msg = errno_text(("tcp: bind " + host + ":" + std::to_string(port)).c_str());
    ::close(fd_);
    throw TransportError(msg);
  }
  sockaddr_in bound{};
  socklen_t len = sizeof bound;
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &len);
  port_ = ntohs(bound.sin_port);
}

TcpListener::~TcpListener() {
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<Transport> TcpListener::accept(std::chrono::milliseconds timeout) {
  pollfd p{fd_, POLLIN, 0};
  int rc;
  do {
    rc = ::poll(&p, 1, static_cast<int>(timeout.count()));
  } while (rc < 0 && errno == EINTR);
  if (rc <= 0) throw TransportError("tcp: no connection accepted within timeout");
  const int fd = ::accept(fd_, nullptr, nullptr);
  if (fd < 0) throw TransportError(errno_text("tcp: accept"));
  return std::make_unique<TcpTransport>(fd);
}

}  // namespace twinlane::bridge
