#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

#include "framegate/protocol.hpp"

namespace framegate {

inline constexpr std::chrono::milliseconds default_timeout{30000};

/// Blocking, framed byte stream over a pair of file descriptors (a socket
/// uses the same descriptor twice). Reads wait at most `timeout`.
class FdTransport {
  public:
    FdTransport(int read_fd, int write_fd, bool owns, std::chrono::milliseconds timeout = default_timeout);
    ~FdTransport();
    FdTransport(FdTransport&& other) noexcept;
    FdTransport& operator=(FdTransport&& other) noexcept;
    FdTransport(const FdTransport&) = delete;
    FdTransport& operator=(const FdTransport&) = delete;

    /// stdin/stdout of this process.
    static FdTransport stdio(std::chrono::milliseconds timeout = default_timeout);
    /// Connects to "host:port" (IPv4 or a resolvable name).
    static FdTransport connect(const std::string& address, std::chrono::milliseconds timeout = default_timeout);

    void send(std::string_view payload);
    /// Timeout when nothing arrives in time; PeerAbort on end of stream.
    std::string receive();
    void close() noexcept;

  private:
    void read_more();

    int read_fd_ = -1;
    int write_fd_ = -1;
    bool owns_ = false;
    std::chrono::milliseconds timeout_;
    std::string buffer_;
};

/// Listening TCP socket; port 0 picks a free port.
class TcpListener {
  public:
    explicit TcpListener(const std::string& address);
    ~TcpListener();
    TcpListener(const TcpListener&) = delete;
    TcpListener& operator=(const TcpListener&) = delete;

    [[nodiscard]] std::uint16_t port() const noexcept { return port_; }
    FdTransport accept(std::chrono::milliseconds timeout = default_timeout);

  private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

/// Alice's end of a framed stream.
class TransportLink final : public Link {
  public:
    explicit TransportLink(FdTransport& transport) : transport_(transport) {}
    WireMessage exchange(const WireMessage& msg) override;
    void post(const WireMessage& msg) override;

  private:
    FdTransport& transport_;
};

/// Bob's loop: answers frames until the session ends. Undecodable frames
/// are answered with Abort and end the session.
void serve_bob(FdTransport& transport, BobAgent& bob);

}  // namespace framegate
