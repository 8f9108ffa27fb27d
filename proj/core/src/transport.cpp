#include "framegate/transport.hpp"

#include <cerrno>
#include <cstring>
#include <utility>

#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include "framegate/codec.hpp"
#include "framegate/error.hpp"

namespace framegate {
namespace {

[[noreturn]] void sys_fail(const std::string& what)
{
    fail(ErrorCode::TransportError, what + ": " + std::strerror(errno));
}

std::pair<std::string, std::string> split_address(const std::string& address)
{
    const auto colon = address.rfind(':');
    if (colon == std::string::npos || colon + 1 == address.size()) {
        fail(ErrorCode::TransportError, "address '" + address + "' is not host:port");
    }
    std::string host = address.substr(0, colon);
    return {host.empty() ? "127.0.0.1" : host, address.substr(colon + 1)};
}

struct AddrInfo {
    addrinfo* list = nullptr;
    ~AddrInfo()
    {
        if (list != nullptr) {
            freeaddrinfo(list);
        }
    }
};

void resolve(const std::string& address, bool passive, AddrInfo& out)
{
    const auto [host, port] = split_address(address);
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    hints.ai_flags = passive ? AI_PASSIVE : 0;
    if (const int rc = getaddrinfo(host.c_str(), port.c_str(), &hints, &out.list); rc != 0) {
        fail(ErrorCode::TransportError, "cannot resolve '" + address + "': " + gai_strerror(rc));
    }
}

bool wait_readable(int fd, std::chrono::milliseconds timeout)
{
    pollfd p{fd, POLLIN, 0};
    while (true) {
        const int rc = ::poll(&p, 1, static_cast<int>(timeout.count()));
        if (rc < 0 && errno == EINTR) {
            continue;
        }
        if (rc < 0) {
            sys_fail("poll");
        }
        return rc > 0;
    }
}

}  // namespace

FdTransport::FdTransport(int read_fd, int write_fd, bool owns, std::chrono::milliseconds timeout)
    : read_fd_(read_fd), write_fd_(write_fd), owns_(owns), timeout_(timeout)
{
}

FdTransport::~FdTransport() { close(); }

FdTransport::FdTransport(FdTransport&& other) noexcept
    : read_fd_(std::exchange(other.read_fd_, -1)),
      write_fd_(std::exchange(other.write_fd_, -1)),
      owns_(std::exchange(other.owns_, false)),
      timeout_(other.timeout_),
      buffer_(std::move(other.buffer_))
{
}

FdTransport& FdTransport::operator=(FdTransport&& other) noexcept
{
    if (this != &other) {
        close();
        read_fd_ = std::exchange(other.read_fd_, -1);
        write_fd_ = std::exchange(other.write_fd_, -1);
        owns_ = std::exchange(other.owns_, false);
        timeout_ = other.timeout_;
        buffer_ = std::move(other.buffer_);
    }
    return *this;
}

void FdTransport::close() noexcept
{
    if (owns_) {
        if (read_fd_ >= 0) {
            ::close(read_fd_);
        }
        if (write_fd_ >= 0 && write_fd_ != read_fd_) {
            ::close(write_fd_);
        }
    }
    read_fd_ = -1;
    write_fd_ = -1;
    owns_ = false;
}

FdTransport FdTransport::stdio(std::chrono::milliseconds timeout)
{
    return FdTransport(STDIN_FILENO, STDOUT_FILENO, false, timeout);
}

FdTransport FdTransport::connect(const std::string& address, std::chrono::milliseconds timeout)
{
    AddrInfo info;
    resolve(address, false, info);
    const int fd = ::socket(info.list->ai_family, info.list->ai_socktype, info.list->ai_protocol);
    if (fd < 0) {
        sys_fail("socket");
    }
    FdTransport t(fd, fd, true, timeout);
    if (::connect(fd, info.list->ai_addr, info.list->ai_addrlen) != 0) {
        sys_fail("connect to " + address);
    }
    return t;
}

void FdTransport::send(std::string_view payload)
{
    if (write_fd_ < 0) {
        fail(ErrorCode::TransportError, "transport is closed");
    }
    const std::string bytes = frame(payload);
    std::size_t done = 0;
    while (done < bytes.size()) {
        ssize_t n = ::send(write_fd_, bytes.data() + done, bytes.size() - done, MSG_NOSIGNAL);
        if (n < 0 && errno == ENOTSOCK) {
            n = ::write(write_fd_, bytes.data() + done, bytes.size() - done);
        }
        if (n < 0 && errno == EINTR) {
            continue;
        }
        if (n < 0 && (errno == EPIPE || errno == ECONNRESET)) {
            fail(ErrorCode::PeerAbort, "peer closed the connection while sending");
        }
        if (n < 0) {
            sys_fail("send");
        }
        done += static_cast<std::size_t>(n);
    }
}

void FdTransport::read_more()
{
    if (!wait_readable(read_fd_, timeout_)) {
        fail(ErrorCode::Timeout, "no message within " + std::to_string(timeout_.count()) + " ms");
    }
    char chunk[65536];
    while (true) {
        const ssize_t n = ::read(read_fd_, chunk, sizeof chunk);
        if (n < 0 && errno == EINTR) {
            continue;
        }
        if (n < 0 && errno == ECONNRESET) {
            fail(ErrorCode::PeerAbort, "connection reset by peer");
        }
        if (n < 0) {
            sys_fail("read");
        }
        if (n == 0) {
            fail(ErrorCode::PeerAbort, "peer closed the connection");
        }
        buffer_.append(chunk, static_cast<std::size_t>(n));
        return;
    }
}

std::string FdTransport::receive()
{
    if (read_fd_ < 0) {
        fail(ErrorCode::TransportError, "transport is closed");
    }
    while (true) {
        std::size_t used = 0;
        if (auto payload = unframe(buffer_, used)) {
            buffer_.erase(0, used);
            return std::move(*payload);
        }
        read_more();
    }
}

TcpListener::TcpListener(const std::string& address)
{
    AddrInfo info;
    resolve(address, true, info);
    fd_ = ::socket(info.list->ai_family, info.list->ai_socktype, info.list->ai_protocol);
    if (fd_ < 0) {
        sys_fail("socket");
    }
    const int on = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &on, sizeof on);
    if (::bind(fd_, info.list->ai_addr, info.list->ai_addrlen) != 0 || ::listen(fd_, 4) != 0) {
        const int saved = errno;
        ::close(fd_);
        errno = saved;
        sys_fail("listen on " + address);
    }
    sockaddr_in bound{};
    socklen_t len = sizeof bound;
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &len);
    port_ = ntohs(bound.sin_port);
}

TcpListener::~TcpListener()
{
    if (fd_ >= 0) {
        ::close(fd_);
    }
}

FdTransport TcpListener::accept(std::chrono::milliseconds timeout)
{
    if (!wait_readable(fd_, timeout)) {
        fail(ErrorCode::Timeout, "no connection within " + std::to_string(timeout.count()) + " ms");
    }
    const int fd = ::accept(fd_, nullptr, nullptr);
    if (fd < 0) {
        sys_fail("accept");
    }
    return FdTransport(fd, fd, true, timeout);
}

WireMessage TransportLink::exchange(const WireMessage& msg)
{
    transport_.send(encode(msg));
    return decode(transport_.receive());
}

void TransportLink::post(const WireMessage& msg) { transport_.send(encode(msg)); }

void serve_bob(FdTransport& transport, BobAgent& bob)
{
    while (!bob.finished()) {
        const std::string payload = transport.receive();
        std::optional<WireMessage> reply;
        try {
            reply = bob.handle(decode(payload));
        }
        catch (const Error& e) {
            if (e.code() != ErrorCode::Malformed && e.code() != ErrorCode::VersionMismatch) {
                throw;
            }
            transport.send(encode({0, AbortMsg{std::string(to_string(e.code())), e.what()}}));
            return;
        }
        if (reply) {
            transport.send(encode(*reply));
        }
    }
}

}  // namespace framegate
