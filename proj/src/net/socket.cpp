#include "proxaudit/net/socket.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <signal.h>
#include <sys/eventfd.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <mutex>

namespace proxaudit::net {

std::string_view to_string(NetError e) {
    switch (e) {
        case NetError::None: return "none";
        case NetError::Timeout: return "timeout";
        case NetError::Refused: return "refused";
        case NetError::Reset: return "reset";
        case NetError::Unreachable: return "unreachable";
        case NetError::Closed: return "closed";
        case NetError::Protocol: return "protocol";
        case NetError::Tls: return "tls";
        case NetError::Io: return "io";
    }
    return "?";
}

int Deadline::poll_ms(int cap_ms) const {
    if (unlimited) return cap_ms;
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                    at - std::chrono::steady_clock::now())
                    .count();
    if (left <= 0) return 0;
    return static_cast<int>(std::min<int64_t>(left, cap_ms));
}

static void ignore_sigpipe_once() {
    static std::once_flag once;
    std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

static NetError errno_to_error(int e) {
    switch (e) {
        case ETIMEDOUT: return NetError::Timeout;
        case ECONNREFUSED: return NetError::Refused;
        case ECONNRESET:
        case EPIPE: return NetError::Reset;
        case EHOSTUNREACH:
        case ENETUNREACH: return NetError::Unreachable;
        default: return NetError::Io;
    }
}

static bool set_nonblocking(int fd) {
    int flags = ::fcntl(fd, F_GETFL, 0);
    return flags >= 0 && ::fcntl(fd, F_SETFL, flags | O_NONBLOCK) == 0;
}

Socket& Socket::operator=(Socket&& other) noexcept {
    if (this != &other) {
        close_fd();
        fd_ = other.fd_;
        other.fd_ = -1;
    }
    return *this;
}

void Socket::close_fd() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

int Socket::release() {
    int fd = fd_;
    fd_ = -1;
    return fd;
}

Socket Socket::connect_to(const std::string& host, uint16_t port, const Deadline& dl,
                          NetError& err) {
    ignore_sigpipe_once();
    err = NetError::None;

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        addrinfo hints{};
        hints.ai_family = AF_INET;
        hints.ai_socktype = SOCK_STREAM;
        addrinfo* res = nullptr;
        if (::getaddrinfo(host.c_str(), nullptr, &hints, &res) != 0 || !res) {
            err = NetError::Unreachable;
            return {};
        }
        addr.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
        ::freeaddrinfo(res);
    }

    int fd = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
    if (fd < 0 || !set_nonblocking(fd)) {
        if (fd >= 0) ::close(fd);
        err = NetError::Io;
        return {};
    }
    Socket sock(fd);

    int rc = ::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr));
    if (rc != 0) {
        if (errno != EINPROGRESS) {
            err = errno_to_error(errno);
            return {};
        }
        for (;;) {
            pollfd pfd{fd, POLLOUT, 0};
            int pr = ::poll(&pfd, 1, dl.poll_ms());
            if (pr < 0 && errno == EINTR) continue;
            if (pr == 0) {
                if (dl.expired()) {
                    err = NetError::Timeout;
                    return {};
                }
                continue;
            }
            if (pr < 0) {
                err = NetError::Io;
                return {};
            }
            break;
        }
        int so_error = 0;
        socklen_t len = sizeof(so_error);
        if (::getsockopt(fd, SOL_SOCKET, SO_ERROR, &so_error, &len) != 0 || so_error != 0) {
            err = errno_to_error(so_error ? so_error : errno);
            return {};
        }
    }
    int flag = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &flag, sizeof(flag));
    return sock;
}

NetError Socket::read_some(char* buf, size_t cap, size_t& got, const Deadline& dl) {
    got = 0;
    for (;;) {
        ssize_t n = ::recv(fd_, buf, cap, 0);
        if (n > 0) {
            got = static_cast<size_t>(n);
            return NetError::None;
        }
        if (n == 0) return NetError::None;  // EOF, got == 0
        if (errno == EINTR) continue;
        if (errno != EAGAIN && errno != EWOULDBLOCK) return errno_to_error(errno);
        pollfd pfd{fd_, POLLIN, 0};
        int pr = ::poll(&pfd, 1, dl.poll_ms());
        if (pr < 0 && errno == EINTR) continue;
        if (pr < 0) return NetError::Io;
        if (pr == 0 && dl.expired()) return NetError::Timeout;
    }
}

NetError Socket::write_all(const char* buf, size_t len, const Deadline& dl) {
    size_t sent = 0;
    while (sent < len) {
        ssize_t n = ::send(fd_, buf + sent, len - sent, MSG_NOSIGNAL);
        if (n > 0) {
            sent += static_cast<size_t>(n);
            continue;
        }
        if (n < 0 && errno == EINTR) continue;
        if (n < 0 && errno != EAGAIN && errno != EWOULDBLOCK) return errno_to_error(errno);
        pollfd pfd{fd_, POLLOUT, 0};
        int pr = ::poll(&pfd, 1, dl.poll_ms());
        if (pr < 0 && errno == EINTR) continue;
        if (pr < 0) return NetError::Io;
        if (pr == 0 && dl.expired()) return NetError::Timeout;
    }
    return NetError::None;
}

void Socket::enable_rst_on_close() {
    linger lg{1, 0};
    ::setsockopt(fd_, SOL_SOCKET, SO_LINGER, &lg, sizeof(lg));
}

void Socket::shutdown_both() {
    if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

std::string Socket::peer_ip() const {
    sockaddr_in addr{};
    socklen_t len = sizeof(addr);
    if (::getpeername(fd_, reinterpret_cast<sockaddr*>(&addr), &len) != 0) return {};
    char buf[INET_ADDRSTRLEN] = {};
    ::inet_ntop(AF_INET, &addr.sin_addr, buf, sizeof(buf));
    return buf;
}

Listener::Listener(Listener&& other) noexcept
    : fd_(other.fd_), wake_fd_(other.wake_fd_), host_(std::move(other.host_)), port_(other.port_) {
    other.fd_ = -1;
    other.wake_fd_ = -1;
}

Listener& Listener::operator=(Listener&& other) noexcept {
    if (this != &other) {
        this->~Listener();
        fd_ = other.fd_;
        wake_fd_ = other.wake_fd_;
        host_ = std::move(other.host_);
        port_ = other.port_;
        other.fd_ = -1;
        other.wake_fd_ = -1;
    }
    return *this;
}

Listener::~Listener() {
    if (fd_ >= 0) ::close(fd_);
    if (wake_fd_ >= 0) ::close(wake_fd_);
}

Listener Listener::bind_to(const std::string& host, uint16_t port, NetError& err) {
    ignore_sigpipe_once();
    err = NetError::None;
    Listener l;

    int fd = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
    if (fd < 0) {
        err = NetError::Io;
        return l;
    }
    int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(fd);
        err = NetError::Io;
        return l;
    }
    if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 ||
        ::listen(fd, 256) != 0 || !set_nonblocking(fd)) {
        ::close(fd);
        err = NetError::Io;
        return l;
    }
    socklen_t len = sizeof(addr);
    ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);

    l.fd_ = fd;
    l.wake_fd_ = ::eventfd(0, EFD_CLOEXEC | EFD_NONBLOCK);
    l.host_ = host;
    l.port_ = ntohs(addr.sin_port);
    return l;
}

NetError Listener::accept_conn(Socket& out, const Deadline& dl) {
    for (;;) {
        pollfd pfds[2] = {{fd_, POLLIN, 0}, {wake_fd_, POLLIN, 0}};
        int pr = ::poll(pfds, 2, dl.poll_ms());
        if (pr < 0 && errno == EINTR) continue;
        if (pr < 0) return NetError::Io;
        if (pfds[1].revents & POLLIN) return NetError::Closed;  // interrupted
        if (pr == 0) {
            if (dl.expired()) return NetError::Timeout;
            continue;
        }
        int cfd = ::accept4(fd_, nullptr, nullptr, SOCK_CLOEXEC);
        if (cfd < 0) {
            if (errno == EAGAIN || errno == EWOULDBLOCK || errno == EINTR ||
                errno == ECONNABORTED)
                continue;
            return NetError::Io;
        }
        set_nonblocking(cfd);
        int flag = 1;
        ::setsockopt(cfd, IPPROTO_TCP, TCP_NODELAY, &flag, sizeof(flag));
        out = Socket(cfd);
        return NetError::None;
    }
}

void Listener::interrupt() {
    if (wake_fd_ >= 0) {
        uint64_t one = 1;
        [[maybe_unused]] ssize_t n = ::write(wake_fd_, &one, sizeof(one));
    }
}

}  // namespace proxaudit::net
