#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <string>

// Thin POSIX socket layer: non-blocking fds with per-call deadlines. Network
// failures are data for the classifier, so everything reports a NetError
// instead of throwing.

namespace proxaudit::net {

enum class NetError {
    None,
    Timeout,      // connect or I/O deadline elapsed
    Refused,      // RST in response to SYN
    Reset,        // RST on an established connection
    Unreachable,  // ICMP host/net unreachable
    Closed,       // orderly EOF where more data was required
    Protocol,     // malformed peer data
    Tls,          // TLS layer failure
    Io,           // anything else
};

std::string_view to_string(NetError e);

struct Deadline {
    std::chrono::steady_clock::time_point at;
    bool unlimited = false;

    static Deadline in(int64_t ms) {
        return {std::chrono::steady_clock::now() + std::chrono::milliseconds(ms), false};
    }
    static Deadline at_time(std::chrono::steady_clock::time_point t) { return {t, false}; }
    static Deadline never() { return {{}, true}; }

    bool expired() const {
        return !unlimited && std::chrono::steady_clock::now() >= at;
    }
    // Remaining time as a poll(2) timeout; -1 when unlimited, 0 when expired.
    int poll_ms(int cap_ms = 60'000) const;
};

// Byte stream with deadline-aware reads/writes. got == 0 with NetError::None
// signals EOF.
class Stream {
public:
    virtual ~Stream() = default;
    virtual NetError read_some(char* buf, size_t cap, size_t& got, const Deadline& dl) = 0;
    virtual NetError write_all(const char* buf, size_t len, const Deadline& dl) = 0;
};

class Socket : public Stream {
public:
    Socket() = default;
    explicit Socket(int fd) : fd_(fd) {}
    Socket(Socket&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }
    Socket& operator=(Socket&& other) noexcept;
    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;
    ~Socket() { close_fd(); }

    // Resolves host (IPv4) and connects within the deadline.
    static Socket connect_to(const std::string& host, uint16_t port, const Deadline& dl,
                             NetError& err);

    NetError read_some(char* buf, size_t cap, size_t& got, const Deadline& dl) override;
    NetError write_all(const char* buf, size_t len, const Deadline& dl) override;

    // Close will send RST instead of FIN.
    void enable_rst_on_close();
    void shutdown_both();

    bool valid() const { return fd_ >= 0; }
    int fd() const { return fd_; }
    int release();
    void close_fd();

    std::string peer_ip() const;

private:
    int fd_ = -1;
};

class Listener {
public:
    Listener() = default;
    Listener(Listener&&) noexcept;
    Listener& operator=(Listener&&) noexcept;
    ~Listener();

    static Listener bind_to(const std::string& host, uint16_t port, NetError& err);

    // Waits for a connection; wakes early when interrupt() is called.
    NetError accept_conn(Socket& out, const Deadline& dl);
    void interrupt();

    bool valid() const { return fd_ >= 0; }
    const std::string& host() const { return host_; }
    uint16_t port() const { return port_; }

private:
    int fd_ = -1;
    int wake_fd_ = -1;  // eventfd used by interrupt()
    std::string host_;
    uint16_t port_ = 0;
};

}  // namespace proxaudit::net
