#pragma once

#include <string>

#include "proxaudit/core.hpp"
#include "proxaudit/net/socket.hpp"

// HTTP/1.1 message framing over a Stream. Header order and raw casing are
// preserved exactly as they appear on the wire; canonicalization happens in
// the analysis layer. One message per connection (Connection: close
// semantics throughout the pipeline).

namespace proxaudit::net {

struct HttpRequest {
    std::string method;
    std::string target;  // origin-form, absolute-URI, or authority-form (CONNECT)
    std::string version = "HTTP/1.1";
    HeaderList headers;
    std::string body;
};

struct HttpResponse {
    int status = 0;
    std::string reason;
    std::string version = "HTTP/1.1";
    HeaderList headers;
    std::string body;
    bool body_complete = true;  // false when a deadline or reset truncated it
};

std::string serialize_request(const HttpRequest& req);
std::string serialize_response(const HttpResponse& resp);

inline constexpr size_t kMaxHeaderBytes = 64 * 1024;
inline constexpr size_t kMaxBodyBytes = 64 * 1024 * 1024;

// Reads a full request (headers plus content-length body).
NetError read_http_request(Stream& s, const Deadline& dl, HttpRequest& out);

// Reads a response. On Timeout/Reset the partial body read so far stays in
// out.body with body_complete = false.
NetError read_http_response(Stream& s, const Deadline& dl, HttpResponse& out,
                            size_t max_body = kMaxBodyBytes);

// Hop-by-hop headers a relay must not forward.
bool is_hop_by_hop(std::string_view name);
HeaderList strip_hop_by_hop(const HeaderList& headers);

}  // namespace proxaudit::net
