#include "proxaudit/net/http.hpp"

#include <charconv>

namespace proxaudit::net {

namespace {

// Incremental line/byte reader over a Stream.
class Reader {
public:
    explicit Reader(Stream& s) : s_(s) {}

    // Reads one CRLF- (or LF-) terminated line, without the terminator.
    NetError read_line(const Deadline& dl, std::string& line, size_t max_len) {
        line.clear();
        for (;;) {
            auto nl = buf_.find('\n', pos_);
            if (nl != std::string::npos) {
                size_t len = nl - pos_;
                line.assign(buf_, pos_, len);
                if (!line.empty() && line.back() == '\r') line.pop_back();
                pos_ = nl + 1;
                compact();
                return NetError::None;
            }
            if (buf_.size() - pos_ > max_len) return NetError::Protocol;
            NetError err = fill(dl);
            if (err != NetError::None) return err;
            if (eof_) return buf_.size() == pos_ ? NetError::Closed : NetError::Protocol;
        }
    }

    // Appends exactly n bytes to out (or as many as arrive before error/EOF).
    NetError read_exact(const Deadline& dl, size_t n, std::string& out) {
        while (n > 0) {
            size_t avail = buf_.size() - pos_;
            if (avail > 0) {
                size_t take = std::min(avail, n);
                out.append(buf_, pos_, take);
                pos_ += take;
                n -= take;
                compact();
                continue;
            }
            if (eof_) return NetError::Closed;
            NetError err = fill(dl);
            if (err != NetError::None) return err;
        }
        return NetError::None;
    }

    // Appends everything until EOF.
    NetError read_until_close(const Deadline& dl, std::string& out, size_t max_len) {
        for (;;) {
            out.append(buf_, pos_, buf_.size() - pos_);
            pos_ = buf_.size();
            compact();
            if (out.size() > max_len) return NetError::Protocol;
            if (eof_) return NetError::None;
            NetError err = fill(dl);
            if (err != NetError::None) return err;
        }
    }

private:
    NetError fill(const Deadline& dl) {
        char chunk[16384];
        size_t got = 0;
        NetError err = s_.read_some(chunk, sizeof(chunk), got, dl);
        if (err != NetError::None) return err;
        if (got == 0) {
            eof_ = true;
            return NetError::None;
        }
        buf_.append(chunk, got);
        return NetError::None;
    }

    void compact() {
        if (pos_ > 4096 && pos_ == buf_.size()) {
            buf_.clear();
            pos_ = 0;
        }
    }

    Stream& s_;
    std::string buf_;
    size_t pos_ = 0;
    bool eof_ = false;
};

NetError read_header_block(Reader& r, const Deadline& dl, std::string& start_line,
                           HeaderList& headers) {
    NetError err = r.read_line(dl, start_line, kMaxHeaderBytes);
    if (err != NetError::None) return err;
    if (start_line.empty()) return NetError::Protocol;

    std::string line;
    size_t total = start_line.size();
    for (;;) {
        err = r.read_line(dl, line, kMaxHeaderBytes);
        if (err != NetError::None) return err;
        if (line.empty()) return NetError::None;
        total += line.size();
        if (total > kMaxHeaderBytes) return NetError::Protocol;
        auto colon = line.find(':');
        if (colon == std::string::npos) return NetError::Protocol;
        std::string name = line.substr(0, colon);
        size_t vstart = colon + 1;
        while (vstart < line.size() &&
               (line[vstart] == ' ' || line[vstart] == '\t'))
            ++vstart;
        size_t vend = line.size();
        while (vend > vstart && (line[vend - 1] == ' ' || line[vend - 1] == '\t')) --vend;
        headers.push_back({std::move(name), line.substr(vstart, vend - vstart)});
    }
}

std::optional<size_t> content_length_of(const HeaderList& headers) {
    const std::string* v = find_header(headers, "content-length");
    if (!v) return std::nullopt;
    size_t n = 0;
    auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), n);
    if (ec != std::errc() || p != v->data() + v->size()) return std::nullopt;
    return n;
}

bool is_chunked(const HeaderList& headers) {
    const std::string* v = find_header(headers, "transfer-encoding");
    if (!v) return false;
    std::string lower;
    for (char c : *v) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return lower.find("chunked") != std::string::npos;
}

NetError read_chunked_body(Reader& r, const Deadline& dl, std::string& body, size_t max_body) {
    std::string line;
    for (;;) {
        NetError err = r.read_line(dl, line, 1024);
        if (err != NetError::None) return err;
        size_t semi = line.find(';');
        std::string_view size_str =
            semi == std::string::npos ? std::string_view(line) : std::string_view(line).substr(0, semi);
        size_t chunk = 0;
        auto [p, ec] =
            std::from_chars(size_str.data(), size_str.data() + size_str.size(), chunk, 16);
        if (ec != std::errc() || p != size_str.data() + size_str.size())
            return NetError::Protocol;
        if (chunk == 0) {
            // Trailers until the blank line.
            for (;;) {
                err = r.read_line(dl, line, 1024);
                if (err != NetError::None) return err;
                if (line.empty()) return NetError::None;
            }
        }
        if (body.size() + chunk > max_body) return NetError::Protocol;
        err = r.read_exact(dl, chunk, body);
        if (err != NetError::None) return err;
        err = r.read_line(dl, line, 16);  // chunk terminator CRLF
        if (err != NetError::None) return err;
    }
}

}  // namespace

std::string serialize_request(const HttpRequest& req) {
    std::string out = req.method + " " + req.target + " " + req.version + "\r\n";
    for (const auto& h : req.headers) out += h.name + ": " + h.value + "\r\n";
    out += "\r\n";
    out += req.body;
    return out;
}

std::string serialize_response(const HttpResponse& resp) {
    std::string out =
        resp.version + " " + std::to_string(resp.status) + " " + resp.reason + "\r\n";
    for (const auto& h : resp.headers) out += h.name + ": " + h.value + "\r\n";
    out += "\r\n";
    out += resp.body;
    return out;
}

NetError read_http_request(Stream& s, const Deadline& dl, HttpRequest& out) {
    Reader r(s);
    std::string start_line;
    NetError err = read_header_block(r, dl, start_line, out.headers);
    if (err != NetError::None) return err;

    auto sp1 = start_line.find(' ');
    auto sp2 = start_line.find(' ', sp1 == std::string::npos ? 0 : sp1 + 1);
    if (sp1 == std::string::npos || sp2 == std::string::npos) return NetError::Protocol;
    out.method = start_line.substr(0, sp1);
    out.target = start_line.substr(sp1 + 1, sp2 - sp1 - 1);
    out.version = start_line.substr(sp2 + 1);
    if (out.method.empty() || out.target.empty()) return NetError::Protocol;

    if (auto len = content_length_of(out.headers)) {
        if (*len > kMaxBodyBytes) return NetError::Protocol;
        return r.read_exact(dl, *len, out.body);
    }
    return NetError::None;
}

NetError read_http_response(Stream& s, const Deadline& dl, HttpResponse& out, size_t max_body) {
    Reader r(s);
    std::string start_line;
    NetError err = read_header_block(r, dl, start_line, out.headers);
    if (err != NetError::None) return err;

    // "HTTP/1.1 200 OK"
    auto sp1 = start_line.find(' ');
    if (sp1 == std::string::npos) return NetError::Protocol;
    out.version = start_line.substr(0, sp1);
    if (out.version.rfind("HTTP/", 0) != 0) return NetError::Protocol;
    auto sp2 = start_line.find(' ', sp1 + 1);
    std::string code = sp2 == std::string::npos ? start_line.substr(sp1 + 1)
                                                : start_line.substr(sp1 + 1, sp2 - sp1 - 1);
    auto [p, ec] = std::from_chars(code.data(), code.data() + code.size(), out.status);
    if (ec != std::errc() || out.status < 100 || out.status > 599) return NetError::Protocol;
    out.reason = sp2 == std::string::npos ? "" : start_line.substr(sp2 + 1);

    if (out.status == 204 || out.status == 304 || (out.status >= 100 && out.status < 200)) {
        out.body_complete = true;
        return NetError::None;
    }

    out.body_complete = false;
    if (is_chunked(out.headers)) {
        err = read_chunked_body(r, dl, out.body, max_body);
    } else if (auto len = content_length_of(out.headers)) {
        if (*len > max_body) return NetError::Protocol;
        err = r.read_exact(dl, *len, out.body);
    } else {
        err = r.read_until_close(dl, out.body, max_body);
    }
    if (err == NetError::None) out.body_complete = true;
    return err;
}

bool is_hop_by_hop(std::string_view name) {
    static constexpr std::string_view kHopByHop[] = {
        "connection", "proxy-connection", "keep-alive",        "te",
        "trailer",    "trailers",         "transfer-encoding", "upgrade",
        "proxy-authenticate", "proxy-authorization",
    };
    std::string lower;
    for (char c : name) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    for (auto h : kHopByHop)
        if (lower == h) return true;
    return false;
}

HeaderList strip_hop_by_hop(const HeaderList& headers) {
    HeaderList out;
    for (const auto& h : headers)
        if (!is_hop_by_hop(h.name)) out.push_back(h);
    return out;
}

}  // namespace proxaudit::net
