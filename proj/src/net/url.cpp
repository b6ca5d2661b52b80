#include "proxaudit/net/url.hpp"

#include <charconv>

namespace proxaudit::net {

std::optional<Url> parse_url(std::string_view s) {
    Url u;
    auto scheme_end = s.find("://");
    if (scheme_end == std::string_view::npos) return std::nullopt;
    u.scheme = std::string(s.substr(0, scheme_end));
    for (auto& c : u.scheme) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (u.scheme != "http" && u.scheme != "https") return std::nullopt;
    s.remove_prefix(scheme_end + 3);

    auto path_start = s.find('/');
    std::string_view authority = path_start == std::string_view::npos ? s : s.substr(0, path_start);
    if (authority.empty()) return std::nullopt;
    u.target = path_start == std::string_view::npos ? "/" : std::string(s.substr(path_start));

    auto colon = authority.rfind(':');
    if (colon != std::string_view::npos) {
        auto ps = authority.substr(colon + 1);
        unsigned port = 0;
        auto [p, ec] = std::from_chars(ps.data(), ps.data() + ps.size(), port);
        if (ec != std::errc() || p != ps.data() + ps.size() || port < 1 || port > 65535)
            return std::nullopt;
        u.port = static_cast<uint16_t>(port);
        u.host = std::string(authority.substr(0, colon));
    } else {
        u.host = std::string(authority);
        u.port = u.scheme == "https" ? 443 : 80;
    }
    if (u.host.empty()) return std::nullopt;
    return u;
}

}  // namespace proxaudit::net
