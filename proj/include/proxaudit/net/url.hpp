#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace proxaudit::net {

struct Url {
    std::string scheme;  // "http" | "https"
    std::string host;
    uint16_t port = 0;
    std::string target = "/";  // path + optional query

    std::string host_port() const { return host + ":" + std::to_string(port); }
    std::string to_string() const { return scheme + "://" + host_port() + target; }
    std::string path() const {
        auto q = target.find('?');
        return q == std::string::npos ? target : target.substr(0, q);
    }
};

std::optional<Url> parse_url(std::string_view s);

}  // namespace proxaudit::net
