#include "proxaudit/core.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <stdexcept>

namespace proxaudit {

TimestampMs now_ms() {
    using namespace std::chrono;
    return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

// Civil-date conversion, Howard Hinnant's days_from_civil algorithm.
static int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

static void civil_from_days(int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int64_t yi = static_cast<int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yi + (m <= 2));
}

Date Date::from_ymd(int year, int month, int day) {
    return Date{static_cast<int32_t>(days_from_civil(year, month, day))};
}

Date Date::from_timestamp(TimestampMs ts) {
    int64_t d = ts / 86400000;
    if (ts < 0 && ts % 86400000 != 0) --d;
    return Date{static_cast<int32_t>(d)};
}

std::optional<Date> Date::parse(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    int y = 0, m = 0, d = 0;
    auto num = [](std::string_view v, int& out) {
        auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        return ec == std::errc() && p == v.data() + v.size();
    };
    if (!num(s.substr(0, 4), y) || !num(s.substr(5, 2), m) || !num(s.substr(8, 2), d))
        return std::nullopt;
    if (m < 1 || m > 12 || d < 1 || d > 31) return std::nullopt;
    Date date = from_ymd(y, m, d);
    // Round-trip check rejects impossible days like Feb 30.
    int yy, mm, dd;
    civil_from_days(date.days, yy, mm, dd);
    if (yy != y || mm != m || dd != d) return std::nullopt;
    return date;
}

std::string Date::to_string() const {
    int y, m, d;
    civil_from_days(days, y, m, d);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
    return buf;
}

std::optional<uint32_t> parse_ipv4(std::string_view s) {
    uint32_t ip = 0;
    size_t pos = 0;
    for (int octet = 0; octet < 4; ++octet) {
        if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos])))
            return std::nullopt;
        uint32_t v = 0;
        size_t len = 0;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
            v = v * 10 + (s[pos] - '0');
            ++pos;
            if (++len > 3 || v > 255) return std::nullopt;
        }
        ip = (ip << 8) | v;
        if (octet < 3) {
            if (pos >= s.size() || s[pos] != '.') return std::nullopt;
            ++pos;
        }
    }
    if (pos != s.size()) return std::nullopt;
    return ip;
}

std::string ipv4_to_string(uint32_t ip) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%u.%u.%u.%u", (ip >> 24) & 0xff, (ip >> 16) & 0xff,
                  (ip >> 8) & 0xff, ip & 0xff);
    return buf;
}

std::string ProxyEndpoint::to_string() const {
    return ip_string() + ":" + std::to_string(port);
}

std::optional<ProxyEndpoint> parse_endpoint(std::string_view s) {
    auto colon = s.rfind(':');
    if (colon == std::string_view::npos) return std::nullopt;
    auto ip = parse_ipv4(s.substr(0, colon));
    if (!ip) return std::nullopt;
    auto ps = s.substr(colon + 1);
    unsigned port = 0;
    auto [p, ec] = std::from_chars(ps.data(), ps.data() + ps.size(), port);
    if (ec != std::errc() || p != ps.data() + ps.size()) return std::nullopt;
    if (port < 1 || port > 65535) return std::nullopt;
    return ProxyEndpoint{*ip, static_cast<uint16_t>(port), {}};
}

std::string_view to_string(HostCategory c) {
    switch (c) {
        case HostCategory::Unresponsive: return "unresponsive";
        case HostCategory::Unreachable: return "unreachable";
        case HostCategory::Working: return "working";
        case HostCategory::Other: return "other";
    }
    return "?";
}

std::string_view to_string(AnonymityLevel a) {
    switch (a) {
        case AnonymityLevel::Transparent: return "transparent";
        case AnonymityLevel::Anonymous: return "anonymous";
        case AnonymityLevel::Elite: return "elite";
    }
    return "?";
}

std::string_view to_string(BehaviorClass b) {
    switch (b) {
        case BehaviorClass::Trusted: return "trusted";
        case BehaviorClass::Suspicious: return "suspicious";
        case BehaviorClass::Unrated: return "unrated";
    }
    return "?";
}

std::optional<HostCategory> host_category_from_string(std::string_view s) {
    if (s == "unresponsive") return HostCategory::Unresponsive;
    if (s == "unreachable") return HostCategory::Unreachable;
    if (s == "working") return HostCategory::Working;
    if (s == "other") return HostCategory::Other;
    return std::nullopt;
}

std::optional<AnonymityLevel> anonymity_from_string(std::string_view s) {
    if (s == "transparent") return AnonymityLevel::Transparent;
    if (s == "anonymous") return AnonymityLevel::Anonymous;
    if (s == "elite") return AnonymityLevel::Elite;
    return std::nullopt;
}

std::optional<BehaviorClass> behavior_from_string(std::string_view s) {
    if (s == "trusted") return BehaviorClass::Trusted;
    if (s == "suspicious") return BehaviorClass::Suspicious;
    if (s == "unrated") return BehaviorClass::Unrated;
    return std::nullopt;
}

std::string_view to_string(Direction d) {
    return d == Direction::Request ? "request" : "response";
}

std::string_view to_string(DeltaKind k) {
    switch (k) {
        case DeltaKind::Added: return "added";
        case DeltaKind::Removed: return "removed";
        case DeltaKind::Modified: return "modified";
    }
    return "?";
}

std::string canonical_header_name(std::string_view name) {
    std::string out;
    out.reserve(name.size());
    for (char c : name) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return out;
}

std::string canonical_header_value(std::string_view value) {
    std::string out;
    out.reserve(value.size());
    bool in_space = false;
    for (char c : value) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            in_space = true;
            continue;
        }
        if (in_space && !out.empty()) out.push_back(' ');
        in_space = false;
        out.push_back(c);
    }
    return out;
}

HeaderList canonicalize_headers(const HeaderList& in) {
    HeaderList out;
    out.reserve(in.size());
    for (const auto& h : in)
        out.push_back({canonical_header_name(h.name), canonical_header_value(h.value)});
    return out;
}

const std::string* find_header(const HeaderList& headers, std::string_view name) {
    for (const auto& h : headers) {
        if (h.name.size() != name.size()) continue;
        bool eq = true;
        for (size_t i = 0; i < name.size(); ++i) {
            if (std::tolower(static_cast<unsigned char>(h.name[i])) !=
                std::tolower(static_cast<unsigned char>(name[i]))) {
                eq = false;
                break;
            }
        }
        if (eq) return &h.value;
    }
    return nullptr;
}

std::string_view to_string(ManipulationKind k) {
    return k == ManipulationKind::Altered ? "altered" : "injected";
}

std::string_view to_string(ContentClass c) {
    switch (c) {
        case ContentClass::Html: return "html";
        case ContentClass::Script: return "script";
        case ContentClass::Image: return "image";
        case ContentClass::Other: return "other";
    }
    return "?";
}

std::optional<ManipulationKind> manipulation_kind_from_string(std::string_view s) {
    if (s == "altered") return ManipulationKind::Altered;
    if (s == "injected") return ManipulationKind::Injected;
    return std::nullopt;
}

std::optional<ContentClass> content_class_from_string(std::string_view s) {
    if (s == "html") return ContentClass::Html;
    if (s == "script") return ContentClass::Script;
    if (s == "image") return ContentClass::Image;
    if (s == "other") return ContentClass::Other;
    return std::nullopt;
}

ManipulationEvidence make_altered_evidence(const ProxyEndpoint& endpoint,
                                           const std::string& object_path,
                                           ContentClass content_class,
                                           std::string_view expected,
                                           std::string_view received,
                                           TimestampMs observed_at) {
    size_t prefix = 0;
    const size_t max_common = std::min(expected.size(), received.size());
    while (prefix < max_common && expected[prefix] == received[prefix]) ++prefix;
    size_t suffix = 0;
    while (suffix < max_common - prefix &&
           expected[expected.size() - 1 - suffix] == received[received.size() - 1 - suffix])
        ++suffix;

    ManipulationEvidence ev;
    ev.endpoint = endpoint;
    ev.object_path = object_path;
    ev.kind = ManipulationKind::Altered;
    ev.content_class = content_class;
    ev.observed_at = observed_at;
    ev.prefix_len = prefix;
    ev.suffix_len = suffix;
    ev.payload = std::string(received.substr(prefix, received.size() - prefix - suffix));
    // The type invariant wants a non-empty payload; a pure deletion is encoded
    // as a one-byte marker so the diff region stays visible to a human.
    if (ev.payload.empty()) ev.payload = "\x00";
    return ev;
}

std::string replay_evidence(const ManipulationEvidence& ev, std::string_view expected) {
    if (ev.kind == ManipulationKind::Injected) return ev.payload;
    std::string out(expected.substr(0, ev.prefix_len));
    if (!(ev.payload.size() == 1 && ev.payload[0] == '\x00')) out += ev.payload;
    out += expected.substr(expected.size() - ev.suffix_len);
    return out;
}

ContentClass classify_content(std::string_view path, std::string_view content_type) {
    auto has = [](std::string_view s, std::string_view needle) {
        return s.find(needle) != std::string_view::npos;
    };
    if (has(content_type, "html")) return ContentClass::Html;
    if (has(content_type, "javascript") || has(content_type, "ecmascript"))
        return ContentClass::Script;
    if (content_type.substr(0, 6) == "image/") return ContentClass::Image;
    if (content_type.empty()) {
        auto dot = path.rfind('.');
        if (dot != std::string_view::npos) {
            auto ext = path.substr(dot + 1);
            if (ext == "html" || ext == "htm") return ContentClass::Html;
            if (ext == "js" || ext == "mjs") return ContentClass::Script;
            if (ext == "png" || ext == "jpg" || ext == "jpeg" || ext == "gif" || ext == "ico")
                return ContentClass::Image;
        }
    }
    return ContentClass::Other;
}

static bool ip_boundary(char c) {
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.';
}

bool value_contains_ip(std::string_view value, std::string_view ip) {
    size_t pos = 0;
    while ((pos = value.find(ip, pos)) != std::string_view::npos) {
        const bool left_ok = pos == 0 || !ip_boundary(value[pos - 1]);
        const size_t end = pos + ip.size();
        const bool right_ok = end >= value.size() || !ip_boundary(value[end]);
        if (left_ok && right_ok) return true;
        ++pos;
    }
    return false;
}

bool contains_ipv4_literal(std::string_view text) {
    for (size_t i = 0; i < text.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(text[i]))) continue;
        if (i > 0 && ip_boundary(text[i - 1])) continue;
        // Try to read a dotted quad starting at i.
        size_t pos = i;
        int octets = 0;
        while (octets < 4) {
            uint32_t v = 0;
            size_t len = 0;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
                v = v * 10 + (text[pos] - '0');
                ++pos;
                if (++len > 3) break;
            }
            if (len == 0 || len > 3 || v > 255) break;
            ++octets;
            if (octets == 4) {
                if (pos >= text.size() || !ip_boundary(text[pos])) return true;
                break;
            }
            if (pos >= text.size() || text[pos] != '.') break;
            ++pos;
        }
    }
    return false;
}

bool contains_url_scheme(std::string_view text) {
    for (size_t i = 0; i + 2 < text.size(); ++i) {
        if (text[i] != ':' || text[i + 1] != '/' || text[i + 2] != '/') continue;
        // Require a scheme token before "://": ALPHA *(ALPHA / DIGIT / + / - / .)
        size_t j = i;
        while (j > 0) {
            char c = text[j - 1];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.')
                --j;
            else
                break;
        }
        if (j < i && std::isalpha(static_cast<unsigned char>(text[j]))) return true;
    }
    return false;
}

bool is_valid_country_code(std::string_view s) {
    return s.size() == 2 && std::isupper(static_cast<unsigned char>(s[0])) &&
           std::isupper(static_cast<unsigned char>(s[1]));
}

std::optional<std::string> validate_usage_report(const UsageReport& r) {
    if (r.download_end < r.download_start) return "download_end before download_start";
    if (r.plt_ms && *r.plt_ms < 0) return "negative plt_ms";
    if (r.http_requests < 0 || r.https_requests < 0) return "negative request count";
    if (r.http_bytes < 0 || r.https_bytes < 0) return "negative byte count";
    if (!is_valid_country_code(r.proxy_country)) return "invalid proxy_country";
    if (r.nav_error) {
        if (contains_ipv4_literal(*r.nav_error)) return "pii: ip address in nav_error";
        if (contains_url_scheme(*r.nav_error)) return "pii: url in nav_error";
        if (r.nav_error->size() > 256) return "nav_error too long";
    }
    return std::nullopt;
}

}  // namespace proxaudit
