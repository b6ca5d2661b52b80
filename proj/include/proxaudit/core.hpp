#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Shared domain types for the proxy auditing pipeline. Everything here is an
// immutable value; instances are freely copied between worker threads.

namespace proxaudit {

// Milliseconds since the Unix epoch, UTC.
using TimestampMs = int64_t;

TimestampMs now_ms();

// Calendar date (UTC), stored as whole days since 1970-01-01.
struct Date {
    int32_t days = 0;

    static Date from_ymd(int year, int month, int day);
    static std::optional<Date> parse(std::string_view s);  // "YYYY-MM-DD"
    static Date from_timestamp(TimestampMs ts);

    std::string to_string() const;
    TimestampMs start_of_day_ms() const { return static_cast<TimestampMs>(days) * 86400000; }

    auto operator<=>(const Date&) const = default;
};

// --- IPv4 helpers (host byte order) ---------------------------------------

std::optional<uint32_t> parse_ipv4(std::string_view s);
std::string ipv4_to_string(uint32_t ip);

// An <ip, port> candidate under test.
struct ProxyEndpoint {
    uint32_t ip = 0;       // host byte order
    uint16_t port = 0;     // 1..65535
    Date last_seen{};      // last day the endpoint appeared in any source list

    std::string ip_string() const { return ipv4_to_string(ip); }
    std::string to_string() const;  // "a.b.c.d:port"

    // Identity is the <ip, port> pair; last_seen is bookkeeping.
    uint64_t key() const { return (static_cast<uint64_t>(ip) << 16) | port; }

    friend bool operator==(const ProxyEndpoint& a, const ProxyEndpoint& b) {
        return a.key() == b.key();
    }
};

// Parses "a.b.c.d:port" (no last_seen). Rejects port 0 and out-of-range values.
std::optional<ProxyEndpoint> parse_endpoint(std::string_view s);

// --- Taxonomies ------------------------------------------------------------

enum class HostCategory { Unresponsive, Unreachable, Working, Other };
enum class AnonymityLevel { Transparent, Anonymous, Elite };
enum class BehaviorClass { Trusted, Suspicious, Unrated };

std::string_view to_string(HostCategory c);
std::string_view to_string(AnonymityLevel a);
std::string_view to_string(BehaviorClass b);
std::optional<HostCategory> host_category_from_string(std::string_view s);
std::optional<AnonymityLevel> anonymity_from_string(std::string_view s);
std::optional<BehaviorClass> behavior_from_string(std::string_view s);

// --- HTTP headers ----------------------------------------------------------

struct HeaderField {
    std::string name;
    std::string value;

    friend bool operator==(const HeaderField&, const HeaderField&) = default;
};

// Order-preserving header list, as sent or received on the wire.
using HeaderList = std::vector<HeaderField>;

// Canonical form: names lowercased, values trimmed with internal whitespace
// runs collapsed to a single space. Proxies re-case header names; that must
// not count as a modification.
std::string canonical_header_name(std::string_view name);
std::string canonical_header_value(std::string_view value);
HeaderList canonicalize_headers(const HeaderList& in);

// First value for a (case-insensitive) name, or nullptr.
const std::string* find_header(const HeaderList& headers, std::string_view name);

enum class Direction { Request, Response };
enum class DeltaKind { Added, Removed, Modified };

std::string_view to_string(Direction d);
std::string_view to_string(DeltaKind k);

// One observed difference between a baseline header list and the list seen
// on the other side of a proxy.
struct HeaderDelta {
    Direction direction = Direction::Request;
    std::string name;  // canonical (lowercase)
    DeltaKind kind = DeltaKind::Added;
    std::optional<std::string> baseline_value;
    std::optional<std::string> observed_value;

    friend bool operator==(const HeaderDelta&, const HeaderDelta&) = default;
};

// --- Manipulation evidence ---------------------------------------------------

enum class ManipulationKind { Altered, Injected };
enum class ContentClass { Html, Script, Image, Other };

std::string_view to_string(ManipulationKind k);
std::string_view to_string(ContentClass c);
std::optional<ManipulationKind> manipulation_kind_from_string(std::string_view s);
std::optional<ContentClass> content_class_from_string(std::string_view s);

// Injected pseudo-path used when foreign content has no bait-site path.
inline constexpr std::string_view kInjectedPath = "(injected)";

// Evidence of altered or injected content observed through one proxy.
// payload is the diffed region of the received bytes (Altered) or the foreign
// content itself (Injected). prefix_len/suffix_len locate the diffed region
// within the expected bytes so the received bytes can be reconstructed
// exactly: received = expected[0..prefix) + payload + expected[len-suffix..).
struct ManipulationEvidence {
    ProxyEndpoint endpoint;
    std::string object_path;
    ManipulationKind kind = ManipulationKind::Altered;
    std::string payload;         // never empty
    ContentClass content_class = ContentClass::Other;
    TimestampMs observed_at = 0;
    uint64_t prefix_len = 0;     // Altered only; 0 for Injected
    uint64_t suffix_len = 0;
};

// Splits expected vs received into (prefix, payload, suffix) with the longest
// common prefix and suffix; payload is the received middle.
ManipulationEvidence make_altered_evidence(const ProxyEndpoint& endpoint,
                                           const std::string& object_path,
                                           ContentClass content_class,
                                           std::string_view expected,
                                           std::string_view received,
                                           TimestampMs observed_at);

// Rebuilds the received bytes from expected bytes + evidence.
std::string replay_evidence(const ManipulationEvidence& ev, std::string_view expected);

ContentClass classify_content(std::string_view path, std::string_view content_type);

// --- TLS -----------------------------------------------------------------

struct ReferenceCertObservation {
    std::string host;
    std::string leaf_fingerprint;
    std::string subject;
    std::string issuer;
    bool self_signed = false;
};

// Result of comparing the X.509 certificate presented through a proxy with
// the known bait-origin leaf.
struct CertVerdict {
    bool matched = false;
    std::string presented_leaf_fingerprint;  // sha256 hex
    std::string presented_subject;
    std::string presented_issuer;
    bool self_signed = false;
    int chain_length = 0;  // 0 = no TLS response
    std::vector<ReferenceCertObservation> reference_observations;
};

// --- Phase IV usage record --------------------------------------------------

struct UsageReport {
    TimestampMs download_start = 0;
    TimestampMs download_end = 0;
    std::optional<int64_t> plt_ms;
    int64_t http_requests = 0;
    int64_t https_requests = 0;
    int64_t http_bytes = 0;
    int64_t https_bytes = 0;
    std::optional<std::string> nav_error;
    std::optional<bool> geo_localized;
    std::string proxy_country;  // ISO-3166 alpha-2
    AnonymityLevel anonymity_used = AnonymityLevel::Transparent;
};

// PII guards: free-text fields may not carry IP addresses, URLs, or user
// agents. Returns a rejection reason, or nullopt when the report is valid.
std::optional<std::string> validate_usage_report(const UsageReport& r);

// True when the text contains a dotted-quad IPv4 literal (boundary-aware:
// "11.2.3.45" does not count as containing "1.2.3.4").
bool contains_ipv4_literal(std::string_view text);
// True when the text contains a URL scheme ("http://", "ftp://", ...).
bool contains_url_scheme(std::string_view text);
// Boundary-aware search for one specific IP literal inside a header value.
bool value_contains_ip(std::string_view value, std::string_view ip);

bool is_valid_country_code(std::string_view s);

}  // namespace proxaudit
