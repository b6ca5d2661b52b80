#include "proxaudit/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace proxaudit::ingest {

static std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

ParsedCandidates parse_candidate_list(std::string_view raw, const std::string& source_id,
                                      Date as_of) {
    ParsedCandidates out;
    out.source_id = source_id;
    size_t pos = 0;
    while (pos <= raw.size()) {
        size_t nl = raw.find('\n', pos);
        std::string_view line =
            nl == std::string_view::npos ? raw.substr(pos) : raw.substr(pos, nl - pos);
        pos = nl == std::string_view::npos ? raw.size() + 1 : nl + 1;

        line = trim(line);
        if (line.empty() || line.front() == '#') continue;

        // Accept "ip:port" and "ip,port".
        std::string normalized(line);
        auto comma = normalized.find(',');
        if (comma != std::string::npos) normalized[comma] = ':';
        auto ep = parse_endpoint(normalized);
        if (!ep) {
            ++out.malformed_lines;
            continue;
        }
        ep->last_seen = as_of;
        out.endpoints.push_back(*ep);
    }
    return out;
}

std::vector<ProxyEndpoint> merge_candidates(const std::vector<ProxyEndpoint>& existing,
                                            const std::vector<ProxyEndpoint>& incoming) {
    std::unordered_map<uint64_t, ProxyEndpoint> by_key;
    by_key.reserve(existing.size() + incoming.size());
    auto absorb = [&](const ProxyEndpoint& ep) {
        auto [it, inserted] = by_key.emplace(ep.key(), ep);
        if (!inserted && ep.last_seen > it->second.last_seen) it->second.last_seen = ep.last_seen;
    };
    for (const auto& ep : existing) absorb(ep);
    for (const auto& ep : incoming) absorb(ep);

    std::vector<ProxyEndpoint> out;
    out.reserve(by_key.size());
    for (const auto& [key, ep] : by_key) out.push_back(ep);
    std::sort(out.begin(), out.end(), [](const ProxyEndpoint& a, const ProxyEndpoint& b) {
        if (a.last_seen != b.last_seen) return a.last_seen > b.last_seen;
        return a.key() < b.key();
    });
    return out;
}

std::string serialize_potential_list(const std::vector<ProxyEndpoint>& list) {
    std::string out;
    for (const auto& ep : list) {
        out += ep.to_string();
        out += '\t';
        out += ep.last_seen.to_string();
        out += '\n';
    }
    return out;
}

std::vector<ProxyEndpoint> parse_potential_list(std::string_view raw) {
    std::vector<ProxyEndpoint> out;
    size_t pos = 0;
    while (pos < raw.size()) {
        size_t nl = raw.find('\n', pos);
        std::string_view line =
            nl == std::string_view::npos ? raw.substr(pos) : raw.substr(pos, nl - pos);
        pos = nl == std::string_view::npos ? raw.size() : nl + 1;
        line = trim(line);
        if (line.empty() || line.front() == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string_view::npos) continue;
        auto ep = parse_endpoint(line.substr(0, tab));
        auto date = Date::parse(trim(line.substr(tab + 1)));
        if (!ep || !date) continue;
        ep->last_seen = *date;
        out.push_back(*ep);
    }
    return out;
}

std::vector<ProxyEndpoint> load_potential_list(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open potential list: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_potential_list(ss.str());
}

void save_potential_list(const std::string& path, const std::vector<ProxyEndpoint>& list) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write potential list: " + path);
    out << serialize_potential_list(list);
}

}  // namespace proxaudit::ingest
