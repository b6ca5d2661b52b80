#pragma once

#include <string>
#include <vector>

#include "proxaudit/core.hpp"

// Phase I: candidate list parsing and maintenance of the ordered
// potential-proxy list. Live aggregator crawling sits behind a fetcher
// adapter; the default source is a file.

namespace proxaudit::ingest {

struct CandidateSource {
    std::string source_id;
    enum class Kind { File, FetcherAdapter } kind = Kind::File;
    std::string uri;
};

// Adapter interface for non-file sources: returns the raw candidate list
// bytes. Implementations are environment-specific and out of the default
// build; the CLI only wires file sources.
class CandidateFetcher {
public:
    virtual ~CandidateFetcher() = default;
    virtual std::string fetch(const CandidateSource& source) = 0;
};

struct ParsedCandidates {
    std::vector<ProxyEndpoint> endpoints;
    size_t malformed_lines = 0;
    std::string source_id;
};

// One candidate per line, "ip:port" or "ip,port"; '#' starts a comment line.
// Malformed lines are counted, never fatal. Every endpoint is stamped
// last_seen = as_of.
ParsedCandidates parse_candidate_list(std::string_view raw, const std::string& source_id,
                                      Date as_of);

// Union keyed by <ip, port>; later last_seen wins. Result sorted by
// last_seen descending, ties by (ip, port) ascending.
std::vector<ProxyEndpoint> merge_candidates(const std::vector<ProxyEndpoint>& existing,
                                            const std::vector<ProxyEndpoint>& incoming);

// Potential-list file: one "ip:port<TAB>YYYY-MM-DD" entry per line.
std::string serialize_potential_list(const std::vector<ProxyEndpoint>& list);
std::vector<ProxyEndpoint> parse_potential_list(std::string_view raw);

std::vector<ProxyEndpoint> load_potential_list(const std::string& path);
void save_potential_list(const std::string& path, const std::vector<ProxyEndpoint>& list);

}  // namespace proxaudit::ingest
