#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "proxaudit/core.hpp"

// Pure, deterministic algorithms: content similarity, edit distance, affinity
// propagation clustering of manipulation payloads, and header diffing.

namespace proxaudit::analysis {

// Maximal runs of non-whitespace bytes.
std::vector<std::string_view> tokenize(std::string_view bytes);

// Ratio of common content between two byte strings:
// |LCS(tokens_a, tokens_b)| / max(|tokens_a|, |tokens_b|).
// Both empty -> 1.0; exactly one empty -> 0.0.
double similarity_score(std::string_view expected, std::string_view received);

// Unit-cost edit distance (insert/delete/substitute) over bytes.
size_t levenshtein(std::string_view a, std::string_view b);

// --- Affinity propagation ---------------------------------------------------

struct SimilarityMatrix {
    size_t n = 0;
    std::vector<double> s;  // row-major n*n; diagonal ignored in favor of preference
    double preference = 0;

    double at(size_t i, size_t k) const { return s[i * n + k]; }
    double& at(size_t i, size_t k) { return s[i * n + k]; }

    // preference = median of off-diagonal similarities (0 when n == 1).
    static SimilarityMatrix from_similarities(std::vector<double> values, size_t n);
};

struct ClusterAssignment {
    std::vector<size_t> exemplar_of;                     // point -> exemplar index
    std::map<size_t, std::vector<size_t>> clusters;      // exemplar -> members
    bool converged = true;
    size_t iterations = 0;
};

struct AffinityPropagationOptions {
    double damping = 0.5;          // in (0,1)
    size_t max_iters = 1000;
    size_t convergence_iters = 100;  // stop after this many stable iterations
};

// Frey/Dueck message passing over a dense similarity matrix. Throws
// std::invalid_argument for n == 0 or damping outside (0,1).
ClusterAssignment affinity_propagation(const SimilarityMatrix& s,
                                       const AffinityPropagationOptions& opts = {});

// Net similarity of an exemplar assignment: sum of s(i, exemplar(i)) over
// non-exemplars plus preference per exemplar. This is the objective the
// brute-force oracle maximizes.
double net_similarity(const SimilarityMatrix& s, const std::vector<size_t>& exemplar_of);

// --- Manipulation clustering -------------------------------------------------

struct ManipulationCluster {
    std::string exemplar_payload;
    size_t size = 0;                          // unique payloads in the cluster
    std::vector<std::string> member_payloads;
    std::vector<ProxyEndpoint> member_endpoints;  // all endpoints exhibiting any member payload
    size_t instance_count = 0;                // evidence records covered
};

// Deduplicates payloads (truncated to payload_cap bytes for the O(len^2)
// distance), builds s = -levenshtein, runs affinity propagation, and emits
// clusters ordered by size descending.
std::vector<ManipulationCluster> cluster_manipulations(
    const std::vector<ManipulationEvidence>& evidence,
    const AffinityPropagationOptions& opts = {},
    size_t payload_cap = 16 * 1024);

// --- Header diffing -----------------------------------------------------------

// Per-name comparison of two canonicalized header lists; multi-valued headers
// compare as ordered value lists.
std::vector<HeaderDelta> header_diff(Direction direction, const HeaderList& baseline,
                                     const HeaderList& observed);

struct HeaderStatKey {
    Direction direction;
    std::string name;
    DeltaKind kind;

    auto operator<=>(const HeaderStatKey&) const = default;
};

struct HeaderStatRow {
    HeaderStatKey key;
    size_t endpoint_count = 0;
    double fraction = 0;  // distinct endpoints exhibiting / distinct endpoints probed
};

struct HeaderStats {
    size_t endpoints_probed = 0;
    std::vector<HeaderStatRow> rows;        // sorted by fraction desc, then key
    std::vector<HeaderStatRow> watch_list;  // set-cookie, access-control-allow-*, x-adblock-key

    std::vector<HeaderStatRow> top(size_t k) const;
};

// deltas: per-endpoint observations (an endpoint exhibiting a delta on many
// probes counts once). endpoints_probed is the denominator.
HeaderStats aggregate_header_stats(
    const std::vector<std::pair<ProxyEndpoint, HeaderDelta>>& deltas,
    size_t endpoints_probed);

}  // namespace proxaudit::analysis
