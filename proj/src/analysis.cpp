#include "proxaudit/analysis.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace proxaudit::analysis {

std::vector<std::string_view> tokenize(std::string_view bytes) {
    std::vector<std::string_view> tokens;
    size_t i = 0;
    while (i < bytes.size()) {
        while (i < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[i]))) ++i;
        size_t start = i;
        while (i < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[i]))) ++i;
        if (i > start) tokens.push_back(bytes.substr(start, i - start));
    }
    return tokens;
}

// LCS length over token sequences, rolling-row DP.
static size_t lcs_length(const std::vector<std::string_view>& a,
                         const std::vector<std::string_view>& b) {
    if (a.empty() || b.empty()) return 0;
    const auto& shorter = a.size() <= b.size() ? a : b;
    const auto& longer = a.size() <= b.size() ? b : a;
    std::vector<size_t> prev(shorter.size() + 1, 0), cur(shorter.size() + 1, 0);
    for (size_t i = 1; i <= longer.size(); ++i) {
        for (size_t j = 1; j <= shorter.size(); ++j) {
            if (longer[i - 1] == shorter[j - 1])
                cur[j] = prev[j - 1] + 1;
            else
                cur[j] = std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[shorter.size()];
}

double similarity_score(std::string_view expected, std::string_view received) {
    auto te = tokenize(expected);
    auto tr = tokenize(received);
    if (te.empty() && tr.empty()) return 1.0;
    if (te.empty() || tr.empty()) return 0.0;
    return static_cast<double>(lcs_length(te, tr)) /
           static_cast<double>(std::max(te.size(), tr.size()));
}

size_t levenshtein(std::string_view a, std::string_view b) {
    if (a.size() > b.size()) std::swap(a, b);
    std::vector<size_t> prev(a.size() + 1), cur(a.size() + 1);
    for (size_t j = 0; j <= a.size(); ++j) prev[j] = j;
    for (size_t i = 1; i <= b.size(); ++i) {
        cur[0] = i;
        for (size_t j = 1; j <= a.size(); ++j) {
            size_t sub = prev[j - 1] + (a[j - 1] == b[i - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[a.size()];
}

SimilarityMatrix SimilarityMatrix::from_similarities(std::vector<double> values, size_t n) {
    if (values.size() != n * n) throw std::invalid_argument("similarity matrix size mismatch");
    SimilarityMatrix m;
    m.n = n;
    m.s = std::move(values);
    std::vector<double> off;
    off.reserve(n * n);
    for (size_t i = 0; i < n; ++i)
        for (size_t k = 0; k < n; ++k)
            if (i != k) off.push_back(m.s[i * n + k]);
    if (off.empty()) {
        m.preference = 0;
    } else {
        std::sort(off.begin(), off.end());
        size_t mid = off.size() / 2;
        m.preference = off.size() % 2 ? off[mid] : (off[mid - 1] + off[mid]) / 2.0;
    }
    return m;
}

ClusterAssignment affinity_propagation(const SimilarityMatrix& sm,
                                       const AffinityPropagationOptions& opts) {
    const size_t n = sm.n;
    if (n == 0) throw std::invalid_argument("affinity_propagation: empty input");
    if (!(opts.damping > 0.0 && opts.damping < 1.0))
        throw std::invalid_argument("affinity_propagation: damping must be in (0,1)");

    // Effective similarity with the diagonal set to the preference.
    std::vector<double> s(sm.s);
    for (size_t k = 0; k < n; ++k) s[k * n + k] = sm.preference;

    std::vector<double> r(n * n, 0.0), a(n * n, 0.0);
    const double lam = opts.damping;

    std::set<size_t> stable_exemplars;
    size_t stable_count = 0;
    size_t iter = 0;
    bool converged = false;

    for (iter = 1; iter <= opts.max_iters; ++iter) {
        // Responsibilities: r(i,k) = s(i,k) - max_{k' != k} (a(i,k') + s(i,k')).
        for (size_t i = 0; i < n; ++i) {
            // Track the two largest a+s values on row i so the max excluding k
            // is O(1) per cell.
            double best = -std::numeric_limits<double>::infinity();
            double second = best;
            size_t best_k = 0;
            for (size_t k = 0; k < n; ++k) {
                double v = a[i * n + k] + s[i * n + k];
                if (v > best) {
                    second = best;
                    best = v;
                    best_k = k;
                } else if (v > second) {
                    second = v;
                }
            }
            for (size_t k = 0; k < n; ++k) {
                double competing = (k == best_k) ? second : best;
                double computed = s[i * n + k] - competing;
                r[i * n + k] = lam * r[i * n + k] + (1 - lam) * computed;
            }
        }
        // Availabilities.
        for (size_t k = 0; k < n; ++k) {
            double pos_sum = 0;
            for (size_t i = 0; i < n; ++i)
                if (i != k) pos_sum += std::max(0.0, r[i * n + k]);
            for (size_t i = 0; i < n; ++i) {
                double computed;
                if (i == k) {
                    computed = pos_sum;
                } else {
                    double without_i = pos_sum - std::max(0.0, r[i * n + k]);
                    computed = std::min(0.0, r[k * n + k] + without_i);
                }
                a[i * n + k] = lam * a[i * n + k] + (1 - lam) * computed;
            }
        }

        std::set<size_t> exemplars;
        for (size_t k = 0; k < n; ++k)
            if (r[k * n + k] + a[k * n + k] > 0) exemplars.insert(k);
        if (exemplars == stable_exemplars && !exemplars.empty()) {
            if (++stable_count >= opts.convergence_iters) {
                converged = true;
                break;
            }
        } else {
            stable_exemplars = std::move(exemplars);
            stable_count = 0;
        }
    }

    std::set<size_t> exemplars;
    for (size_t k = 0; k < n; ++k)
        if (r[k * n + k] + a[k * n + k] > 0) exemplars.insert(k);
    if (exemplars.empty()) {
        // Degenerate symmetric inputs settle at r+a == 0 for every point; the
        // strict tie-break then leaves no exemplar. Fall back to the single
        // best candidate (lowest index wins ties).
        size_t best = 0;
        double best_v = -std::numeric_limits<double>::infinity();
        for (size_t k = 0; k < n; ++k) {
            double v = r[k * n + k] + a[k * n + k];
            if (v > best_v) {
                best_v = v;
                best = k;
            }
        }
        exemplars.insert(best);
        converged = false;
    }

    ClusterAssignment out;
    out.converged = converged;
    out.iterations = std::min(iter, opts.max_iters);
    out.exemplar_of.resize(n);
    for (size_t i = 0; i < n; ++i) {
        if (exemplars.count(i)) {
            out.exemplar_of[i] = i;
            continue;
        }
        size_t best = *exemplars.begin();
        double best_s = -std::numeric_limits<double>::infinity();
        for (size_t k : exemplars) {
            if (s[i * n + k] > best_s) {
                best_s = s[i * n + k];
                best = k;
            }
        }
        out.exemplar_of[i] = best;
    }
    for (size_t i = 0; i < n; ++i) out.clusters[out.exemplar_of[i]].push_back(i);
    return out;
}

double net_similarity(const SimilarityMatrix& sm, const std::vector<size_t>& exemplar_of) {
    double total = 0;
    for (size_t i = 0; i < exemplar_of.size(); ++i) {
        if (exemplar_of[i] == i)
            total += sm.preference;
        else
            total += sm.at(i, exemplar_of[i]);
    }
    return total;
}

std::vector<ManipulationCluster> cluster_manipulations(
    const std::vector<ManipulationEvidence>& evidence,
    const AffinityPropagationOptions& opts, size_t payload_cap) {
    if (evidence.empty()) return {};

    // Dedup payloads; remember which endpoints/records carry each one.
    std::vector<std::string> payloads;
    std::unordered_map<std::string, size_t> index;
    std::vector<std::vector<ProxyEndpoint>> endpoints_by_payload;
    std::vector<size_t> instances_by_payload;
    for (const auto& ev : evidence) {
        std::string p = ev.payload.substr(0, payload_cap);
        auto [it, inserted] = index.emplace(p, payloads.size());
        if (inserted) {
            payloads.push_back(std::move(p));
            endpoints_by_payload.emplace_back();
            instances_by_payload.push_back(0);
        }
        auto& eps = endpoints_by_payload[it->second];
        if (std::find(eps.begin(), eps.end(), ev.endpoint) == eps.end())
            eps.push_back(ev.endpoint);
        ++instances_by_payload[it->second];
    }

    const size_t n = payloads.size();
    std::vector<double> s(n * n, 0.0);
    for (size_t i = 0; i < n; ++i)
        for (size_t k = i + 1; k < n; ++k) {
            double d = -static_cast<double>(levenshtein(payloads[i], payloads[k]));
            s[i * n + k] = d;
            s[k * n + i] = d;
        }
    auto sm = SimilarityMatrix::from_similarities(std::move(s), n);
    auto assignment = affinity_propagation(sm, opts);

    std::vector<ManipulationCluster> clusters;
    for (const auto& [exemplar, members] : assignment.clusters) {
        ManipulationCluster c;
        c.exemplar_payload = payloads[exemplar];
        c.size = members.size();
        for (size_t m : members) {
            c.member_payloads.push_back(payloads[m]);
            c.instance_count += instances_by_payload[m];
            for (const auto& ep : endpoints_by_payload[m]) {
                if (std::find(c.member_endpoints.begin(), c.member_endpoints.end(), ep) ==
                    c.member_endpoints.end())
                    c.member_endpoints.push_back(ep);
            }
        }
        clusters.push_back(std::move(c));
    }
    std::stable_sort(clusters.begin(), clusters.end(),
                     [](const auto& a, const auto& b) { return a.size > b.size; });
    return clusters;
}

std::vector<HeaderDelta> header_diff(Direction direction, const HeaderList& baseline,
                                     const HeaderList& observed) {
    // Group into ordered value lists per name, preserving first-seen order.
    auto group = [](const HeaderList& list) {
        std::vector<std::pair<std::string, std::vector<std::string>>> out;
        std::unordered_map<std::string, size_t> idx;
        for (const auto& h : list) {
            auto [it, inserted] = idx.emplace(h.name, out.size());
            if (inserted) out.push_back({h.name, {}});
            out[it->second].second.push_back(h.value);
        }
        return out;
    };
    auto joined = [](const std::vector<std::string>& values) {
        std::string out;
        for (size_t i = 0; i < values.size(); ++i) {
            if (i) out += ", ";
            out += values[i];
        }
        return out;
    };

    auto base = group(baseline);
    auto obs = group(observed);
    std::unordered_map<std::string, const std::vector<std::string>*> obs_map;
    for (const auto& [name, values] : obs) obs_map[name] = &values;

    std::vector<HeaderDelta> deltas;
    for (const auto& [name, base_values] : base) {
        auto it = obs_map.find(name);
        if (it == obs_map.end()) {
            deltas.push_back({direction, name, DeltaKind::Removed, joined(base_values), std::nullopt});
        } else if (*it->second != base_values) {
            deltas.push_back(
                {direction, name, DeltaKind::Modified, joined(base_values), joined(*it->second)});
        }
    }
    std::unordered_map<std::string, bool> in_base;
    for (const auto& [name, values] : base) in_base[name] = true;
    for (const auto& [name, values] : obs) {
        if (!in_base.count(name))
            deltas.push_back({direction, name, DeltaKind::Added, std::nullopt, joined(values)});
    }
    return deltas;
}

static bool watch_listed(const std::string& name) {
    return name == "set-cookie" || name == "x-adblock-key" ||
           name.rfind("access-control-allow-", 0) == 0;
}

std::vector<HeaderStatRow> HeaderStats::top(size_t k) const {
    std::vector<HeaderStatRow> out(rows.begin(), rows.begin() + std::min(k, rows.size()));
    return out;
}

HeaderStats aggregate_header_stats(
    const std::vector<std::pair<ProxyEndpoint, HeaderDelta>>& deltas,
    size_t endpoints_probed) {
    std::map<HeaderStatKey, std::set<uint64_t>> seen;
    for (const auto& [endpoint, delta] : deltas)
        seen[{delta.direction, delta.name, delta.kind}].insert(endpoint.key());

    HeaderStats stats;
    stats.endpoints_probed = endpoints_probed;
    for (const auto& [key, endpoints] : seen) {
        HeaderStatRow row;
        row.key = key;
        row.endpoint_count = endpoints.size();
        row.fraction = endpoints_probed == 0
                           ? 0.0
                           : static_cast<double>(endpoints.size()) / endpoints_probed;
        if (watch_listed(key.name)) stats.watch_list.push_back(row);
        stats.rows.push_back(row);
    }
    std::stable_sort(stats.rows.begin(), stats.rows.end(), [](const auto& a, const auto& b) {
        if (a.fraction != b.fraction) return a.fraction > b.fraction;
        return a.key < b.key;
    });
    std::stable_sort(stats.watch_list.begin(), stats.watch_list.end(),
                     [](const auto& a, const auto& b) {
                         if (a.fraction != b.fraction) return a.fraction > b.fraction;
                         return a.key < b.key;
                     });
    return stats;
}

}  // namespace proxaudit::analysis
