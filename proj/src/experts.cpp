#include "dagcheck/experts.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "dagcheck/rng.hpp"

namespace dagcheck {

namespace {

// True if adding from->to to `children` would close a directed cycle, i.e.
// `to` already reaches `from`.
bool creates_cycle(const std::vector<std::vector<int>>& children, int n, int from, int to) {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<int> stack{to};
    seen[static_cast<std::size_t>(to)] = 1;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        if (v == from) return true;
        for (int c : children[static_cast<std::size_t>(v)]) {
            if (!seen[static_cast<std::size_t>(c)]) {
                seen[static_cast<std::size_t>(c)] = 1;
                stack.push_back(c);
            }
        }
    }
    return false;
}

struct EdgeAccumulator {
    explicit EdgeAccumulator(int n) : n_(n), children_(static_cast<std::size_t>(n)) {}

    bool has(int from, int to) const { return edges_.count(Edge{from, to}) > 0; }
    bool would_cycle(int from, int to) const { return creates_cycle(children_, n_, from, to); }

    void add(int from, int to) {
        edges_.insert(Edge{from, to});
        children_[static_cast<std::size_t>(from)].push_back(to);
    }

    std::vector<Edge> edges() const { return {edges_.begin(), edges_.end()}; }

private:
    int n_;
    std::set<Edge> edges_;
    std::vector<std::vector<int>> children_;
};

std::vector<int> sample_subset(int n, int k, Rng& rng) {
    std::vector<int> all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), 0);
    rng.shuffle(all);
    std::vector<int> subset(all.begin(), all.begin() + k);
    std::sort(subset.begin(), subset.end());
    return subset;
}

}  // namespace

void NodeExpertConfig::validate() const {
    if (!(knowledge_fraction >= 0.0 && knowledge_fraction <= 1.0)) {
        throw std::invalid_argument("NodeExpertConfig: knowledge_fraction must be in [0,1]");
    }
}

void EdgeExpertConfig::validate() const {
    if (n_add < 0 || n_remove < 0 || n_flip < 0) {
        throw std::invalid_argument("EdgeExpertConfig: counts must be >= 0");
    }
    if (n_add != n_remove) {
        throw std::invalid_argument("EdgeExpertConfig: n_add must equal n_remove (sparsity preserved)");
    }
}

Dag de_v(const Dag& g_true, const NodeExpertConfig& config) {
    config.validate();
    const int n = g_true.node_count();
    const int k = static_cast<int>(std::lround(config.knowledge_fraction * n));

    for (int attempt = 0;; ++attempt) {
        Rng rng = Rng::derived(config.seed, static_cast<std::uint64_t>(attempt));
        const auto known = sample_subset(n, k, rng);
        std::vector<char> in_known(static_cast<std::size_t>(n), 0);
        for (int v : known) in_known[static_cast<std::size_t>(v)] = 1;

        EdgeAccumulator acc(n);
        int to_place = 0;
        for (const auto& [from, to] : g_true.edges()) {
            if (in_known[static_cast<std::size_t>(from)] && in_known[static_cast<std::size_t>(to)]) {
                acc.add(from, to);
            } else {
                ++to_place;
            }
        }

        // Re-draw the unknown edges uniformly among pairs not both in K,
        // rejecting duplicates and cycles. A placement always exists, so a
        // blown budget just restarts with the next sub-seed.
        const std::int64_t budget = 100LL * std::max(1, g_true.edge_count());
        std::int64_t draws = 0;
        int placed = 0;
        while (placed < to_place && draws < budget) {
            ++draws;
            const int a = rng.uniform_int(0, n - 1);
            const int b = rng.uniform_int(0, n - 1);
            if (a == b) continue;
            if (in_known[static_cast<std::size_t>(a)] && in_known[static_cast<std::size_t>(b)]) continue;
            if (acc.has(a, b) || acc.would_cycle(a, b)) continue;
            acc.add(a, b);
            ++placed;
        }
        if (placed == to_place) {
            return Dag(n, acc.edges(), g_true.node_names());
        }
        // else: retry budget exhausted; restart with a fresh sub-seed
    }
}

Dag de_e(const Dag& g_true, const EdgeExpertConfig& config) {
    config.validate();
    const int n = g_true.node_count();
    const auto& true_edges = g_true.edges();
    const int edge_count = g_true.edge_count();
    if (config.n_remove + config.n_flip > edge_count) {
        throw std::invalid_argument("de_e: n_remove + n_flip exceeds the edge count");
    }

    // Addition candidates: ordered pairs outside the true edges and their flips.
    std::vector<Edge> candidates;
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            if (a == b) continue;
            if (g_true.has_edge(a, b) || g_true.has_edge(b, a)) continue;
            candidates.emplace_back(a, b);
        }
    }
    if (config.n_add > static_cast<int>(candidates.size())) {
        throw std::invalid_argument("de_e: not enough candidate pairs for the requested additions");
    }

    for (int attempt = 0;; ++attempt) {
        Rng rng = Rng::derived(config.seed, static_cast<std::uint64_t>(attempt));

        // Removals first (they never create cycles), then flips and additions
        // with per-draw cycle rejection.
        std::vector<int> edge_order(static_cast<std::size_t>(edge_count));
        std::iota(edge_order.begin(), edge_order.end(), 0);
        rng.shuffle(edge_order);
        std::vector<char> removed(static_cast<std::size_t>(edge_count), 0);
        for (int k = 0; k < config.n_remove; ++k) {
            removed[static_cast<std::size_t>(edge_order[static_cast<std::size_t>(k)])] = 1;
        }
        std::vector<char> flipped(static_cast<std::size_t>(edge_count), 0);
        for (int k = 0; k < config.n_flip; ++k) {
            flipped[static_cast<std::size_t>(edge_order[static_cast<std::size_t>(config.n_remove + k)])] = 1;
        }

        EdgeAccumulator acc(n);
        for (int e = 0; e < edge_count; ++e) {
            if (removed[static_cast<std::size_t>(e)] || flipped[static_cast<std::size_t>(e)]) continue;
            acc.add(true_edges[static_cast<std::size_t>(e)].first, true_edges[static_cast<std::size_t>(e)].second);
        }

        const std::int64_t budget = 100LL * std::max({1, edge_count, config.n_add});
        std::int64_t draws = 0;
        bool ok = true;

        for (int e = 0; e < edge_count && ok; ++e) {
            if (!flipped[static_cast<std::size_t>(e)]) continue;
            const auto [from, to] = true_edges[static_cast<std::size_t>(e)];
            if (acc.would_cycle(to, from)) {
                ok = false;  // this flip set is cyclic; restart with a new draw
            } else {
                acc.add(to, from);
            }
        }

        int added = 0;
        while (ok && added < config.n_add) {
            if (++draws > budget) {
                ok = false;
                break;
            }
            const auto& [from, to] =
                candidates[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(candidates.size()) - 1))];
            if (acc.has(from, to) || acc.would_cycle(from, to)) continue;
            acc.add(from, to);
            ++added;
        }

        if (ok) {
            return Dag(n, acc.edges(), g_true.node_names());
        }
    }
}

EdgeExpertConfig edge_expert_for_shd(const Dag& g_true, int shd_target, std::uint64_t seed) {
    const int edges = g_true.edge_count();
    if (shd_target < 0 || shd_target > 2 * edges) {
        throw std::invalid_argument("edge_expert_for_shd: target must be in [0, 2 |E|]");
    }
    // shd = 2a + f with a additions (= removals) and f flips; equal thirds
    // unless the removal + flip budget forces more additions.
    int additions = std::max(shd_target / 3, shd_target - edges);
    int flips = shd_target - 2 * additions;
    EdgeExpertConfig config;
    config.n_add = additions;
    config.n_remove = additions;
    config.n_flip = flips;
    config.seed = seed;
    config.validate();
    return config;
}

}  // namespace dagcheck
