#pragma once

// Test-only oracles, deliberately independent of the library implementations
// they check: d-separation by exhaustive path enumeration, small-n DAG
// enumeration, and orbit enumeration.

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dagcheck/dag.hpp"
#include "dagcheck/rng.hpp"

namespace dagcheck::testing {

// A path is blocked by z iff it has a non-collider in z, or a collider whose
// descendant closure misses z. d-separated iff every undirected path between
// i and j is blocked.
inline bool dsep_bruteforce(const Dag& g, int i, int j, const std::vector<int>& z) {
    const int n = g.node_count();
    std::vector<char> in_z(static_cast<std::size_t>(n), 0);
    for (int v : z) in_z[static_cast<std::size_t>(v)] = 1;

    // Collider activation: the collider or any of its descendants is in z.
    std::vector<char> activated(static_cast<std::size_t>(n), 0);
    for (int v = 0; v < n; ++v) {
        if (in_z[static_cast<std::size_t>(v)]) continue;
        activated[static_cast<std::size_t>(v)] = 0;
        for (int d : g.descendants(v)) {
            if (in_z[static_cast<std::size_t>(d)]) {
                activated[static_cast<std::size_t>(v)] = 1;
                break;
            }
        }
    }
    for (int v : z) activated[static_cast<std::size_t>(v)] = 1;

    // Enumerate simple undirected paths from i to j by DFS, tracking edge
    // directions to classify interior nodes.
    std::vector<int> path{i};
    std::vector<char> on_path(static_cast<std::size_t>(n), 0);
    on_path[static_cast<std::size_t>(i)] = 1;
    std::vector<int> arrived_forward;  // arrived_forward[k]: edge into path[k+1] points forward

    auto path_unblocked = [&]() {
        for (std::size_t k = 1; k + 1 < path.size(); ++k) {
            const int node = path[k];
            const bool collider = arrived_forward[k - 1] && !arrived_forward[k];
            if (collider) {
                if (!activated[static_cast<std::size_t>(node)]) return false;
            } else {
                if (in_z[static_cast<std::size_t>(node)]) return false;
            }
        }
        return true;
    };

    bool found_open = false;
    auto dfs = [&](auto&& self, int v) -> void {
        if (found_open) return;
        if (v == j) {
            if (path_unblocked()) found_open = true;
            return;
        }
        for (int next = 0; next < n; ++next) {
            if (on_path[static_cast<std::size_t>(next)]) continue;
            const bool forward = g.has_edge(v, next);
            const bool backward = g.has_edge(next, v);
            if (!forward && !backward) continue;
            // A 2-cycle cannot occur in a DAG, so direction is unambiguous.
            path.push_back(next);
            on_path[static_cast<std::size_t>(next)] = 1;
            arrived_forward.push_back(forward);
            self(self, next);
            arrived_forward.pop_back();
            on_path[static_cast<std::size_t>(next)] = 0;
            path.pop_back();
        }
    };
    dfs(dfs, i);
    return !found_open;
}

// All labeled DAGs on n nodes: each unordered pair is absent, forward, or
// backward; cyclic combinations are skipped.
inline std::vector<Dag> enumerate_dags(int n) {
    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) pairs.emplace_back(a, b);
    }
    std::vector<Dag> dags;
    std::vector<int> choice(pairs.size(), 0);  // 0 none, 1 a->b, 2 b->a
    while (true) {
        std::vector<Edge> edges;
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            if (choice[k] == 1) edges.emplace_back(pairs[k].first, pairs[k].second);
            if (choice[k] == 2) edges.emplace_back(pairs[k].second, pairs[k].first);
        }
        try {
            dags.emplace_back(n, std::move(edges));
        } catch (const CycleError&) {
        }
        std::size_t k = 0;
        while (k < choice.size() && choice[k] == 2) choice[k++] = 0;
        if (k == choice.size()) break;
        ++choice[k];
    }
    return dags;
}

inline Dag random_dag(int n, double edge_probability, Rng& rng) {
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) order[static_cast<std::size_t>(k)] = k;
    rng.shuffle(order);
    std::vector<char> before(static_cast<std::size_t>(n * n), 0);
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            before[static_cast<std::size_t>(order[static_cast<std::size_t>(a)] * n +
                                            order[static_cast<std::size_t>(b)])] = 1;
        }
    }
    std::vector<Edge> edges;
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            if (a != b && before[static_cast<std::size_t>(a * n + b)] &&
                rng.uniform() < edge_probability) {
                edges.emplace_back(a, b);
            }
        }
    }
    return Dag(n, std::move(edges));
}

inline std::string edge_key(const Dag& g) {
    std::ostringstream out;
    for (const auto& [from, to] : g.edges()) out << from << ">" << to << ";";
    return out.str();
}

// Distinct graphs reachable from g by node permutations.
inline std::set<std::string> enumerate_orbit(const Dag& g) {
    std::set<std::string> orbit;
    auto perm = NodePermutation::identity(g.node_count());
    do {
        orbit.insert(edge_key(apply_permutation(g, perm)));
    } while (std::next_permutation(perm.mapping.begin(), perm.mapping.end()));
    return orbit;
}

// All subsets of {0..n-1} \ {i, j}, each sorted.
inline std::vector<std::vector<int>> conditioning_sets(int n, int i, int j) {
    std::vector<int> rest;
    for (int v = 0; v < n; ++v) {
        if (v != i && v != j) rest.push_back(v);
    }
    std::vector<std::vector<int>> subsets;
    const int count = 1 << rest.size();
    for (int mask = 0; mask < count; ++mask) {
        std::vector<int> subset;
        for (std::size_t k = 0; k < rest.size(); ++k) {
            if (mask & (1 << k)) subset.push_back(rest[k]);
        }
        subsets.push_back(std::move(subset));
    }
    return subsets;
}

}  // namespace dagcheck::testing
