#pragma once

#include <cstdint>

#include "dagcheck/dag.hpp"

namespace dagcheck {

// Node expert: knows every edge among a random node subset K of size
// round(knowledge_fraction * n); all other edges are re-drawn uniformly
// among pairs not both in K, keeping the edge count and acyclicity.
struct NodeExpertConfig {
    double knowledge_fraction = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

// Edge expert: adds n_add new edges (disjoint from the true edges and their
// flips), removes n_remove true edges, flips n_flip of the remaining ones.
// n_add == n_remove keeps the sparsity; the result is acyclic and has
// shd(result, g_true) == n_add + n_remove + n_flip exactly.
struct EdgeExpertConfig {
    int n_add = 0;
    int n_remove = 0;
    int n_flip = 0;
    std::uint64_t seed = 0;

    void validate() const;
};

Dag de_v(const Dag& g_true, const NodeExpertConfig& config);
Dag de_e(const Dag& g_true, const EdgeExpertConfig& config);

// Splits an SHD budget into an EdgeExpertConfig with n_add == n_remove,
// preferring equal thirds; throws if the budget is infeasible for the graph.
EdgeExpertConfig edge_expert_for_shd(const Dag& g_true, int shd_target, std::uint64_t seed);

}  // namespace dagcheck
