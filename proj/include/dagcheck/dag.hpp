#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dagcheck/rng.hpp"

namespace dagcheck {

using Edge = std::pair<int, int>;  // (from, to)

// Thrown when edge input contains a directed cycle; carries one witness
// cycle as a node sequence (first node repeated at the end).
struct CycleError : std::invalid_argument {
    std::vector<int> cycle;
    explicit CycleError(std::vector<int> cycle_nodes);
};

// Immutable labeled DAG over node indices 0..n-1. Construction validates
// index bounds, self-loops, duplicate edges, and acyclicity; all transforms
// return new values.
class Dag {
public:
    explicit Dag(int node_count, std::vector<Edge> edges = {},
                 std::vector<std::string> node_names = {});

    int node_count() const { return n_; }
    const std::vector<Edge>& edges() const { return edges_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    bool has_edge(int from, int to) const;
    bool adjacent(int a, int b) const { return has_edge(a, b) || has_edge(b, a); }

    const std::vector<int>& parents(int node) const;
    const std::vector<int>& children(int node) const;
    std::vector<int> ancestors(int node) const;    // strict: excludes node
    std::vector<int> descendants(int node) const;  // strict: excludes node
    std::vector<int> non_descendants(int node) const;

    // One valid topological order, deterministic for a given edge set.
    const std::vector<int>& topological_order() const { return topo_order_; }

    bool has_node_names() const { return !names_.empty(); }
    const std::vector<std::string>& node_names() const { return names_; }
    // Bound name, or the index rendered as a string when unnamed.
    std::string display_name(int node) const;

    Dag with_node_names(std::vector<std::string> names) const;

    friend bool operator==(const Dag& a, const Dag& b) {
        return a.n_ == b.n_ && a.edges_ == b.edges_ && a.names_ == b.names_;
    }

private:
    void check_node(int node) const;

    int n_ = 0;
    std::vector<Edge> edges_;  // sorted
    std::vector<std::vector<int>> parents_;
    std::vector<std::vector<int>> children_;
    std::vector<int> topo_order_;
    std::vector<std::string> names_;
};

// Bijection on node labels {0..n-1}; mapping[i] = pi(i).
struct NodePermutation {
    std::vector<int> mapping;

    static NodePermutation identity(int n);
    int size() const { return static_cast<int>(mapping.size()); }
    int operator()(int i) const { return mapping[static_cast<std::size_t>(i)]; }
    NodePermutation inverse() const;
    void validate() const;
};

// Graph-implied conditional independence X_i _||_ X_j | Z with Z the parent
// set of i in the source graph.
struct ParentalTriple {
    int i = 0;
    int j = 0;
    std::vector<int> z;  // sorted

    friend bool operator==(const ParentalTriple&, const ParentalTriple&) = default;
};

// True iff z d-separates i from j: every path between them is blocked.
// Reachability on the moralized ancestral subgraph.
bool d_separated(const Dag& g, int i, int j, const std::vector<int>& z);

// All triples (i, j in nd(i)\pa(i), pa(i)), sorted by i then j.
std::vector<ParentalTriple> parental_triples(const Dag& g);

// Graph with edge (i,j) iff (pi(i), pi(j)) is an edge of g. Node names stay
// bound to their indices.
Dag apply_permutation(const Dag& g, const NodePermutation& perm);

// Uniform draw from S_n (Fisher-Yates).
NodePermutation sample_permutation(int n, Rng& rng);

// Parental triples of g_perm whose independence statement is not a
// d-separation in g.
std::vector<ParentalTriple> v_tpa(const Dag& g_perm, const Dag& g);

// Same skeleton and same v-structures.
bool markov_equivalent(const Dag& g1, const Dag& g2);

// Structural Hamming distance: edge insertions + deletions + flips, with a
// flipped edge counted once.
int shd(const Dag& g1, const Dag& g2);

// Restriction of g to `keep` (ascending node indices); node k of the result
// is keep[k]. Used when dataset columns cover only part of a graph.
Dag induced_subgraph(const Dag& g, const std::vector<int>& keep);

// "X00".."Xnn" style names, zero-padded so lexicographic order matches index
// order.
std::vector<std::string> default_node_names(int n);

}  // namespace dagcheck
