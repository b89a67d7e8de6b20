#include "dagcheck/dag.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <sstream>

namespace dagcheck {

namespace {

std::string format_cycle(const std::vector<int>& cycle) {
    std::ostringstream out;
    out << "graph contains a cycle: ";
    for (std::size_t k = 0; k < cycle.size(); ++k) {
        if (k > 0) out << " -> ";
        out << cycle[k];
    }
    return out.str();
}

// DFS cycle search; returns one cycle (closed: front == back) if any exists.
std::vector<int> find_cycle(int n, const std::vector<std::vector<int>>& children) {
    std::vector<int> state(static_cast<std::size_t>(n), 0);  // 0 new, 1 on stack, 2 done
    std::vector<int> stack, cycle;

    auto dfs = [&](auto&& self, int v) -> bool {
        state[static_cast<std::size_t>(v)] = 1;
        stack.push_back(v);
        for (int c : children[static_cast<std::size_t>(v)]) {
            if (state[static_cast<std::size_t>(c)] == 1) {
                auto it = std::find(stack.begin(), stack.end(), c);
                cycle.assign(it, stack.end());
                cycle.push_back(c);
                return true;
            }
            if (state[static_cast<std::size_t>(c)] == 0 && self(self, c)) return true;
        }
        stack.pop_back();
        state[static_cast<std::size_t>(v)] = 2;
        return false;
    };

    for (int v = 0; v < n; ++v) {
        if (state[static_cast<std::size_t>(v)] == 0 && dfs(dfs, v)) return cycle;
    }
    return {};
}

}  // namespace

CycleError::CycleError(std::vector<int> cycle_nodes)
    : std::invalid_argument(format_cycle(cycle_nodes)), cycle(std::move(cycle_nodes)) {}

Dag::Dag(int node_count, std::vector<Edge> edges, std::vector<std::string> node_names)
    : n_(node_count), edges_(std::move(edges)), names_(std::move(node_names)) {
    if (n_ < 1) throw std::invalid_argument("Dag: node count must be >= 1");
    if (!names_.empty()) {
        if (static_cast<int>(names_.size()) != n_) {
            throw std::invalid_argument("Dag: node_names size must match node count");
        }
        std::set<std::string> distinct(names_.begin(), names_.end());
        if (static_cast<int>(distinct.size()) != n_ ||
            std::any_of(names_.begin(), names_.end(), [](const std::string& s) { return s.empty(); })) {
            throw std::invalid_argument("Dag: node names must be distinct and non-empty");
        }
    }

    std::sort(edges_.begin(), edges_.end());
    for (std::size_t k = 0; k < edges_.size(); ++k) {
        const auto [from, to] = edges_[k];
        if (from < 0 || from >= n_ || to < 0 || to >= n_) {
            throw std::invalid_argument("Dag: edge endpoint out of range");
        }
        if (from == to) throw std::invalid_argument("Dag: self-loops are not allowed");
        if (k > 0 && edges_[k] == edges_[k - 1]) {
            throw std::invalid_argument("Dag: duplicate edge");
        }
    }

    parents_.assign(static_cast<std::size_t>(n_), {});
    children_.assign(static_cast<std::size_t>(n_), {});
    for (const auto& [from, to] : edges_) {
        parents_[static_cast<std::size_t>(to)].push_back(from);
        children_[static_cast<std::size_t>(from)].push_back(to);
    }
    // edges_ is sorted, so children lists are sorted; parent lists need it.
    for (auto& p : parents_) std::sort(p.begin(), p.end());

    auto cycle = find_cycle(n_, children_);
    if (!cycle.empty()) throw CycleError(std::move(cycle));

    // Kahn with a min-heap: deterministic, lowest index first among ready nodes.
    std::vector<int> indegree(static_cast<std::size_t>(n_));
    for (int v = 0; v < n_; ++v) indegree[static_cast<std::size_t>(v)] = static_cast<int>(parents_[static_cast<std::size_t>(v)].size());
    std::priority_queue<int, std::vector<int>, std::greater<>> ready;
    for (int v = 0; v < n_; ++v) {
        if (indegree[static_cast<std::size_t>(v)] == 0) ready.push(v);
    }
    topo_order_.reserve(static_cast<std::size_t>(n_));
    while (!ready.empty()) {
        const int v = ready.top();
        ready.pop();
        topo_order_.push_back(v);
        for (int c : children_[static_cast<std::size_t>(v)]) {
            if (--indegree[static_cast<std::size_t>(c)] == 0) ready.push(c);
        }
    }
}

void Dag::check_node(int node) const {
    if (node < 0 || node >= n_) throw std::out_of_range("Dag: node index out of range");
}

bool Dag::has_edge(int from, int to) const {
    check_node(from);
    check_node(to);
    const auto& kids = children_[static_cast<std::size_t>(from)];
    return std::binary_search(kids.begin(), kids.end(), to);
}

const std::vector<int>& Dag::parents(int node) const {
    check_node(node);
    return parents_[static_cast<std::size_t>(node)];
}

const std::vector<int>& Dag::children(int node) const {
    check_node(node);
    return children_[static_cast<std::size_t>(node)];
}

std::vector<int> Dag::descendants(int node) const {
    check_node(node);
    std::vector<char> seen(static_cast<std::size_t>(n_), 0);
    std::vector<int> queue{node};
    seen[static_cast<std::size_t>(node)] = 1;
    while (!queue.empty()) {
        const int v = queue.back();
        queue.pop_back();
        for (int c : children_[static_cast<std::size_t>(v)]) {
            if (!seen[static_cast<std::size_t>(c)]) {
                seen[static_cast<std::size_t>(c)] = 1;
                queue.push_back(c);
            }
        }
    }
    std::vector<int> out;
    for (int v = 0; v < n_; ++v) {
        if (v != node && seen[static_cast<std::size_t>(v)]) out.push_back(v);
    }
    return out;
}

std::vector<int> Dag::ancestors(int node) const {
    check_node(node);
    std::vector<char> seen(static_cast<std::size_t>(n_), 0);
    std::vector<int> queue{node};
    seen[static_cast<std::size_t>(node)] = 1;
    while (!queue.empty()) {
        const int v = queue.back();
        queue.pop_back();
        for (int p : parents_[static_cast<std::size_t>(v)]) {
            if (!seen[static_cast<std::size_t>(p)]) {
                seen[static_cast<std::size_t>(p)] = 1;
                queue.push_back(p);
            }
        }
    }
    std::vector<int> out;
    for (int v = 0; v < n_; ++v) {
        if (v != node && seen[static_cast<std::size_t>(v)]) out.push_back(v);
    }
    return out;
}

std::vector<int> Dag::non_descendants(int node) const {
    check_node(node);
    const auto desc = descendants(node);
    std::vector<char> is_desc(static_cast<std::size_t>(n_), 0);
    for (int d : desc) is_desc[static_cast<std::size_t>(d)] = 1;
    std::vector<int> out;
    for (int v = 0; v < n_; ++v) {
        if (v != node && !is_desc[static_cast<std::size_t>(v)]) out.push_back(v);
    }
    return out;
}

std::string Dag::display_name(int node) const {
    check_node(node);
    if (has_node_names()) return names_[static_cast<std::size_t>(node)];
    return std::to_string(node);
}

Dag Dag::with_node_names(std::vector<std::string> names) const {
    return Dag(n_, edges_, std::move(names));
}

NodePermutation NodePermutation::identity(int n) {
    NodePermutation p;
    p.mapping.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) p.mapping[static_cast<std::size_t>(i)] = i;
    return p;
}

NodePermutation NodePermutation::inverse() const {
    NodePermutation inv;
    inv.mapping.assign(mapping.size(), -1);
    for (std::size_t i = 0; i < mapping.size(); ++i) {
        inv.mapping[static_cast<std::size_t>(mapping[i])] = static_cast<int>(i);
    }
    return inv;
}

void NodePermutation::validate() const {
    const int n = size();
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (int v : mapping) {
        if (v < 0 || v >= n || seen[static_cast<std::size_t>(v)]) {
            throw std::invalid_argument("NodePermutation: mapping is not a bijection");
        }
        seen[static_cast<std::size_t>(v)] = 1;
    }
}

bool d_separated(const Dag& g, int i, int j, const std::vector<int>& z) {
    const int n = g.node_count();
    auto check = [n](int v) {
        if (v < 0 || v >= n) throw std::out_of_range("d_separated: node index out of range");
    };
    check(i);
    check(j);
    for (int v : z) check(v);
    if (i == j) throw std::invalid_argument("d_separated: i and j must differ");
    std::vector<char> in_z(static_cast<std::size_t>(n), 0);
    for (int v : z) in_z[static_cast<std::size_t>(v)] = 1;
    if (in_z[static_cast<std::size_t>(i)] || in_z[static_cast<std::size_t>(j)]) {
        throw std::invalid_argument("d_separated: i and j must not be in z");
    }

    // Ancestral closure of {i, j} u z.
    std::vector<char> relevant(static_cast<std::size_t>(n), 0);
    std::vector<int> queue;
    auto add = [&](int v) {
        if (!relevant[static_cast<std::size_t>(v)]) {
            relevant[static_cast<std::size_t>(v)] = 1;
            queue.push_back(v);
        }
    };
    add(i);
    add(j);
    for (int v : z) add(v);
    while (!queue.empty()) {
        const int v = queue.back();
        queue.pop_back();
        for (int p : g.parents(v)) add(p);
    }

    // Moralize: undirected edges for parent->child plus marriages between
    // co-parents, restricted to the ancestral set.
    std::vector<std::vector<int>> moral(static_cast<std::size_t>(n));
    auto link = [&](int a, int b) {
        moral[static_cast<std::size_t>(a)].push_back(b);
        moral[static_cast<std::size_t>(b)].push_back(a);
    };
    for (int v = 0; v < n; ++v) {
        if (!relevant[static_cast<std::size_t>(v)]) continue;
        const auto& pa = g.parents(v);
        for (std::size_t a = 0; a < pa.size(); ++a) {
            link(pa[a], v);
            for (std::size_t b = a + 1; b < pa.size(); ++b) link(pa[a], pa[b]);
        }
    }

    // BFS from i avoiding z.
    std::vector<char> visited(static_cast<std::size_t>(n), 0);
    visited[static_cast<std::size_t>(i)] = 1;
    queue.assign(1, i);
    while (!queue.empty()) {
        const int v = queue.back();
        queue.pop_back();
        if (v == j) return false;
        for (int w : moral[static_cast<std::size_t>(v)]) {
            if (!visited[static_cast<std::size_t>(w)] && !in_z[static_cast<std::size_t>(w)]) {
                visited[static_cast<std::size_t>(w)] = 1;
                queue.push_back(w);
            }
        }
    }
    return true;
}

std::vector<ParentalTriple> parental_triples(const Dag& g) {
    std::vector<ParentalTriple> triples;
    for (int i = 0; i < g.node_count(); ++i) {
        const auto& pa = g.parents(i);
        for (int j : g.non_descendants(i)) {
            if (std::binary_search(pa.begin(), pa.end(), j)) continue;
            triples.push_back(ParentalTriple{i, j, pa});
        }
    }
    return triples;
}

Dag apply_permutation(const Dag& g, const NodePermutation& perm) {
    if (perm.size() != g.node_count()) {
        throw std::invalid_argument("apply_permutation: permutation size mismatch");
    }
    perm.validate();
    const auto inv = perm.inverse();
    std::vector<Edge> edges;
    edges.reserve(g.edges().size());
    for (const auto& [from, to] : g.edges()) {
        edges.emplace_back(inv(from), inv(to));
    }
    return Dag(g.node_count(), std::move(edges), g.node_names());
}

NodePermutation sample_permutation(int n, Rng& rng) {
    if (n < 1) throw std::invalid_argument("sample_permutation: n must be >= 1");
    auto perm = NodePermutation::identity(n);
    rng.shuffle(perm.mapping);
    return perm;
}

std::vector<ParentalTriple> v_tpa(const Dag& g_perm, const Dag& g) {
    if (g_perm.node_count() != g.node_count()) {
        throw std::invalid_argument("v_tpa: node count mismatch");
    }
    std::vector<ParentalTriple> violations;
    for (auto& triple : parental_triples(g_perm)) {
        if (!d_separated(g, triple.i, triple.j, triple.z)) {
            violations.push_back(std::move(triple));
        }
    }
    return violations;
}

namespace {

// Unshielded colliders a -> c <- b (a < b, a and b non-adjacent).
std::vector<std::tuple<int, int, int>> v_structures(const Dag& g) {
    std::vector<std::tuple<int, int, int>> out;
    for (int c = 0; c < g.node_count(); ++c) {
        const auto& pa = g.parents(c);
        for (std::size_t x = 0; x < pa.size(); ++x) {
            for (std::size_t y = x + 1; y < pa.size(); ++y) {
                if (!g.adjacent(pa[x], pa[y])) out.emplace_back(pa[x], pa[y], c);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

bool markov_equivalent(const Dag& g1, const Dag& g2) {
    if (g1.node_count() != g2.node_count()) {
        throw std::invalid_argument("markov_equivalent: node count mismatch");
    }
    std::vector<Edge> skel1, skel2;
    for (const auto& [a, b] : g1.edges()) skel1.emplace_back(std::min(a, b), std::max(a, b));
    for (const auto& [a, b] : g2.edges()) skel2.emplace_back(std::min(a, b), std::max(a, b));
    std::sort(skel1.begin(), skel1.end());
    std::sort(skel2.begin(), skel2.end());
    if (skel1 != skel2) return false;
    return v_structures(g1) == v_structures(g2);
}

int shd(const Dag& g1, const Dag& g2) {
    if (g1.node_count() != g2.node_count()) {
        throw std::invalid_argument("shd: node count mismatch");
    }
    int distance = 0;
    for (int a = 0; a < g1.node_count(); ++a) {
        for (int b = a + 1; b < g1.node_count(); ++b) {
            const int s1 = g1.has_edge(a, b) ? 1 : (g1.has_edge(b, a) ? 2 : 0);
            const int s2 = g2.has_edge(a, b) ? 1 : (g2.has_edge(b, a) ? 2 : 0);
            if (s1 != s2) ++distance;  // insertion, deletion, or flip, each once
        }
    }
    return distance;
}

Dag induced_subgraph(const Dag& g, const std::vector<int>& keep) {
    if (!std::is_sorted(keep.begin(), keep.end()) ||
        std::adjacent_find(keep.begin(), keep.end()) != keep.end()) {
        throw std::invalid_argument("induced_subgraph: keep must be sorted and distinct");
    }
    std::vector<int> new_index(static_cast<std::size_t>(g.node_count()), -1);
    for (std::size_t k = 0; k < keep.size(); ++k) {
        const int v = keep[k];
        if (v < 0 || v >= g.node_count()) throw std::out_of_range("induced_subgraph: node out of range");
        new_index[static_cast<std::size_t>(v)] = static_cast<int>(k);
    }
    std::vector<Edge> edges;
    for (const auto& [from, to] : g.edges()) {
        const int nf = new_index[static_cast<std::size_t>(from)];
        const int nt = new_index[static_cast<std::size_t>(to)];
        if (nf >= 0 && nt >= 0) edges.emplace_back(nf, nt);
    }
    std::vector<std::string> names;
    if (g.has_node_names()) {
        names.reserve(keep.size());
        for (int v : keep) names.push_back(g.node_names()[static_cast<std::size_t>(v)]);
    }
    return Dag(static_cast<int>(keep.size()), std::move(edges), std::move(names));
}

std::vector<std::string> default_node_names(int n) {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(n));
    int width = 1;
    for (int v = n - 1; v >= 10; v /= 10) ++width;
    for (int k = 0; k < n; ++k) {
        std::string digits = std::to_string(k);
        names.push_back("X" + std::string(static_cast<std::size_t>(width) - digits.size(), '0') + digits);
    }
    return names;
}

}  // namespace dagcheck
