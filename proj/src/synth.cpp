#include "dagcheck/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

namespace dagcheck {

std::string_view to_string(Mechanism m) {
    switch (m) {
        case Mechanism::linear: return "linear";
        case Mechanism::mlp: return "mlp";
    }
    throw std::logic_error("unknown Mechanism");
}

Mechanism mechanism_from_string(std::string_view name) {
    if (name == "linear") return Mechanism::linear;
    if (name == "mlp") return Mechanism::mlp;
    throw std::invalid_argument("unknown mechanism: " + std::string(name));
}

std::string_view to_string(NoiseKind k) {
    switch (k) {
        case NoiseKind::gaussian: return "gaussian";
        case NoiseKind::uniform: return "uniform";
        case NoiseKind::gaussian_mixture: return "gaussian_mixture";
    }
    throw std::logic_error("unknown NoiseKind");
}

NoiseKind noise_kind_from_string(std::string_view name) {
    if (name == "gaussian") return NoiseKind::gaussian;
    if (name == "uniform") return NoiseKind::uniform;
    if (name == "gaussian_mixture") return NoiseKind::gaussian_mixture;
    throw std::invalid_argument("unknown noise kind: " + std::string(name));
}

void NoiseSpec::validate() const {
    switch (kind) {
        case NoiseKind::gaussian:
            if (!(variance >= 0.0)) throw std::invalid_argument("NoiseSpec: variance must be >= 0");
            return;
        case NoiseKind::uniform:
            if (!(lo <= hi)) throw std::invalid_argument("NoiseSpec: uniform bounds out of order");
            return;
        case NoiseKind::gaussian_mixture: {
            if (components.empty()) {
                throw std::invalid_argument("NoiseSpec: mixture needs at least one component");
            }
            double total = 0.0;
            for (const auto& c : components) {
                if (!(c.weight > 0.0) || !(c.sd >= 0.0)) {
                    throw std::invalid_argument("NoiseSpec: invalid mixture component");
                }
                total += c.weight;
            }
            if (std::abs(total - 1.0) > 1e-9) {
                throw std::invalid_argument("NoiseSpec: mixture weights must sum to 1");
            }
            return;
        }
    }
    throw std::logic_error("unknown NoiseKind");
}

void ScmSpec::validate() const {
    noise.validate();
    if (!(weight_lo <= weight_hi)) {
        throw std::invalid_argument("ScmSpec: weight range out of order");
    }
    if (mlp.layers != 3 || mlp.width_lo < 2 || mlp.width_hi < mlp.width_lo ||
        !(mlp.weight_lo <= mlp.weight_hi)) {
        throw std::invalid_argument("ScmSpec: invalid MLP configuration");
    }
}

Dag er_dag(int n, double expected_degree, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("er_dag: n must be >= 1");
    if (expected_degree < 0.0) throw std::invalid_argument("er_dag: expected degree must be >= 0");
    if (n > 1 && expected_degree > static_cast<double>(n - 1)) {
        throw std::invalid_argument("er_dag: expected degree must be <= n - 1");
    }

    Rng rng(seed);
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    std::vector<int> position(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) position[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = k;

    const double p = n > 1 ? expected_degree / static_cast<double>(n - 1) : 0.0;
    std::vector<Edge> edges;
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            if (rng.uniform() < p) {
                if (position[static_cast<std::size_t>(a)] < position[static_cast<std::size_t>(b)]) {
                    edges.emplace_back(a, b);
                } else {
                    edges.emplace_back(b, a);
                }
            }
        }
    }
    return Dag(n, std::move(edges));
}

std::vector<double> sample_noise(const NoiseSpec& spec, int count, Rng& rng) {
    spec.validate();
    if (count < 0) throw std::invalid_argument("sample_noise: count must be >= 0");
    std::vector<double> draws(static_cast<std::size_t>(count));
    switch (spec.kind) {
        case NoiseKind::gaussian: {
            const double sd = std::sqrt(spec.variance);
            for (auto& d : draws) d = rng.normal(spec.mean, sd);
            break;
        }
        case NoiseKind::uniform:
            for (auto& d : draws) d = rng.uniform(spec.lo, spec.hi);
            break;
        case NoiseKind::gaussian_mixture: {
            for (auto& d : draws) {
                double u = rng.uniform();
                const MixtureComponent* chosen = &spec.components.back();
                for (const auto& c : spec.components) {
                    if (u < c.weight) {
                        chosen = &c;
                        break;
                    }
                    u -= c.weight;
                }
                d = rng.normal(chosen->mean, chosen->sd);
            }
            break;
        }
    }
    return draws;
}

namespace {

std::vector<std::string> column_names_for(const Dag& g) {
    return g.has_node_names() ? g.node_names() : default_node_names(g.node_count());
}

Eigen::VectorXd noise_column(const ScmSpec& spec, int samples, int node) {
    // Per-node streams so a column depends only on (seed, node, N).
    Rng rng = Rng::derived(spec.seed, 0x4e000000ULL + static_cast<std::uint64_t>(node));
    const auto draws = sample_noise(spec.noise, samples, rng);
    return Eigen::Map<const Eigen::VectorXd>(draws.data(), samples);
}

}  // namespace

Dataset sample_linear(const ScmSpec& spec, int samples) {
    spec.validate();
    if (spec.mechanism != Mechanism::linear) {
        throw std::invalid_argument("sample_linear: spec mechanism is not linear");
    }
    if (samples < 1) throw std::invalid_argument("sample_linear: samples must be >= 1");

    const Dag& g = spec.graph;
    // Edge weights in sorted-edge order, fixed by the spec seed.
    Rng weight_rng = Rng::derived(spec.seed, 0x57000000ULL);
    std::vector<double> weight(g.edges().size());
    for (auto& w : weight) w = weight_rng.uniform(spec.weight_lo, spec.weight_hi);
    auto edge_weight = [&](int from, int to) {
        const auto it = std::lower_bound(g.edges().begin(), g.edges().end(), Edge{from, to});
        return weight[static_cast<std::size_t>(it - g.edges().begin())];
    };

    Eigen::MatrixXd values(samples, g.node_count());
    for (int node : g.topological_order()) {
        Eigen::VectorXd column = noise_column(spec, samples, node);
        for (int parent : g.parents(node)) {
            column += edge_weight(parent, node) * values.col(parent);
        }
        values.col(node) = column;
    }
    return Dataset(std::move(values), column_names_for(g));
}

Dataset sample_mlp(const ScmSpec& spec, int samples) {
    spec.validate();
    if (spec.mechanism != Mechanism::mlp) {
        throw std::invalid_argument("sample_mlp: spec mechanism is not mlp");
    }
    if (samples < 1) throw std::invalid_argument("sample_mlp: samples must be >= 1");

    const Dag& g = spec.graph;
    Eigen::MatrixXd values(samples, g.node_count());
    // Zero-centered sigmoid. The logistic variant saturates layer sums around
    // a large random offset and leaves most mechanisms near-constant; tanh
    // keeps them responsive.
    auto sigmoid = [](const Eigen::MatrixXd& m) { return m.array().tanh().matrix(); };

    for (int node : g.topological_order()) {
        Eigen::VectorXd column = noise_column(spec, samples, node);
        const auto& parents = g.parents(node);
        if (!parents.empty()) {
            // Fixed random 3-layer sigmoid MLP; widths and weights are drawn
            // from a per-node stream so mechanisms are independent.
            Rng rng = Rng::derived(spec.seed, 0x4d000000ULL + static_cast<std::uint64_t>(node));
            const int width1 = rng.uniform_int(spec.mlp.width_lo, spec.mlp.width_hi);
            const int width2 = rng.uniform_int(spec.mlp.width_lo, spec.mlp.width_hi);
            const int inputs = static_cast<int>(parents.size());

            auto draw_matrix = [&](int rows, int cols) {
                Eigen::MatrixXd m(rows, cols);
                for (int r = 0; r < rows; ++r) {
                    for (int c = 0; c < cols; ++c) m(r, c) = rng.uniform(spec.mlp.weight_lo, spec.mlp.weight_hi);
                }
                return m;
            };
            const Eigen::MatrixXd w1 = draw_matrix(inputs, width1);
            const Eigen::MatrixXd w2 = draw_matrix(width1, width2);
            const Eigen::MatrixXd w3 = draw_matrix(width2, 1);

            Eigen::MatrixXd inputs_matrix(samples, inputs);
            for (int k = 0; k < inputs; ++k) {
                inputs_matrix.col(k) = values.col(parents[static_cast<std::size_t>(k)]);
            }
            const Eigen::MatrixXd h1 = sigmoid(inputs_matrix * w1);
            const Eigen::MatrixXd h2 = sigmoid(h1 * w2);
            column += sigmoid(h2 * w3).col(0);
        }
        values.col(node) = column;
    }
    return Dataset(std::move(values), column_names_for(g));
}

Dataset sample_scm(const ScmSpec& spec, int samples) {
    return spec.mechanism == Mechanism::linear ? sample_linear(spec, samples)
                                               : sample_mlp(spec, samples);
}

}  // namespace dagcheck
