#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dagcheck/dag.hpp"
#include "dagcheck/dataset.hpp"
#include "dagcheck/rng.hpp"

namespace dagcheck {

enum class Mechanism { linear, mlp };
enum class NoiseKind { gaussian, uniform, gaussian_mixture };

std::string_view to_string(Mechanism m);
Mechanism mechanism_from_string(std::string_view name);
std::string_view to_string(NoiseKind k);
NoiseKind noise_kind_from_string(std::string_view name);

struct MixtureComponent {
    double weight = 0.5;
    double mean = 0.0;
    double sd = 1.0;
};

struct NoiseSpec {
    NoiseKind kind = NoiseKind::gaussian;
    double mean = 0.0;
    double variance = 0.1;  // gaussian
    double lo = -1.0;       // uniform
    double hi = 1.0;
    std::vector<MixtureComponent> components;  // gaussian_mixture

    void validate() const;
};

struct MlpConfig {
    int layers = 3;
    int width_lo = 2;
    int width_hi = 100;
    double weight_lo = -5.0;
    double weight_hi = 5.0;
};

// A structural causal model: ancestral sampling over `graph` with additive
// noise and either linear or random-MLP mechanisms. (spec, N) fully
// determines the sampled dataset.
struct ScmSpec {
    Dag graph{1};
    Mechanism mechanism = Mechanism::linear;
    NoiseSpec noise;
    double weight_lo = -1.0;  // linear coefficients ~ U(weight_lo, weight_hi)
    double weight_hi = 1.0;
    MlpConfig mlp;
    std::uint64_t seed = 0;

    void validate() const;
};

// Erdos-Renyi DAG: undirected edges with probability d/(n-1), oriented along
// a random node order so indices carry no information about causal order.
Dag er_dag(int n, double expected_degree, std::uint64_t seed);

std::vector<double> sample_noise(const NoiseSpec& spec, int count, Rng& rng);

Dataset sample_linear(const ScmSpec& spec, int samples);
Dataset sample_mlp(const ScmSpec& spec, int samples);

// Dispatches on spec.mechanism.
Dataset sample_scm(const ScmSpec& spec, int samples);

}  // namespace dagcheck
