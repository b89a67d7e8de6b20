#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dagcheck/ci.hpp"
#include "dagcheck/synth.hpp"

namespace dagcheck {

// Expert sweep over replicate ER graphs: how the permutation metrics react
// as simulated domain knowledge degrades.
struct BenchmarkConfig {
    int nodes = 10;
    double expected_degree = 2.0;
    Mechanism mechanism = Mechanism::linear;
    NoiseSpec noise;
    CiTestKind test = CiTestKind::pcorr;
    RegressorSpec regressor;
    std::vector<double> node_expert_levels{0.0, 0.25, 0.5, 0.75, 1.0};
    std::vector<double> edge_expert_shd_ratios{0.0, 0.5, 1.0, 1.5, 2.0};
    int replicates = 20;
    int samples = 1000;
    int permutations = 200;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    int workers = 1;
};

struct BenchmarkRow {
    std::string expert;  // "de_v" or "de_e"
    double level = 0.0;  // |K|/|V| or SHD/|E|
    int replicate = 0;
    double p_lmc = 0.0;
    double f_lmc = 0.0;
    double p_tpa = 0.0;
    int shd = 0;
};

std::vector<BenchmarkRow> run_benchmark(const BenchmarkConfig& config);
std::string benchmark_csv(const std::vector<BenchmarkRow>& rows,
                          const std::vector<std::string>& header_comments = {});

// False-positive-rate study: X and Y depend on Z1 only, the tests condition
// on Z1..ZD, so every rejection is a type-I error.
struct Type1Config {
    int samples = 200;
    int max_conditioning = 4;  // D ranges over 0..max_conditioning
    int replications = 1000;
    double alpha = 0.05;
    std::vector<CiTestKind> tests{CiTestKind::pcorr, CiTestKind::gcm, CiTestKind::kci};
    RegressorSpec regressor;
    KciConfig kci;
    double noise_variance = 0.1;
    std::uint64_t seed = 0;
    int workers = 1;
};

struct Type1Row {
    CiTestKind test = CiTestKind::pcorr;
    int conditioning_size = 0;
    int samples = 0;
    double fpr = 0.0;
};

std::vector<Type1Row> run_type1(const Type1Config& config);
std::string type1_csv(const std::vector<Type1Row>& rows,
                      const std::vector<std::string>& header_comments = {});

}  // namespace dagcheck
