#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dagcheck/ci.hpp"
#include "dagcheck/dag.hpp"

namespace dagcheck {

enum class Verdict { falsifiable_and_not_rejected, falsifiable_and_rejected, not_falsifiable };

std::string_view to_string(Verdict verdict);
Verdict verdict_from_string(std::string_view name);

// Graph-implied CI that the data rejected.
struct LmcViolation {
    ParentalTriple triple;
    double p_value = 0.0;

    friend bool operator==(const LmcViolation&, const LmcViolation&) = default;
};

// Graph-implied marginal dependence (ancestor pair) the data did not show.
struct MdViolation {
    int node = 0;
    int ancestor = 0;
    double p_value = 1.0;

    friend bool operator==(const MdViolation&, const MdViolation&) = default;
};

struct FalsifierOptions {
    int permutations = 1000;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    int workers = 1;
    // Enumerate all n! permutations instead of sampling (n must be small).
    bool exhaustive = false;
    // Estimate p_lmc as (1 + count) / (1 + T) instead of the plain fraction.
    bool conservative_pvalue = false;
    double ci_confidence = 0.95;
    // Skip the marginal-dependence scan (it is not part of p_lmc).
    bool compute_md = true;
};

struct CiFailureCounts {
    std::int64_t given_graph = 0;
    std::int64_t permuted_graphs = 0;
    std::int64_t marginal = 0;

    friend bool operator==(const CiFailureCounts&, const CiFailureCounts&) = default;
};

struct FalsificationReport {
    double p_lmc = 1.0;
    std::pair<double, double> p_lmc_ci{0.0, 1.0};
    double p_tpa = 1.0;
    double f_lmc = 0.0;
    std::vector<LmcViolation> v_lmc;
    std::vector<MdViolation> v_md;
    int n_permutations = 0;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    double ci_confidence = 0.95;
    bool conservative_pvalue = false;
    bool exhaustive = false;
    // -log2(p_lmc); +inf when p_lmc == 0, in which case the resolution bound
    // log2(T) is the reported lower bound.
    double shannon_info_bits = 0.0;
    std::vector<int> permutation_violation_counts;
    int given_violation_count = 0;
    std::int64_t parental_triple_count = 0;
    CiFailureCounts ci_failures;
    Verdict verdict = Verdict::not_falsifiable;
    std::string test_name;
    double wall_seconds = 0.0;
};

// Parental triples of g whose implied CI the tester rejects at alpha.
// Failed tests are excluded and counted separately.
std::vector<LmcViolation> v_lmc(const Dag& g, const CiTester& tester, double alpha,
                                std::int64_t* failures = nullptr);

// Ancestor pairs (i, j in an(i)) whose marginal dependence the tester does
// not detect at alpha.
std::vector<MdViolation> v_md(const Dag& g, const CiTester& tester, double alpha,
                              std::int64_t* failures = nullptr);

// Wald interval p_hat +/- z * sqrt(p_hat (1 - p_hat) / T), clamped to [0,1].
std::pair<double, double> binom_ci(double p_hat, int trials, double confidence);

Verdict verdict_for(double p_lmc, double p_tpa, double alpha);

// Fraction of node permutations whose parental triples are all d-separated
// in g. Purely graphical.
double p_tpa(const Dag& g, int permutations, std::uint64_t seed);
double p_tpa_exhaustive(const Dag& g);

// The full permutation test: p_lmc with confidence interval, p_tpa, the
// violation sets, and the practitioner verdict.
FalsificationReport falsify(const Dag& g, const CiTester& tester, const FalsifierOptions& options);

}  // namespace dagcheck
