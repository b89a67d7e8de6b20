#include "dagcheck/falsify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "dagcheck/stats.hpp"

namespace dagcheck {

namespace {

// Runs fn(0..count-1) across `workers` threads. Work items own their state
// (derived RNG streams), so the schedule cannot affect any result.
void parallel_for(int count, int workers, const std::function<void(int)>& fn) {
    workers = std::max(1, std::min(workers, count));
    if (workers <= 1) {
        for (int t = 0; t < count; ++t) fn(t);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            try {
                for (int t; (t = next.fetch_add(1)) < count;) fn(t);
            } catch (...) {
                std::scoped_lock lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& thread : pool) thread.join();
    if (error) std::rethrow_exception(error);
}

constexpr std::uint64_t kTpaStream = 1;
constexpr std::uint64_t kLmcStream = 2;

std::int64_t factorial_checked(int n) {
    std::int64_t f = 1;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

void check_exhaustive_size(int n) {
    if (n > 8) {
        throw std::invalid_argument("exhaustive permutation enumeration is limited to n <= 8");
    }
}

// Lexicographic enumeration of S_n.
void for_each_permutation(int n, const std::function<void(const NodePermutation&)>& fn) {
    auto perm = NodePermutation::identity(n);
    do {
        fn(perm);
    } while (std::next_permutation(perm.mapping.begin(), perm.mapping.end()));
}

int count_lmc_violations(const Dag& g, const CiTester& tester, double alpha,
                         std::atomic<std::int64_t>& failures) {
    int violations = 0;
    for (const auto& triple : parental_triples(g)) {
        const CiOutcome outcome = tester.test(triple.i, triple.j, triple.z);
        if (outcome.failed) {
            failures.fetch_add(1, std::memory_order_relaxed);
        } else if (outcome.reject(alpha)) {
            ++violations;
        }
    }
    return violations;
}

}  // namespace

std::string_view to_string(Verdict verdict) {
    switch (verdict) {
        case Verdict::falsifiable_and_not_rejected: return "falsifiable_and_not_rejected";
        case Verdict::falsifiable_and_rejected: return "falsifiable_and_rejected";
        case Verdict::not_falsifiable: return "not_falsifiable";
    }
    throw std::logic_error("unknown Verdict");
}

Verdict verdict_from_string(std::string_view name) {
    if (name == "falsifiable_and_not_rejected") return Verdict::falsifiable_and_not_rejected;
    if (name == "falsifiable_and_rejected") return Verdict::falsifiable_and_rejected;
    if (name == "not_falsifiable") return Verdict::not_falsifiable;
    throw std::invalid_argument("unknown verdict: " + std::string(name));
}

std::vector<LmcViolation> v_lmc(const Dag& g, const CiTester& tester, double alpha,
                                std::int64_t* failures) {
    std::vector<LmcViolation> violations;
    std::int64_t failed = 0;
    for (const auto& triple : parental_triples(g)) {
        const CiOutcome outcome = tester.test(triple.i, triple.j, triple.z);
        if (outcome.failed) {
            ++failed;
        } else if (outcome.reject(alpha)) {
            violations.push_back(LmcViolation{triple, outcome.p_value});
        }
    }
    if (failures) *failures = failed;
    return violations;
}

std::vector<MdViolation> v_md(const Dag& g, const CiTester& tester, double alpha,
                              std::int64_t* failures) {
    std::vector<MdViolation> violations;
    std::int64_t failed = 0;
    for (int i = 0; i < g.node_count(); ++i) {
        for (int ancestor : g.ancestors(i)) {
            const CiOutcome outcome = tester.test(i, ancestor, {});
            if (outcome.failed) {
                ++failed;
            } else if (!outcome.reject(alpha)) {
                violations.push_back(MdViolation{i, ancestor, outcome.p_value});
            }
        }
    }
    if (failures) *failures = failed;
    return violations;
}

std::pair<double, double> binom_ci(double p_hat, int trials, double confidence) {
    if (trials < 1) throw std::invalid_argument("binom_ci: trials must be >= 1");
    if (confidence <= 0.0 || confidence >= 1.0) {
        throw std::invalid_argument("binom_ci: confidence must be in (0,1)");
    }
    const double z = normal_quantile(0.5 * (1.0 + confidence));
    const double half_width = z * std::sqrt(p_hat * (1.0 - p_hat) / trials);
    return {std::max(0.0, p_hat - half_width), std::min(1.0, p_hat + half_width)};
}

Verdict verdict_for(double p_lmc, double p_tpa, double alpha) {
    if (p_tpa > alpha) return Verdict::not_falsifiable;
    return p_lmc <= alpha ? Verdict::falsifiable_and_not_rejected
                          : Verdict::falsifiable_and_rejected;
}

double p_tpa(const Dag& g, int permutations, std::uint64_t seed) {
    if (permutations < 1) throw std::invalid_argument("p_tpa: permutations must be >= 1");
    const std::uint64_t stream_seed = derive_seed(seed, kTpaStream);
    int equivalent = 0;
    for (int t = 0; t < permutations; ++t) {
        Rng rng = Rng::derived(stream_seed, static_cast<std::uint64_t>(t));
        const auto perm = sample_permutation(g.node_count(), rng);
        if (v_tpa(apply_permutation(g, perm), g).empty()) ++equivalent;
    }
    return static_cast<double>(equivalent) / permutations;
}

double p_tpa_exhaustive(const Dag& g) {
    check_exhaustive_size(g.node_count());
    std::int64_t equivalent = 0;
    for_each_permutation(g.node_count(), [&](const NodePermutation& perm) {
        if (v_tpa(apply_permutation(g, perm), g).empty()) ++equivalent;
    });
    return static_cast<double>(equivalent) /
           static_cast<double>(factorial_checked(g.node_count()));
}

FalsificationReport falsify(const Dag& g, const CiTester& tester, const FalsifierOptions& options) {
    if (!options.exhaustive && options.permutations < 1) {
        throw std::invalid_argument("falsify: permutations must be >= 1");
    }
    const auto start = std::chrono::steady_clock::now();

    FalsificationReport report;
    report.alpha = options.alpha;
    report.seed = options.seed;
    report.ci_confidence = options.ci_confidence;
    report.conservative_pvalue = options.conservative_pvalue;
    report.exhaustive = options.exhaustive;
    report.test_name = tester.name();

    const auto triples = parental_triples(g);
    report.parental_triple_count = static_cast<std::int64_t>(triples.size());

    std::int64_t given_failures = 0;
    report.v_lmc = v_lmc(g, tester, options.alpha, &given_failures);
    std::sort(report.v_lmc.begin(), report.v_lmc.end(),
              [](const LmcViolation& a, const LmcViolation& b) {
                  return a.p_value != b.p_value ? a.p_value < b.p_value
                                                : std::tie(a.triple.i, a.triple.j) <
                                                      std::tie(b.triple.i, b.triple.j);
              });
    report.ci_failures.given_graph = given_failures;
    report.given_violation_count = static_cast<int>(report.v_lmc.size());
    report.f_lmc = triples.empty()
                       ? 0.0
                       : static_cast<double>(report.v_lmc.size()) / static_cast<double>(triples.size());

    if (options.compute_md) {
        std::int64_t md_failures = 0;
        report.v_md = v_md(g, tester, options.alpha, &md_failures);
        report.ci_failures.marginal = md_failures;
    }

    // Null distribution of the violation count over node permutations.
    const int n = g.node_count();
    std::atomic<std::int64_t> permuted_failures{0};
    std::vector<int> counts;
    if (options.exhaustive) {
        check_exhaustive_size(n);
        const auto total = factorial_checked(n);
        counts.resize(static_cast<std::size_t>(total));
        std::vector<NodePermutation> perms;
        perms.reserve(static_cast<std::size_t>(total));
        for_each_permutation(n, [&](const NodePermutation& p) { perms.push_back(p); });
        parallel_for(static_cast<int>(total), options.workers, [&](int t) {
            const Dag permuted = apply_permutation(g, perms[static_cast<std::size_t>(t)]);
            counts[static_cast<std::size_t>(t)] =
                count_lmc_violations(permuted, tester, options.alpha, permuted_failures);
        });
        report.p_tpa = p_tpa_exhaustive(g);
    } else {
        const std::uint64_t stream_seed = derive_seed(options.seed, kLmcStream);
        counts.resize(static_cast<std::size_t>(options.permutations));
        parallel_for(options.permutations, options.workers, [&](int t) {
            Rng rng = Rng::derived(stream_seed, static_cast<std::uint64_t>(t));
            const auto perm = sample_permutation(n, rng);
            const Dag permuted = apply_permutation(g, perm);
            counts[static_cast<std::size_t>(t)] =
                count_lmc_violations(permuted, tester, options.alpha, permuted_failures);
        });
        report.p_tpa = p_tpa(g, options.permutations, options.seed);
    }
    report.ci_failures.permuted_graphs = permuted_failures.load();
    report.permutation_violation_counts = counts;
    report.n_permutations = static_cast<int>(counts.size());

    std::int64_t at_most = 0;
    for (int c : counts) {
        if (c <= report.given_violation_count) ++at_most;
    }
    const auto trials = static_cast<double>(counts.size());
    report.p_lmc = options.conservative_pvalue
                       ? (1.0 + static_cast<double>(at_most)) / (1.0 + trials)
                       : static_cast<double>(at_most) / trials;
    report.p_lmc_ci = binom_ci(report.p_lmc, report.n_permutations, options.ci_confidence);
    report.shannon_info_bits = report.p_lmc > 0.0
                                   ? -std::log2(report.p_lmc)
                                   : std::numeric_limits<double>::infinity();
    report.verdict = verdict_for(report.p_lmc, report.p_tpa, options.alpha);

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

}  // namespace dagcheck
