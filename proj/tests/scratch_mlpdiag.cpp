// Scratch: how detectable are the MLP mechanisms, and how do the CI tests
// compare on the same data?
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "dagcheck/falsify.hpp"
#include "dagcheck/synth.hpp"

using namespace dagcheck;

int main(int argc, char** argv) {
    const double noise_variance = argc > 1 ? std::atof(argv[1]) : 0.1;
    const int graphs = argc > 2 ? std::atoi(argv[2]) : 3;

    for (int rep = 0; rep < graphs; ++rep) {
        const std::uint64_t seed = derive_seed(777, static_cast<std::uint64_t>(rep));
        ScmSpec spec;
        spec.graph = er_dag(10, 2.0, seed);
        spec.mechanism = Mechanism::mlp;
        spec.noise.variance = noise_variance;
        spec.seed = derive_seed(seed, 1);
        const Dataset data = sample_mlp(spec, 1000);

        int strong = 0;
        double min_var = 1e9, max_var = 0;
        for (int v = 0; v < 10; ++v) {
            if (spec.graph.parents(v).empty()) continue;
            const double mean = data.values.col(v).mean();
            const double var = (data.values.col(v).array() - mean).square().sum() / 999;
            min_var = std::min(min_var, var);
            max_var = std::max(max_var, var);
        }
        for (const auto& [from, to] : spec.graph.edges()) {
            const auto x = data.values.col(from);
            const auto y = data.values.col(to);
            const double mx = x.mean(), my = y.mean();
            const double corr = ((x.array() - mx) * (y.array() - my)).sum() /
                                std::sqrt((x.array() - mx).square().sum() *
                                          (y.array() - my).square().sum());
            if (std::abs(corr) > 0.1) ++strong;
        }
        std::printf("graph %d: edges=%d strong_edges=%d child_var=[%.3f, %.3f] noise_var=%.3f\n",
                    rep, spec.graph.edge_count(), strong, min_var, max_var, noise_variance);

        PcorrTester pcorr(data);
        CachedCiTester cached(pcorr);
        FalsifierOptions options;
        options.permutations = 100;
        options.seed = derive_seed(seed, 2);
        options.workers = 2;
        options.compute_md = false;
        const auto report = falsify(spec.graph, cached, options);
        auto counts = report.permutation_violation_counts;
        std::sort(counts.begin(), counts.end());
        std::printf("  pcorr: c0=%d p_lmc=%.4f perm_med=%d perm_max=%d\n",
                    report.given_violation_count, report.p_lmc, counts[counts.size() / 2],
                    counts.back());
    }
    return 0;
}
