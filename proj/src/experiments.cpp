#include "dagcheck/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include "dagcheck/experts.hpp"
#include "dagcheck/falsify.hpp"

namespace dagcheck {

namespace {

void parallel_for_items(int count, int workers, const std::function<void(int)>& fn) {
    workers = std::max(1, std::min(workers, count));
    if (workers <= 1) {
        for (int t = 0; t < count; ++t) fn(t);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
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

std::string format_double(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.12g", value);
    return buffer;
}

}  // namespace

std::vector<BenchmarkRow> run_benchmark(const BenchmarkConfig& config) {
    if (config.replicates < 1) throw std::invalid_argument("run_benchmark: replicates must be >= 1");

    std::vector<BenchmarkRow> rows;
    std::mutex rows_mutex;

    parallel_for_items(config.replicates, config.workers, [&](int replicate) {
        const std::uint64_t replicate_seed =
            derive_seed(config.seed, 0xB0000000ULL + static_cast<std::uint64_t>(replicate));

        // The DE-E sweep needs at least one true edge to scale against.
        Dag g_true(1);
        std::uint64_t graph_seed = derive_seed(replicate_seed, 0);
        for (int attempt = 0;; ++attempt) {
            g_true = er_dag(config.nodes, config.expected_degree, graph_seed);
            if (g_true.edge_count() >= 1 || config.expected_degree == 0.0) break;
            graph_seed = derive_seed(replicate_seed, 0x100ULL + static_cast<std::uint64_t>(attempt));
        }

        ScmSpec scm;
        scm.graph = g_true;
        scm.mechanism = config.mechanism;
        scm.noise = config.noise;
        scm.seed = derive_seed(replicate_seed, 1);
        const Dataset data = sample_scm(scm, config.samples);
        const auto tester = make_tester(data, config.test, config.regressor);
        const CachedCiTester cached(*tester);

        FalsifierOptions options;
        options.permutations = config.permutations;
        options.alpha = config.alpha;
        options.workers = 1;  // parallelism is across replicates here
        options.compute_md = false;

        std::vector<BenchmarkRow> local;
        for (std::size_t level_idx = 0; level_idx < config.node_expert_levels.size(); ++level_idx) {
            const double level = config.node_expert_levels[level_idx];
            NodeExpertConfig expert;
            expert.knowledge_fraction = level;
            expert.seed = derive_seed(replicate_seed, 0x200ULL + level_idx);
            const Dag given = de_v(g_true, expert);
            options.seed = derive_seed(replicate_seed, 0x300ULL + level_idx);
            const auto report = falsify(given, cached, options);
            local.push_back(BenchmarkRow{"de_v", level, replicate, report.p_lmc, report.f_lmc,
                                         report.p_tpa, shd(given, g_true)});
        }
        for (std::size_t level_idx = 0; level_idx < config.edge_expert_shd_ratios.size(); ++level_idx) {
            const double ratio = config.edge_expert_shd_ratios[level_idx];
            const int target = static_cast<int>(std::lround(ratio * g_true.edge_count()));
            const auto expert = edge_expert_for_shd(
                g_true, target, derive_seed(replicate_seed, 0x400ULL + level_idx));
            const Dag given = de_e(g_true, expert);
            options.seed = derive_seed(replicate_seed, 0x500ULL + level_idx);
            const auto report = falsify(given, cached, options);
            local.push_back(BenchmarkRow{"de_e", ratio, replicate, report.p_lmc, report.f_lmc,
                                         report.p_tpa, shd(given, g_true)});
        }

        std::scoped_lock lock(rows_mutex);
        rows.insert(rows.end(), local.begin(), local.end());
    });

    std::sort(rows.begin(), rows.end(), [](const BenchmarkRow& a, const BenchmarkRow& b) {
        return std::tie(a.expert, a.level, a.replicate) < std::tie(b.expert, b.level, b.replicate);
    });
    return rows;
}

std::string benchmark_csv(const std::vector<BenchmarkRow>& rows,
                          const std::vector<std::string>& header_comments) {
    std::ostringstream out;
    for (const auto& comment : header_comments) out << "# " << comment << "\n";
    out << "expert,level,replicate,p_lmc,f_lmc,p_tpa,shd\n";
    for (const auto& row : rows) {
        out << row.expert << "," << format_double(row.level) << "," << row.replicate << ","
            << format_double(row.p_lmc) << "," << format_double(row.f_lmc) << ","
            << format_double(row.p_tpa) << "," << row.shd << "\n";
    }
    return out.str();
}

std::vector<Type1Row> run_type1(const Type1Config& config) {
    if (config.replications < 1) throw std::invalid_argument("run_type1: replications must be >= 1");
    if (config.max_conditioning < 0) throw std::invalid_argument("run_type1: max_conditioning must be >= 0");
    if (config.samples < 20) throw std::invalid_argument("run_type1: need at least 20 samples");

    std::vector<Type1Row> rows;
    for (int cond = 0; cond <= config.max_conditioning; ++cond) {
        std::vector<std::atomic<std::int64_t>> rejections(config.tests.size());
        std::vector<std::atomic<std::int64_t>> usable(config.tests.size());
        for (auto& r : rejections) r.store(0);
        for (auto& u : usable) u.store(0);

        parallel_for_items(config.replications, config.workers, [&](int rep) {
            // X = b_x Z1 + Nx, Y = b_y Z1 + Ny; conditioning on {Z1..Zd}
            // makes X _||_ Y | Z true by construction. d = 0 drops Z
            // entirely, leaving an exact unconditional null.
            Rng rng = Rng::derived(config.seed,
                                   (static_cast<std::uint64_t>(cond) << 32) |
                                       static_cast<std::uint64_t>(rep));
            const int n = config.samples;
            const double noise_sd = std::sqrt(config.noise_variance);
            const int columns = 2 + cond;
            Eigen::MatrixXd values(n, columns);
            for (int c = 0; c < cond; ++c) {
                for (int r = 0; r < n; ++r) values(r, 2 + c) = rng.normal();
            }
            const double beta_x = rng.uniform(-1.0, 1.0);
            const double beta_y = rng.uniform(-1.0, 1.0);
            for (int r = 0; r < n; ++r) {
                const double z1 = cond > 0 ? values(r, 2) : 0.0;
                values(r, 0) = (cond > 0 ? beta_x * z1 : 0.0) + rng.normal(0.0, noise_sd);
                values(r, 1) = (cond > 0 ? beta_y * z1 : 0.0) + rng.normal(0.0, noise_sd);
            }
            const Dataset data(std::move(values), default_node_names(columns));

            std::vector<int> z(static_cast<std::size_t>(cond));
            for (int c = 0; c < cond; ++c) z[static_cast<std::size_t>(c)] = 2 + c;

            for (std::size_t t = 0; t < config.tests.size(); ++t) {
                const auto tester = make_tester(data, config.tests[t], config.regressor, config.kci);
                const CiOutcome outcome = tester->test(0, 1, z);
                if (outcome.failed) continue;
                usable[t].fetch_add(1, std::memory_order_relaxed);
                if (outcome.reject(config.alpha)) {
                    rejections[t].fetch_add(1, std::memory_order_relaxed);
                }
            }
        });

        for (std::size_t t = 0; t < config.tests.size(); ++t) {
            Type1Row row;
            row.test = config.tests[t];
            row.conditioning_size = cond;
            row.samples = config.samples;
            const auto denom = usable[t].load();
            row.fpr = denom > 0 ? static_cast<double>(rejections[t].load()) / static_cast<double>(denom)
                                : 0.0;
            rows.push_back(row);
        }
    }
    return rows;
}

std::string type1_csv(const std::vector<Type1Row>& rows,
                      const std::vector<std::string>& header_comments) {
    std::ostringstream out;
    for (const auto& comment : header_comments) out << "# " << comment << "\n";
    out << "test,conditioning_size,samples,fpr\n";
    for (const auto& row : rows) {
        out << to_string(row.test) << "," << row.conditioning_size << "," << row.samples << ","
            << format_double(row.fpr) << "\n";
    }
    return out.str();
}

}  // namespace dagcheck
