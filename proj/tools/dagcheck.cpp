#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <thread>

#include "dagcheck/experiments.hpp"
#include "dagcheck/experts.hpp"
#include "dagcheck/falsify.hpp"
#include "dagcheck/io.hpp"
#include "dagcheck/synth.hpp"
#include "dagcheck/version.hpp"

using nlohmann::json;

namespace {

constexpr int kExitError = 3;

std::uint64_t random_seed() {
    std::random_device device;
    return (static_cast<std::uint64_t>(device()) << 32) ^ device();
}

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    json j;
    in >> j;
    return j;
}

std::string env_name(const std::string& flag) {
    std::string name = "DAGCHECK_";
    for (char c : flag) name += c == '-' ? '_' : static_cast<char>(std::toupper(c));
    return name;
}

// Config-file values fill in options that were not given on the command line
// or environment; explicit flags always win.
class ConfigMerger {
public:
    ConfigMerger(CLI::App* command, std::optional<json>* config)
        : command_(command), config_(config) {}

    template <typename T>
    void merge(const std::string& flag, const std::string& key, T& target) const {
        if (!config_->has_value() || !(*config_)->contains(key)) return;
        if (command_->get_option("--" + flag)->count() > 0) return;
        target = (*config_)->at(key).get<T>();
    }

private:
    CLI::App* command_;
    std::optional<json>* config_;
};

json regressor_to_json(const dagcheck::RegressorSpec& spec) {
    json j;
    j["kind"] = std::string(to_string(spec.kind));
    if (spec.kind == dagcheck::RegressorSpec::Kind::boosted_trees) {
        j["tree_count"] = spec.tree_count;
        j["max_depth"] = spec.max_depth;
        j["learning_rate"] = spec.learning_rate;
    } else {
        j["ridge_penalty"] = spec.ridge_penalty;
        j["bandwidth_scale"] = spec.bandwidth_scale;
    }
    return j;
}

dagcheck::RegressorSpec regressor_from_json(const json& j) {
    dagcheck::RegressorSpec spec;
    if (j.contains("kind")) spec.kind = dagcheck::regressor_kind_from_string(j.at("kind").get<std::string>());
    if (j.contains("tree_count")) spec.tree_count = j.at("tree_count").get<int>();
    if (j.contains("max_depth")) spec.max_depth = j.at("max_depth").get<int>();
    if (j.contains("learning_rate")) spec.learning_rate = j.at("learning_rate").get<double>();
    if (j.contains("ridge_penalty")) spec.ridge_penalty = j.at("ridge_penalty").get<double>();
    if (j.contains("bandwidth_scale")) spec.bandwidth_scale = j.at("bandwidth_scale").get<double>();
    spec.validate();
    return spec;
}

struct FalsifyArgs {
    std::string graph_path;
    std::string data_path;
    std::string test = "pcorr";
    double alpha = 0.05;
    int permutations = 1000;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int workers = 0;
    std::string out_path;
    std::string regressor_config_path;
    std::string missing = "reject";
    bool conservative = false;
    bool exhaustive = false;
    bool no_cache = false;
    bool exclude_unobserved = false;
    std::string config_path;
};

int run_falsify(FalsifyArgs& args, CLI::App* command) {
    std::optional<json> config;
    if (!args.config_path.empty()) config = load_json_file(args.config_path);
    const ConfigMerger merger(command, &config);
    merger.merge("graph", "graph", args.graph_path);
    merger.merge("data", "data", args.data_path);
    merger.merge("test", "test", args.test);
    merger.merge("alpha", "alpha", args.alpha);
    merger.merge("permutations", "permutations", args.permutations);
    merger.merge("workers", "workers", args.workers);
    merger.merge("out", "out", args.out_path);
    merger.merge("missing", "missing", args.missing);
    merger.merge("conservative-pvalue", "conservative_pvalue", args.conservative);
    merger.merge("exhaustive", "exhaustive", args.exhaustive);
    merger.merge("exclude-unobserved", "exclude_unobserved", args.exclude_unobserved);
    if (config && config->contains("seed") && command->get_option("--seed")->count() == 0) {
        args.seed = config->at("seed").get<std::uint64_t>();
        args.seed_given = true;
    } else {
        args.seed_given = args.seed_given || command->get_option("--seed")->count() > 0;
    }
    if (!args.seed_given) {
        args.seed = random_seed();
        std::fprintf(stderr, "[dagcheck] generated seed: %llu\n",
                     static_cast<unsigned long long>(args.seed));
    }
    if (args.graph_path.empty() || args.data_path.empty()) {
        throw std::runtime_error("falsify: --graph and --data are required");
    }

    dagcheck::RegressorSpec regressor;
    if (!args.regressor_config_path.empty()) {
        regressor = regressor_from_json(load_json_file(args.regressor_config_path));
    } else if (config && config->contains("regressor")) {
        regressor = regressor_from_json(config->at("regressor"));
    }

    const dagcheck::Dag raw_graph = dagcheck::read_graph(args.graph_path);
    const auto csv = dagcheck::read_dataset(args.data_path,
                                            dagcheck::missing_policy_from_string(args.missing));
    const auto bound = dagcheck::bind_dataset(raw_graph, csv.data, args.exclude_unobserved);

    const auto kind = dagcheck::ci_test_kind_from_string(args.test);
    const auto tester = dagcheck::make_tester(bound.data, kind, regressor);
    const dagcheck::CachedCiTester cached(*tester);
    const dagcheck::CiTester& active = args.no_cache
                                           ? static_cast<const dagcheck::CiTester&>(*tester)
                                           : static_cast<const dagcheck::CiTester&>(cached);

    dagcheck::FalsifierOptions options;
    options.permutations = args.permutations;
    options.alpha = args.alpha;
    options.seed = args.seed;
    options.workers = resolve_workers(args.workers);
    options.exhaustive = args.exhaustive;
    options.conservative_pvalue = args.conservative;
    const auto report = dagcheck::falsify(bound.graph, active, options);

    // Echo only the statistical configuration: worker count, caching, and
    // output paths cannot change any reported number.
    json echo;
    echo["graph"] = args.graph_path;
    echo["data"] = args.data_path;
    echo["test"] = args.test;
    echo["alpha"] = args.alpha;
    echo["permutations"] = args.permutations;
    echo["seed"] = args.seed;
    echo["missing"] = args.missing;
    echo["conservative_pvalue"] = args.conservative;
    echo["exhaustive"] = args.exhaustive;
    echo["exclude_unobserved"] = args.exclude_unobserved;
    if (kind == dagcheck::CiTestKind::gcm) echo["regressor"] = regressor_to_json(regressor);
    if (!bound.excluded_nodes.empty()) echo["excluded_nodes"] = bound.excluded_nodes;

    if (!args.out_path.empty()) {
        dagcheck::write_report(report, args.out_path, echo,
                               bound.graph.has_node_names()
                                   ? bound.graph.node_names()
                                   : dagcheck::default_node_names(bound.graph.node_count()));
    }

    const auto& g = bound.graph;
    std::printf("p_tpa        %.6g\n", report.p_tpa);
    std::printf("p_lmc        %.6g  (%.0f%% CI [%.6g, %.6g])\n", report.p_lmc,
                100.0 * report.ci_confidence, report.p_lmc_ci.first, report.p_lmc_ci.second);
    std::printf("f_lmc        %.6g  (%d of %lld parental triples rejected)\n", report.f_lmc,
                report.given_violation_count,
                static_cast<long long>(report.parental_triple_count));
    if (std::isinf(report.shannon_info_bits)) {
        std::printf("shannon info > %.6g bits (p_lmc = 0 at T = %d)\n",
                    std::log2(static_cast<double>(report.n_permutations)), report.n_permutations);
    } else {
        std::printf("shannon info %.6g bits\n", report.shannon_info_bits);
    }
    std::printf("verdict      %s\n", std::string(to_string(report.verdict)).c_str());
    if (!report.v_lmc.empty()) {
        std::printf("violated independencies (sorted by p-value):\n");
        for (const auto& v : report.v_lmc) {
            std::string cond;
            for (std::size_t k = 0; k < v.triple.z.size(); ++k) {
                if (k > 0) cond += ", ";
                cond += g.display_name(v.triple.z[k]);
            }
            std::printf("  %s _||_ %s | {%s}  p=%.4g\n", g.display_name(v.triple.i).c_str(),
                        g.display_name(v.triple.j).c_str(), cond.c_str(), v.p_value);
        }
    }
    if (!report.v_md.empty()) {
        std::printf("expected dependencies not observed:\n");
        for (const auto& v : report.v_md) {
            std::printf("  %s ~ %s  p=%.4g\n", g.display_name(v.node).c_str(),
                        g.display_name(v.ancestor).c_str(), v.p_value);
        }
    }
    if (report.ci_failures.given_graph + report.ci_failures.permuted_graphs +
            report.ci_failures.marginal > 0) {
        std::fprintf(stderr,
                     "[dagcheck] warning: %lld CI test failure(s) excluded from violation counts "
                     "(given %lld, permuted %lld, marginal %lld)\n",
                     static_cast<long long>(report.ci_failures.given_graph +
                                            report.ci_failures.permuted_graphs +
                                            report.ci_failures.marginal),
                     static_cast<long long>(report.ci_failures.given_graph),
                     static_cast<long long>(report.ci_failures.permuted_graphs),
                     static_cast<long long>(report.ci_failures.marginal));
    }

    switch (report.verdict) {
        case dagcheck::Verdict::falsifiable_and_not_rejected: return 0;
        case dagcheck::Verdict::falsifiable_and_rejected: return 1;
        case dagcheck::Verdict::not_falsifiable: return 2;
    }
    return kExitError;
}

struct SimulateArgs {
    int nodes = 10;
    double degree = 2.0;
    std::string mechanism = "linear";
    std::string noise = "gaussian";
    double noise_variance = 0.1;
    double noise_lo = -1.0;
    double noise_hi = 1.0;
    int samples = 1000;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string out_graph;
    std::string out_data;
    std::string config_path;
};

int run_simulate(SimulateArgs& args, CLI::App* command) {
    std::optional<json> config;
    if (!args.config_path.empty()) config = load_json_file(args.config_path);
    const ConfigMerger merger(command, &config);
    merger.merge("nodes", "nodes", args.nodes);
    merger.merge("degree", "degree", args.degree);
    merger.merge("mechanism", "mechanism", args.mechanism);
    merger.merge("noise", "noise", args.noise);
    merger.merge("noise-variance", "noise_variance", args.noise_variance);
    merger.merge("samples", "samples", args.samples);
    merger.merge("out-graph", "out_graph", args.out_graph);
    merger.merge("out-data", "out_data", args.out_data);
    if (config && config->contains("seed") && command->get_option("--seed")->count() == 0) {
        args.seed = config->at("seed").get<std::uint64_t>();
    } else if (command->get_option("--seed")->count() == 0) {
        args.seed = random_seed();
        std::fprintf(stderr, "[dagcheck] generated seed: %llu\n",
                     static_cast<unsigned long long>(args.seed));
    }
    if (args.out_graph.empty() || args.out_data.empty()) {
        throw std::runtime_error("simulate: --out-graph and --out-data are required");
    }

    dagcheck::ScmSpec spec;
    spec.graph = dagcheck::er_dag(args.nodes, args.degree, args.seed)
                     .with_node_names(dagcheck::default_node_names(args.nodes));
    spec.mechanism = dagcheck::mechanism_from_string(args.mechanism);
    spec.noise.kind = dagcheck::noise_kind_from_string(args.noise);
    spec.noise.variance = args.noise_variance;
    spec.noise.lo = args.noise_lo;
    spec.noise.hi = args.noise_hi;
    if (spec.noise.kind == dagcheck::NoiseKind::gaussian_mixture) {
        spec.noise.components = {{0.5, -2.0, std::sqrt(args.noise_variance)},
                                 {0.5, 2.0, std::sqrt(args.noise_variance)}};
    }
    spec.seed = dagcheck::derive_seed(args.seed, 0xDA7AULL);

    const dagcheck::Dataset data = dagcheck::sample_scm(spec, args.samples);

    json echo;
    echo["nodes"] = args.nodes;
    echo["degree"] = args.degree;
    echo["mechanism"] = args.mechanism;
    echo["noise"] = args.noise;
    echo["noise_variance"] = args.noise_variance;
    echo["samples"] = args.samples;
    echo["seed"] = args.seed;
    echo["tool_version"] = dagcheck::kVersion;
    const std::vector<std::string> comments = {"dagcheck simulate", "config: " + echo.dump()};

    dagcheck::write_graph(spec.graph, args.out_graph, comments);
    dagcheck::write_dataset(data, args.out_data, comments);
    std::printf("wrote %s (%d nodes, %d edges) and %s (%d rows)\n", args.out_graph.c_str(),
                spec.graph.node_count(), spec.graph.edge_count(), args.out_data.c_str(),
                data.sample_count());
    return 0;
}

struct CorruptArgs {
    std::string graph_path;
    std::string expert = "de-v";
    double fraction = 0.5;
    int add = 0;
    int remove = 0;
    int flip = 0;
    std::uint64_t seed = 0;
    std::string out_path;
    std::string config_path;
};

int run_corrupt(CorruptArgs& args, CLI::App* command) {
    std::optional<json> config;
    if (!args.config_path.empty()) config = load_json_file(args.config_path);
    const ConfigMerger merger(command, &config);
    merger.merge("graph", "graph", args.graph_path);
    merger.merge("expert", "expert", args.expert);
    merger.merge("fraction", "fraction", args.fraction);
    merger.merge("add", "add", args.add);
    merger.merge("remove", "remove", args.remove);
    merger.merge("flip", "flip", args.flip);
    merger.merge("out", "out", args.out_path);
    if (config && config->contains("seed") && command->get_option("--seed")->count() == 0) {
        args.seed = config->at("seed").get<std::uint64_t>();
    } else if (command->get_option("--seed")->count() == 0) {
        args.seed = random_seed();
        std::fprintf(stderr, "[dagcheck] generated seed: %llu\n",
                     static_cast<unsigned long long>(args.seed));
    }
    if (args.graph_path.empty() || args.out_path.empty()) {
        throw std::runtime_error("corrupt: --graph and --out are required");
    }

    const dagcheck::Dag g_true = dagcheck::read_graph(args.graph_path);
    dagcheck::Dag corrupted(1);
    if (args.expert == "de-v") {
        dagcheck::NodeExpertConfig cfg;
        cfg.knowledge_fraction = args.fraction;
        cfg.seed = args.seed;
        corrupted = dagcheck::de_v(g_true, cfg);
    } else if (args.expert == "de-e") {
        dagcheck::EdgeExpertConfig cfg;
        cfg.n_add = args.add;
        cfg.n_remove = args.remove;
        cfg.n_flip = args.flip;
        cfg.seed = args.seed;
        corrupted = dagcheck::de_e(g_true, cfg);
    } else {
        throw std::runtime_error("corrupt: --expert must be de-v or de-e");
    }

    json echo;
    echo["graph"] = args.graph_path;
    echo["expert"] = args.expert;
    if (args.expert == "de-v") {
        echo["fraction"] = args.fraction;
    } else {
        echo["add"] = args.add;
        echo["remove"] = args.remove;
        echo["flip"] = args.flip;
    }
    echo["seed"] = args.seed;
    echo["tool_version"] = dagcheck::kVersion;
    dagcheck::write_graph(corrupted, args.out_path,
                          {"dagcheck corrupt", "config: " + echo.dump()});
    std::printf("shd(corrupted, input) = %d\n", dagcheck::shd(corrupted, g_true));
    return 0;
}

struct BenchmarkArgs {
    int nodes = 10;
    double degree = 2.0;
    std::string mechanism = "linear";
    std::string test = "pcorr";
    int replicates = 20;
    int samples = 1000;
    int permutations = 200;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    int workers = 0;
    std::string out_path;
    std::string config_path;
};

int run_benchmark_cmd(BenchmarkArgs& args, CLI::App* command) {
    std::optional<json> config;
    if (!args.config_path.empty()) config = load_json_file(args.config_path);
    const ConfigMerger merger(command, &config);
    merger.merge("nodes", "nodes", args.nodes);
    merger.merge("degree", "degree", args.degree);
    merger.merge("mechanism", "mechanism", args.mechanism);
    merger.merge("test", "test", args.test);
    merger.merge("replicates", "replicates", args.replicates);
    merger.merge("samples", "samples", args.samples);
    merger.merge("permutations", "permutations", args.permutations);
    merger.merge("alpha", "alpha", args.alpha);
    merger.merge("workers", "workers", args.workers);
    merger.merge("out", "out", args.out_path);
    if (config && config->contains("seed") && command->get_option("--seed")->count() == 0) {
        args.seed = config->at("seed").get<std::uint64_t>();
    } else if (command->get_option("--seed")->count() == 0) {
        args.seed = random_seed();
        std::fprintf(stderr, "[dagcheck] generated seed: %llu\n",
                     static_cast<unsigned long long>(args.seed));
    }
    if (args.out_path.empty()) throw std::runtime_error("benchmark: --out is required");

    dagcheck::BenchmarkConfig cfg;
    cfg.nodes = args.nodes;
    cfg.expected_degree = args.degree;
    cfg.mechanism = dagcheck::mechanism_from_string(args.mechanism);
    cfg.test = dagcheck::ci_test_kind_from_string(args.test);
    cfg.replicates = args.replicates;
    cfg.samples = args.samples;
    cfg.permutations = args.permutations;
    cfg.alpha = args.alpha;
    cfg.seed = args.seed;
    cfg.workers = resolve_workers(args.workers);
    const auto rows = dagcheck::run_benchmark(cfg);

    json echo;
    echo["nodes"] = args.nodes;
    echo["degree"] = args.degree;
    echo["mechanism"] = args.mechanism;
    echo["test"] = args.test;
    echo["replicates"] = args.replicates;
    echo["samples"] = args.samples;
    echo["permutations"] = args.permutations;
    echo["alpha"] = args.alpha;
    echo["seed"] = args.seed;
    echo["tool_version"] = dagcheck::kVersion;

    std::ofstream out(args.out_path);
    if (!out) throw std::runtime_error("cannot write " + args.out_path);
    out << dagcheck::benchmark_csv(rows, {"dagcheck benchmark", "config: " + echo.dump()});
    std::printf("wrote %zu rows to %s\n", rows.size(), args.out_path.c_str());
    return 0;
}

struct Type1Args {
    int samples = 200;
    int max_cond = 4;
    int replications = 1000;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    int workers = 0;
    std::string out_path;
    std::string config_path;
};

int run_type1_cmd(Type1Args& args, CLI::App* command) {
    std::optional<json> config;
    if (!args.config_path.empty()) config = load_json_file(args.config_path);
    const ConfigMerger merger(command, &config);
    merger.merge("samples", "samples", args.samples);
    merger.merge("max-cond", "max_cond", args.max_cond);
    merger.merge("replications", "replications", args.replications);
    merger.merge("alpha", "alpha", args.alpha);
    merger.merge("workers", "workers", args.workers);
    merger.merge("out", "out", args.out_path);
    if (config && config->contains("seed") && command->get_option("--seed")->count() == 0) {
        args.seed = config->at("seed").get<std::uint64_t>();
    } else if (command->get_option("--seed")->count() == 0) {
        args.seed = random_seed();
        std::fprintf(stderr, "[dagcheck] generated seed: %llu\n",
                     static_cast<unsigned long long>(args.seed));
    }
    if (args.out_path.empty()) throw std::runtime_error("type1: --out is required");

    dagcheck::Type1Config cfg;
    cfg.samples = args.samples;
    cfg.max_conditioning = args.max_cond;
    cfg.replications = args.replications;
    cfg.alpha = args.alpha;
    cfg.seed = args.seed;
    cfg.workers = resolve_workers(args.workers);
    const auto rows = dagcheck::run_type1(cfg);

    json echo;
    echo["samples"] = args.samples;
    echo["max_cond"] = args.max_cond;
    echo["replications"] = args.replications;
    echo["alpha"] = args.alpha;
    echo["seed"] = args.seed;
    echo["tool_version"] = dagcheck::kVersion;

    std::ofstream out(args.out_path);
    if (!out) throw std::runtime_error("cannot write " + args.out_path);
    out << dagcheck::type1_csv(rows, {"dagcheck type1", "config: " + echo.dump()});
    std::printf("wrote %zu rows to %s\n", rows.size(), args.out_path.c_str());
    return 0;
}

CLI::Option* with_env(CLI::Option* option, const std::string& flag) {
    return option->envname(env_name(flag));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Falsify a causal DAG against observational data via a node-permutation baseline"};
    app.require_subcommand(1);
    app.set_version_flag("--version", dagcheck::kVersion);

    FalsifyArgs falsify_args;
    auto* falsify = app.add_subcommand(
        "falsify", "Test a graph against data: p_lmc, p_tpa, violations, verdict");
    with_env(falsify->add_option("--graph", falsify_args.graph_path, "Graph file (src -> dst lines)"),
             "graph");
    with_env(falsify->add_option("--data", falsify_args.data_path, "CSV dataset with header"), "data");
    with_env(falsify->add_option("--test", falsify_args.test, "CI test: pcorr, gcm, or kci"), "test");
    with_env(falsify->add_option("--alpha", falsify_args.alpha, "Significance level (default 0.05)"),
             "alpha");
    with_env(falsify->add_option(
                 "--permutations", falsify_args.permutations,
                 "Sampled node permutations T (default 1000). T > 1/alpha is only needed for a "
                 "precise p_lmc estimate; rejecting at level alpha needs about 1/alpha."),
             "permutations");
    with_env(falsify->add_option("--seed", falsify_args.seed, "RNG seed (generated if absent)"),
             "seed");
    with_env(falsify->add_option("--workers", falsify_args.workers,
                                 "Worker threads (0 = hardware concurrency)"),
             "workers");
    with_env(falsify->add_option("--out", falsify_args.out_path, "Report JSON path"), "out");
    with_env(falsify->add_option("--regressor-config", falsify_args.regressor_config_path,
                                 "JSON file with the GCM regressor spec"),
             "regressor-config");
    with_env(falsify->add_option("--missing", falsify_args.missing,
                                 "Missing-value policy: reject or drop-rows"),
             "missing");
    with_env(falsify->add_flag("--conservative-pvalue", falsify_args.conservative,
                               "Estimate p_lmc as (1+count)/(1+T)"),
             "conservative-pvalue");
    with_env(falsify->add_flag("--exhaustive", falsify_args.exhaustive,
                               "Enumerate all n! permutations (small n only)"),
             "exhaustive");
    with_env(falsify->add_flag("--no-cache", falsify_args.no_cache, "Disable the CI p-value cache"),
             "no-cache");
    with_env(falsify->add_flag("--exclude-unobserved", falsify_args.exclude_unobserved,
                               "Drop graph nodes without data columns instead of failing"),
             "exclude-unobserved");
    falsify->add_option("--config", falsify_args.config_path, "JSON run-config file");

    SimulateArgs simulate_args;
    auto* simulate =
        app.add_subcommand("simulate", "Sample an Erdos-Renyi DAG and a synthetic dataset");
    with_env(simulate->add_option("--nodes", simulate_args.nodes, "Node count"), "nodes");
    with_env(simulate->add_option("--degree", simulate_args.degree, "Expected degree"), "degree");
    with_env(simulate->add_option("--mechanism", simulate_args.mechanism, "linear or mlp"),
             "mechanism");
    with_env(simulate->add_option("--noise", simulate_args.noise,
                                  "gaussian, uniform, or gaussian_mixture"),
             "noise");
    with_env(simulate->add_option("--noise-variance", simulate_args.noise_variance,
                                  "Gaussian noise variance"),
             "noise-variance");
    with_env(simulate->add_option("--samples", simulate_args.samples, "Rows to sample"), "samples");
    with_env(simulate->add_option("--seed", simulate_args.seed, "RNG seed (generated if absent)"),
             "seed");
    with_env(simulate->add_option("--out-graph", simulate_args.out_graph, "Graph file to write"),
             "out-graph");
    with_env(simulate->add_option("--out-data", simulate_args.out_data, "CSV file to write"),
             "out-data");
    simulate->add_option("--config", simulate_args.config_path, "JSON run-config file");

    CorruptArgs corrupt_args;
    auto* corrupt = app.add_subcommand("corrupt", "Apply a simulated domain expert to a graph");
    with_env(corrupt->add_option("--graph", corrupt_args.graph_path, "Input graph file"), "graph");
    with_env(corrupt->add_option("--expert", corrupt_args.expert, "de-v or de-e"), "expert");
    with_env(corrupt->add_option("--fraction", corrupt_args.fraction,
                                 "de-v: fraction of nodes with known edges"),
             "fraction");
    with_env(corrupt->add_option("--add", corrupt_args.add, "de-e: edges to add"), "add");
    with_env(corrupt->add_option("--remove", corrupt_args.remove, "de-e: edges to remove"), "remove");
    with_env(corrupt->add_option("--flip", corrupt_args.flip, "de-e: edges to flip"), "flip");
    with_env(corrupt->add_option("--seed", corrupt_args.seed, "RNG seed (generated if absent)"),
             "seed");
    with_env(corrupt->add_option("--out", corrupt_args.out_path, "Output graph file"), "out");
    corrupt->add_option("--config", corrupt_args.config_path, "JSON run-config file");

    BenchmarkArgs benchmark_args;
    auto* benchmark = app.add_subcommand(
        "benchmark", "Sweep domain-expert corruption levels over replicate ER graphs");
    with_env(benchmark->add_option("--nodes", benchmark_args.nodes, "Node count"), "nodes");
    with_env(benchmark->add_option("--degree", benchmark_args.degree, "Expected degree"), "degree");
    with_env(benchmark->add_option("--mechanism", benchmark_args.mechanism, "linear or mlp"),
             "mechanism");
    with_env(benchmark->add_option("--test", benchmark_args.test, "CI test"), "test");
    with_env(benchmark->add_option("--replicates", benchmark_args.replicates, "Replicate graphs"),
             "replicates");
    with_env(benchmark->add_option("--samples", benchmark_args.samples, "Rows per dataset"),
             "samples");
    with_env(benchmark->add_option("--permutations", benchmark_args.permutations,
                                   "Permutations per falsification run"),
             "permutations");
    with_env(benchmark->add_option("--alpha", benchmark_args.alpha, "Significance level"), "alpha");
    with_env(benchmark->add_option("--seed", benchmark_args.seed, "RNG seed (generated if absent)"),
             "seed");
    with_env(benchmark->add_option("--workers", benchmark_args.workers,
                                   "Worker threads (0 = hardware concurrency)"),
             "workers");
    with_env(benchmark->add_option("--out", benchmark_args.out_path, "CSV output path"), "out");
    benchmark->add_option("--config", benchmark_args.config_path, "JSON run-config file");

    Type1Args type1_args;
    auto* type1 = app.add_subcommand(
        "type1", "False-positive rates of the CI tests under a synthetic conditional null");
    with_env(type1->add_option("--samples", type1_args.samples, "Rows per replication"), "samples");
    with_env(type1->add_option("--max-cond", type1_args.max_cond,
                               "Largest conditioning set size D (sweeps 0..D)"),
             "max-cond");
    with_env(type1->add_option("--replications", type1_args.replications, "Replications per cell"),
             "replications");
    with_env(type1->add_option("--alpha", type1_args.alpha, "Significance level"), "alpha");
    with_env(type1->add_option("--seed", type1_args.seed, "RNG seed (generated if absent)"), "seed");
    with_env(type1->add_option("--workers", type1_args.workers,
                               "Worker threads (0 = hardware concurrency)"),
             "workers");
    with_env(type1->add_option("--out", type1_args.out_path, "CSV output path"), "out");
    type1->add_option("--config", type1_args.config_path, "JSON run-config file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (falsify->parsed()) return run_falsify(falsify_args, falsify);
        if (simulate->parsed()) return run_simulate(simulate_args, simulate);
        if (corrupt->parsed()) return run_corrupt(corrupt_args, corrupt);
        if (benchmark->parsed()) return run_benchmark_cmd(benchmark_args, benchmark);
        if (type1->parsed()) return run_type1_cmd(type1_args, type1);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitError;
    }
    return kExitError;
}
