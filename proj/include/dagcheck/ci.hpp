#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "dagcheck/boosted_trees.hpp"
#include "dagcheck/dag.hpp"
#include "dagcheck/dataset.hpp"

namespace dagcheck {

enum class CiTestKind { pcorr, gcm, kci };

std::string_view to_string(CiTestKind kind);
CiTestKind ci_test_kind_from_string(std::string_view name);

struct CiQuery {
    int i = 0;
    int j = 0;
    std::vector<int> z;  // sorted
};

// Outcome of one conditional-independence test. Raw p-values are stored;
// accept/reject is decided against the run's significance level at use time.
struct CiOutcome {
    double statistic = 0.0;
    double p_value = 1.0;
    bool failed = false;
    std::string failure_reason;
    CiTestKind test = CiTestKind::pcorr;
    CiQuery query;

    bool reject(double alpha) const { return !failed && p_value <= alpha; }
};

// Regression model used by the GCM test.
struct RegressorSpec {
    enum class Kind { boosted_trees, kernel_ridge };

    Kind kind = Kind::boosted_trees;
    // boosted_trees
    int tree_count = 200;
    int max_depth = 3;
    double learning_rate = 0.1;
    // kernel_ridge
    double ridge_penalty = 1e-3;
    double bandwidth_scale = 1.0;

    void validate() const;
};

std::string_view to_string(RegressorSpec::Kind kind);
RegressorSpec::Kind regressor_kind_from_string(std::string_view name);

struct KciConfig {
    // Kernel matrices are N x N; larger datasets are deterministically
    // subsampled (evenly spaced rows) down to this cap.
    int max_samples = 2000;
    double epsilon = 1e-3;        // ridge used in the conditional centering
    double eig_threshold = 1e-5;  // relative eigenvalue cutoff for the null moments
};

// A CI test bound to a dataset (or an oracle). Implementations are
// thread-safe: queries are pure given the construction-time inputs, and any
// internal memoization is guarded.
class CiTester {
public:
    virtual ~CiTester() = default;
    virtual CiOutcome test(int i, int j, const std::vector<int>& z) const = 0;
    virtual CiTestKind kind() const = 0;
    virtual std::string name() const = 0;
};

// Partial correlation with the Fisher z-transform.
class PcorrTester : public CiTester {
public:
    explicit PcorrTester(const Dataset& data);
    CiOutcome test(int i, int j, const std::vector<int>& z) const override;
    CiTestKind kind() const override { return CiTestKind::pcorr; }
    std::string name() const override { return "pcorr"; }

private:
    int sample_count_;
    Eigen::MatrixXd covariance_;
};

// Generalized covariance measure: normalized covariance of the residual
// products after regressing each endpoint on the conditioning set.
class GcmTester : public CiTester {
public:
    GcmTester(const Dataset& data, RegressorSpec spec = {});
    CiOutcome test(int i, int j, const std::vector<int>& z) const override;
    CiTestKind kind() const override { return CiTestKind::gcm; }
    std::string name() const override { return "gcm"; }

    const RegressorSpec& regressor() const { return spec_; }

private:
    using ResidualPtr = std::shared_ptr<const std::vector<double>>;
    ResidualPtr residuals(int target, const std::vector<int>& z) const;

    Eigen::MatrixXd values_;
    RegressorSpec spec_;
    std::vector<BinnedColumn> binned_;
    mutable std::shared_mutex cache_mutex_;
    mutable std::map<std::vector<int>, ResidualPtr> residual_cache_;
};

// Kernel conditional independence test: RBF kernels with median-heuristic
// bandwidths on standardized columns, conditional centering through a
// regularized kernel regression, and a two-parameter gamma fit to the
// statistic's null moments.
class KciTester : public CiTester {
public:
    KciTester(const Dataset& data, KciConfig config = {});
    CiOutcome test(int i, int j, const std::vector<int>& z) const override;
    CiTestKind kind() const override { return CiTestKind::kci; }
    std::string name() const override { return "kci"; }

private:
    Eigen::MatrixXd values_;  // standardized, possibly subsampled
    std::vector<bool> constant_column_;
    KciConfig config_;
};

// Answers queries by d-separation in a reference graph: p = 1 when
// separated, p = 0 otherwise. Population-limit stand-in for a CI test.
class DsepOracleTester : public CiTester {
public:
    explicit DsepOracleTester(Dag graph) : graph_(std::move(graph)) {}
    CiOutcome test(int i, int j, const std::vector<int>& z) const override;
    CiTestKind kind() const override { return CiTestKind::pcorr; }
    std::string name() const override { return "dsep-oracle"; }

private:
    Dag graph_;
};

// Shared p-value cache keyed by (unordered {i,j}, z). Concurrent readers and
// writers; duplicate computation of a key is allowed (tests are
// deterministic, so results agree) and last write wins.
class CiCache {
public:
    CiOutcome get_or_compute(int i, int j, const std::vector<int>& z,
                             const std::function<CiOutcome()>& compute);
    std::uint64_t hits() const { return hits_.load(); }
    std::uint64_t evaluations() const { return evaluations_.load(); }

private:
    mutable std::shared_mutex mutex_;
    std::map<std::vector<int>, CiOutcome> entries_;
    std::atomic<std::uint64_t> hits_{0};
    std::atomic<std::uint64_t> evaluations_{0};
};

class CachedCiTester : public CiTester {
public:
    explicit CachedCiTester(const CiTester& inner) : inner_(inner) {}
    CiOutcome test(int i, int j, const std::vector<int>& z) const override;
    CiTestKind kind() const override { return inner_.kind(); }
    std::string name() const override { return inner_.name(); }

    std::uint64_t cache_hits() const { return cache_.hits(); }
    std::uint64_t cache_evaluations() const { return cache_.evaluations(); }

private:
    const CiTester& inner_;
    mutable CiCache cache_;
};

std::unique_ptr<CiTester> make_tester(const Dataset& data, CiTestKind kind,
                                      const RegressorSpec& regressor = {},
                                      const KciConfig& kci = {});

// One-shot conveniences.
CiOutcome pcorr_test(const Dataset& data, int i, int j, const std::vector<int>& z);
CiOutcome gcm_test(const Dataset& data, int i, int j, const std::vector<int>& z,
                   const RegressorSpec& spec = {});
CiOutcome kci_test(const Dataset& data, int i, int j, const std::vector<int>& z,
                   const KciConfig& config = {});

}  // namespace dagcheck
