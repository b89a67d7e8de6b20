#include "dagcheck/ci.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dagcheck/stats.hpp"

namespace dagcheck {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_query(int columns, int samples, int i, int j, const std::vector<int>& z) {
    auto check = [columns](int v) {
        if (v < 0 || v >= columns) throw std::out_of_range("CI query: column index out of range");
    };
    check(i);
    check(j);
    if (i == j) throw std::invalid_argument("CI query: i and j must differ");
    for (std::size_t k = 0; k < z.size(); ++k) {
        check(z[k]);
        if (z[k] == i || z[k] == j) throw std::invalid_argument("CI query: z must exclude i and j");
        if (k > 0 && z[k] <= z[k - 1]) throw std::invalid_argument("CI query: z must be sorted and distinct");
    }
    if (samples < 4) throw std::invalid_argument("CI query: need at least 4 samples");
}

CiOutcome failure(CiTestKind kind, CiQuery query, std::string reason) {
    CiOutcome out;
    out.failed = true;
    out.failure_reason = std::move(reason);
    out.p_value = std::numeric_limits<double>::quiet_NaN();
    out.statistic = std::numeric_limits<double>::quiet_NaN();
    out.test = kind;
    out.query = std::move(query);
    return out;
}

CiOutcome success(CiTestKind kind, CiQuery query, double statistic, double p_value) {
    CiOutcome out;
    out.statistic = statistic;
    out.p_value = std::min(1.0, std::max(0.0, p_value));
    out.test = kind;
    out.query = std::move(query);
    return out;
}

// Query with i, j put in canonical (ascending) order; CI is symmetric in the
// first two arguments and this keeps results and cache keys identical.
CiQuery canonical(int i, int j, const std::vector<int>& z) {
    CiQuery q;
    q.i = std::min(i, j);
    q.j = std::max(i, j);
    q.z = z;
    return q;
}

}  // namespace

std::string_view to_string(CiTestKind kind) {
    switch (kind) {
        case CiTestKind::pcorr: return "pcorr";
        case CiTestKind::gcm: return "gcm";
        case CiTestKind::kci: return "kci";
    }
    throw std::logic_error("unknown CiTestKind");
}

CiTestKind ci_test_kind_from_string(std::string_view name) {
    if (name == "pcorr") return CiTestKind::pcorr;
    if (name == "gcm") return CiTestKind::gcm;
    if (name == "kci") return CiTestKind::kci;
    throw std::invalid_argument("unknown CI test: " + std::string(name));
}

std::string_view to_string(RegressorSpec::Kind kind) {
    switch (kind) {
        case RegressorSpec::Kind::boosted_trees: return "boosted_trees";
        case RegressorSpec::Kind::kernel_ridge: return "kernel_ridge";
    }
    throw std::logic_error("unknown RegressorSpec::Kind");
}

RegressorSpec::Kind regressor_kind_from_string(std::string_view name) {
    if (name == "boosted_trees") return RegressorSpec::Kind::boosted_trees;
    if (name == "kernel_ridge") return RegressorSpec::Kind::kernel_ridge;
    throw std::invalid_argument("unknown regressor kind: " + std::string(name));
}

void RegressorSpec::validate() const {
    if (kind == Kind::boosted_trees) {
        if (tree_count < 1 || max_depth < 1 || learning_rate <= 0.0 || learning_rate > 1.0) {
            throw std::invalid_argument("RegressorSpec: invalid boosted-tree hyperparameters");
        }
    } else {
        if (ridge_penalty <= 0.0 || bandwidth_scale <= 0.0) {
            throw std::invalid_argument("RegressorSpec: invalid kernel-ridge hyperparameters");
        }
    }
}

// ---------------------------------------------------------------------------
// Partial correlation

PcorrTester::PcorrTester(const Dataset& data)
    : sample_count_(data.sample_count()) {
    const Eigen::MatrixXd centered = data.values.rowwise() - data.values.colwise().mean();
    covariance_ = centered.transpose() * centered / std::max(1, sample_count_ - 1);
}

CiOutcome PcorrTester::test(int i, int j, const std::vector<int>& z) const {
    validate_query(static_cast<int>(covariance_.cols()), sample_count_, i, j, z);
    CiQuery query = canonical(i, j, z);
    const int m = static_cast<int>(z.size());
    const int dof = sample_count_ - m - 3;
    if (dof < 1) {
        return failure(CiTestKind::pcorr, std::move(query),
                       "insufficient samples for conditioning set");
    }

    double r;
    if (m == 0) {
        const double vaa = covariance_(query.i, query.i);
        const double vbb = covariance_(query.j, query.j);
        if (vaa <= 0.0 || vbb <= 0.0) {
            return failure(CiTestKind::pcorr, std::move(query), "constant column");
        }
        r = covariance_(query.i, query.j) / std::sqrt(vaa * vbb);
    } else {
        std::vector<int> cols;
        cols.reserve(static_cast<std::size_t>(m) + 2);
        cols.push_back(query.i);
        cols.push_back(query.j);
        cols.insert(cols.end(), query.z.begin(), query.z.end());
        const int k = static_cast<int>(cols.size());
        Eigen::MatrixXd sub(k, k);
        for (int a = 0; a < k; ++a) {
            for (int b = 0; b < k; ++b) {
                sub(a, b) = covariance_(cols[static_cast<std::size_t>(a)], cols[static_cast<std::size_t>(b)]);
            }
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(sub);
        if (!lu.isInvertible()) {
            return failure(CiTestKind::pcorr, std::move(query), "singular covariance");
        }
        const Eigen::MatrixXd precision = lu.inverse();
        const double denom = precision(0, 0) * precision(1, 1);
        if (!(denom > 0.0)) {
            return failure(CiTestKind::pcorr, std::move(query), "ill-conditioned covariance");
        }
        r = -precision(0, 1) / std::sqrt(denom);
    }

    if (!std::isfinite(r)) {
        return failure(CiTestKind::pcorr, std::move(query), "non-finite partial correlation");
    }
    double statistic;
    if (std::abs(r) >= 1.0) {
        statistic = r > 0 ? kInf : -kInf;
    } else {
        statistic = std::atanh(r) * std::sqrt(static_cast<double>(dof));
    }
    return success(CiTestKind::pcorr, std::move(query), statistic, normal_two_sided_p(statistic));
}

// ---------------------------------------------------------------------------
// Generalized covariance measure

namespace {

// Median-heuristic RBF kernel built from standardized rows:
// K(u, v) = exp(-|u - v|^2 / m), m the median pairwise squared distance.
// Returns false if the rows are all identical.
bool rbf_kernel(const Eigen::MatrixXd& rows, double bandwidth_scale, Eigen::MatrixXd& kernel) {
    const int n = static_cast<int>(rows.rows());
    const Eigen::VectorXd sq = rows.rowwise().squaredNorm();
    Eigen::MatrixXd dist2 = sq.replicate(1, n) + sq.transpose().replicate(n, 1) -
                            2.0 * (rows * rows.transpose());
    dist2 = dist2.cwiseMax(0.0);

    std::vector<double> offdiag;
    offdiag.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            if (dist2(a, b) > 0.0) offdiag.push_back(dist2(a, b));
        }
    }
    if (offdiag.empty()) return false;
    const double width = median(std::move(offdiag)) * bandwidth_scale;
    kernel = (-dist2 / width).array().exp();
    return true;
}

std::vector<double> kernel_ridge_residuals(const Eigen::MatrixXd& features,
                                           const Eigen::VectorXd& target,
                                           const RegressorSpec& spec) {
    const int n = static_cast<int>(target.size());
    Eigen::MatrixXd rows = features;
    for (int c = 0; c < rows.cols(); ++c) {
        const double mean = rows.col(c).mean();
        const double sd = std::sqrt((rows.col(c).array() - mean).square().sum() / std::max(1, n - 1));
        rows.col(c).array() -= mean;
        if (sd > 0.0) rows.col(c) /= sd;
    }
    Eigen::MatrixXd kernel;
    Eigen::VectorXd centered = target.array() - target.mean();
    if (!rbf_kernel(rows, spec.bandwidth_scale, kernel)) {
        // Constant features: the best fit is the mean.
        return {centered.data(), centered.data() + n};
    }
    // In-sample residual of kernel ridge: y - K(K + lam I)^-1 y = lam (K + lam I)^-1 y.
    const double lam = spec.ridge_penalty * static_cast<double>(n);
    kernel.diagonal().array() += lam;
    const Eigen::VectorXd residual = lam * kernel.ldlt().solve(centered).eval();
    return {residual.data(), residual.data() + n};
}

}  // namespace

GcmTester::GcmTester(const Dataset& data, RegressorSpec spec)
    : values_(data.values), spec_(spec) {
    spec_.validate();
    if (data.sample_count() < 20) {
        throw std::invalid_argument("GcmTester: need at least 20 samples");
    }
    if (spec_.kind == RegressorSpec::Kind::boosted_trees) {
        binned_.reserve(static_cast<std::size_t>(values_.cols()));
        for (int c = 0; c < values_.cols(); ++c) binned_.emplace_back(values_.col(c));
    }
}

GcmTester::ResidualPtr GcmTester::residuals(int target, const std::vector<int>& z) const {
    std::vector<int> key;
    key.reserve(z.size() + 1);
    key.push_back(target);
    key.insert(key.end(), z.begin(), z.end());
    {
        std::shared_lock lock(cache_mutex_);
        if (auto it = residual_cache_.find(key); it != residual_cache_.end()) return it->second;
    }

    const int n = static_cast<int>(values_.rows());
    std::vector<double> res;
    if (z.empty()) {
        Eigen::VectorXd centered = values_.col(target).array() - values_.col(target).mean();
        res.assign(centered.data(), centered.data() + n);
    } else if (spec_.kind == RegressorSpec::Kind::boosted_trees) {
        std::vector<const BinnedColumn*> features;
        features.reserve(z.size());
        for (int c : z) features.push_back(&binned_[static_cast<std::size_t>(c)]);
        BoostedTreesConfig config{spec_.tree_count, spec_.max_depth, spec_.learning_rate};
        res = boosted_trees_residuals(features, values_.col(target), config);
    } else {
        Eigen::MatrixXd features(n, static_cast<int>(z.size()));
        for (std::size_t k = 0; k < z.size(); ++k) features.col(static_cast<int>(k)) = values_.col(z[k]);
        res = kernel_ridge_residuals(features, values_.col(target), spec_);
    }

    auto ptr = std::make_shared<const std::vector<double>>(std::move(res));
    std::unique_lock lock(cache_mutex_);
    residual_cache_[key] = ptr;
    return ptr;
}

CiOutcome GcmTester::test(int i, int j, const std::vector<int>& z) const {
    validate_query(static_cast<int>(values_.cols()), static_cast<int>(values_.rows()), i, j, z);
    CiQuery query = canonical(i, j, z);

    const auto res_i = residuals(query.i, query.z);
    const auto res_j = residuals(query.j, query.z);
    const int n = static_cast<int>(values_.rows());

    double sum = 0.0, sum_sq = 0.0;
    for (int k = 0; k < n; ++k) {
        const double product = (*res_i)[static_cast<std::size_t>(k)] * (*res_j)[static_cast<std::size_t>(k)];
        sum += product;
        sum_sq += product * product;
    }
    const double mean = sum / n;
    const double variance = sum_sq / n - mean * mean;
    if (!(variance > 0.0) || !std::isfinite(variance)) {
        return failure(CiTestKind::gcm, std::move(query), "degenerate residual products");
    }
    const double statistic = std::sqrt(static_cast<double>(n)) * mean / std::sqrt(variance);
    return success(CiTestKind::gcm, std::move(query), statistic, normal_two_sided_p(statistic));
}

// ---------------------------------------------------------------------------
// Kernel conditional independence

KciTester::KciTester(const Dataset& data, KciConfig config) : config_(config) {
    if (config_.max_samples < 10) throw std::invalid_argument("KciConfig: max_samples too small");
    if (config_.epsilon <= 0.0) throw std::invalid_argument("KciConfig: epsilon must be positive");

    const int total = data.sample_count();
    const int n = std::min(total, config_.max_samples);
    values_.resize(n, data.values.cols());
    if (n == total) {
        values_ = data.values;
    } else {
        // Evenly spaced rows: deterministic and unbiased for i.i.d. samples.
        for (int k = 0; k < n; ++k) {
            const auto row = static_cast<Eigen::Index>(
                static_cast<long long>(k) * total / n);
            values_.row(k) = data.values.row(row);
        }
    }

    constant_column_.resize(static_cast<std::size_t>(values_.cols()));
    for (int c = 0; c < values_.cols(); ++c) {
        const double mean = values_.col(c).mean();
        const double sd = std::sqrt((values_.col(c).array() - mean).square().sum() / std::max(1, n - 1));
        constant_column_[static_cast<std::size_t>(c)] = !(sd > 0.0);
        values_.col(c).array() -= mean;
        if (sd > 0.0) values_.col(c) /= sd;
    }
}

namespace {

void center_kernel(Eigen::MatrixXd& kernel) {
    const Eigen::VectorXd row_mean = kernel.rowwise().mean();
    const double total_mean = row_mean.mean();
    kernel.colwise() -= row_mean;
    kernel.rowwise() -= row_mean.transpose();
    kernel.array() += total_mean;
}

// Low-rank reconstruction keeping eigenvalues above a relative threshold.
// Used for the null moments; returns false when no component survives.
bool thresholded_reconstruction(const Eigen::MatrixXd& kernel, double rel_threshold,
                                Eigen::MatrixXd& scaled_vectors) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (kernel + kernel.transpose()));
    if (eig.info() != Eigen::Success) return false;
    const Eigen::VectorXd& lambda = eig.eigenvalues();
    const double max_lambda = lambda.maxCoeff();
    if (!(max_lambda > 0.0)) return false;
    const double cutoff = max_lambda * rel_threshold;

    int kept = 0;
    for (int k = 0; k < lambda.size(); ++k) {
        if (lambda[k] > cutoff) ++kept;
    }
    if (kept == 0) return false;
    scaled_vectors.resize(kernel.rows(), kept);
    int c = 0;
    for (int k = 0; k < lambda.size(); ++k) {
        if (lambda[k] > cutoff) {
            scaled_vectors.col(c++) = eig.eigenvectors().col(k) * std::sqrt(lambda[k]);
        }
    }
    return true;
}

double gamma_upper_pvalue(double statistic, double mean, double variance) {
    const double shape = mean * mean / variance;
    const double scale = variance / mean;
    return 1.0 - gamma_cdf(statistic, shape, scale);
}

}  // namespace

CiOutcome KciTester::test(int i, int j, const std::vector<int>& z) const {
    validate_query(static_cast<int>(values_.cols()), static_cast<int>(values_.rows()), i, j, z);
    CiQuery query = canonical(i, j, z);

    if (constant_column_[static_cast<std::size_t>(query.i)] ||
        constant_column_[static_cast<std::size_t>(query.j)]) {
        return failure(CiTestKind::kci, std::move(query), "degenerate kernel (constant column)");
    }
    for (int c : query.z) {
        if (constant_column_[static_cast<std::size_t>(c)]) {
            return failure(CiTestKind::kci, std::move(query), "degenerate kernel (constant column)");
        }
    }

    const int n = static_cast<int>(values_.rows());
    Eigen::MatrixXd kernel_y;
    if (!rbf_kernel(values_.col(query.j), 1.0, kernel_y)) {
        return failure(CiTestKind::kci, std::move(query), "degenerate kernel matrix");
    }
    center_kernel(kernel_y);

    if (query.z.empty()) {
        Eigen::MatrixXd kernel_x;
        if (!rbf_kernel(values_.col(query.i), 1.0, kernel_x)) {
            return failure(CiTestKind::kci, std::move(query), "degenerate kernel matrix");
        }
        center_kernel(kernel_x);

        const double statistic = kernel_x.cwiseProduct(kernel_y).sum();
        const double mean = kernel_x.trace() * kernel_y.trace() / n;
        const double variance = 2.0 * kernel_x.squaredNorm() * kernel_y.squaredNorm() /
                                (static_cast<double>(n) * n);
        if (!(mean > 0.0) || !(variance > 0.0)) {
            return failure(CiTestKind::kci, std::move(query), "degenerate null moments");
        }
        return success(CiTestKind::kci, std::move(query), statistic,
                       gamma_upper_pvalue(statistic, mean, variance));
    }

    // Conditional case: x is augmented with the (down-weighted) conditioning
    // columns so the x-kernel carries the z information.
    const int m = static_cast<int>(query.z.size());
    Eigen::MatrixXd xz(n, 1 + m);
    Eigen::MatrixXd zs(n, m);
    xz.col(0) = values_.col(query.i);
    for (int k = 0; k < m; ++k) {
        zs.col(k) = values_.col(query.z[static_cast<std::size_t>(k)]);
        xz.col(1 + k) = 0.5 * zs.col(k);
    }
    Eigen::MatrixXd kernel_x, kernel_z;
    if (!rbf_kernel(xz, 1.0, kernel_x) || !rbf_kernel(zs, 1.0, kernel_z)) {
        return failure(CiTestKind::kci, std::move(query), "degenerate kernel matrix");
    }
    center_kernel(kernel_x);
    center_kernel(kernel_z);

    // R = eps * (Kz + eps I)^-1, the residual-maker of the kernel regression.
    kernel_z.diagonal().array() += config_.epsilon;
    const Eigen::MatrixXd projector =
        config_.epsilon * kernel_z.ldlt().solve(Eigen::MatrixXd::Identity(n, n));
    const Eigen::MatrixXd kernel_x_res = projector * kernel_x * projector.transpose();
    const Eigen::MatrixXd kernel_y_res = projector * kernel_y * projector.transpose();

    const double statistic = kernel_x_res.cwiseProduct(kernel_y_res).sum();

    Eigen::MatrixXd wx, wy;
    if (!thresholded_reconstruction(kernel_x_res, config_.eig_threshold, wx) ||
        !thresholded_reconstruction(kernel_y_res, config_.eig_threshold, wy)) {
        return failure(CiTestKind::kci, std::move(query), "degenerate null moments");
    }
    // Null moments of sum_{a,b} lambda_a mu_b chi^2 terms with the empirical
    // eigenstructure: the product matrix is the Hadamard product of the
    // thresholded reconstructions.
    const Eigen::MatrixXd product =
        (wx * wx.transpose()).cwiseProduct(wy * wy.transpose());
    const double mean = product.trace();
    const double variance = 2.0 * product.squaredNorm();
    if (!(mean > 0.0) || !(variance > 0.0)) {
        return failure(CiTestKind::kci, std::move(query), "degenerate null moments");
    }
    return success(CiTestKind::kci, std::move(query), statistic,
                   gamma_upper_pvalue(statistic, mean, variance));
}

// ---------------------------------------------------------------------------
// Oracle and cache

CiOutcome DsepOracleTester::test(int i, int j, const std::vector<int>& z) const {
    CiQuery query = canonical(i, j, z);
    const bool separated = d_separated(graph_, query.i, query.j, query.z);
    CiOutcome out;
    out.statistic = separated ? 0.0 : kInf;
    out.p_value = separated ? 1.0 : 0.0;
    out.test = kind();
    out.query = std::move(query);
    return out;
}

CiOutcome CiCache::get_or_compute(int i, int j, const std::vector<int>& z,
                                  const std::function<CiOutcome()>& compute) {
    std::vector<int> key;
    key.reserve(z.size() + 2);
    key.push_back(std::min(i, j));
    key.push_back(std::max(i, j));
    key.insert(key.end(), z.begin(), z.end());
    {
        std::shared_lock lock(mutex_);
        if (auto it = entries_.find(key); it != entries_.end()) {
            hits_.fetch_add(1, std::memory_order_relaxed);
            return it->second;
        }
    }
    CiOutcome outcome = compute();
    evaluations_.fetch_add(1, std::memory_order_relaxed);
    std::unique_lock lock(mutex_);
    entries_[std::move(key)] = outcome;
    return outcome;
}

CiOutcome CachedCiTester::test(int i, int j, const std::vector<int>& z) const {
    return cache_.get_or_compute(i, j, z, [&] { return inner_.test(i, j, z); });
}

std::unique_ptr<CiTester> make_tester(const Dataset& data, CiTestKind kind,
                                      const RegressorSpec& regressor, const KciConfig& kci) {
    switch (kind) {
        case CiTestKind::pcorr: return std::make_unique<PcorrTester>(data);
        case CiTestKind::gcm: return std::make_unique<GcmTester>(data, regressor);
        case CiTestKind::kci: return std::make_unique<KciTester>(data, kci);
    }
    throw std::logic_error("unknown CiTestKind");
}

CiOutcome pcorr_test(const Dataset& data, int i, int j, const std::vector<int>& z) {
    return PcorrTester(data).test(i, j, z);
}

CiOutcome gcm_test(const Dataset& data, int i, int j, const std::vector<int>& z,
                   const RegressorSpec& spec) {
    return GcmTester(data, spec).test(i, j, z);
}

CiOutcome kci_test(const Dataset& data, int i, int j, const std::vector<int>& z,
                   const KciConfig& config) {
    return KciTester(data, config).test(i, j, z);
}

}  // namespace dagcheck
