#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace dagcheck {

struct BoostedTreesConfig {
    int tree_count = 200;
    int max_depth = 3;
    double learning_rate = 0.1;
};

// Features pre-quantized into per-column bins so repeated regressions on the
// same dataset skip the sort. Bin edges are column quantiles.
class BinnedColumn {
public:
    static constexpr int kMaxBins = 64;

    BinnedColumn() = default;
    explicit BinnedColumn(const Eigen::VectorXd& column);

    const std::vector<std::uint8_t>& codes() const { return codes_; }
    int bin_count() const { return bin_count_; }

private:
    std::vector<std::uint8_t> codes_;
    int bin_count_ = 0;
};

// Gradient-boosted regression trees with squared loss, greedy variance-gain
// splits over binned features. Deterministic: no subsampling, ties resolved
// by scan order. Only in-sample fitted values are needed by callers, so the
// trees themselves are not retained.
//
// Returns y - F(x), the training residuals.
std::vector<double> boosted_trees_residuals(const std::vector<const BinnedColumn*>& features,
                                            const Eigen::VectorXd& target,
                                            const BoostedTreesConfig& config);

}  // namespace dagcheck
