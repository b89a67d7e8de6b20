#include "dagcheck/boosted_trees.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dagcheck {

BinnedColumn::BinnedColumn(const Eigen::VectorXd& column) {
    const int n = static_cast<int>(column.size());
    if (n == 0) throw std::invalid_argument("BinnedColumn: empty column");

    std::vector<double> sorted(column.data(), column.data() + n);
    std::sort(sorted.begin(), sorted.end());

    // Quantile edges; duplicates dropped so every bin is non-empty.
    std::vector<double> edges;
    for (int b = 1; b < kMaxBins; ++b) {
        const auto pos = static_cast<std::size_t>(static_cast<long long>(b) * n / kMaxBins);
        const double edge = sorted[std::min<std::size_t>(pos, static_cast<std::size_t>(n - 1))];
        if (edges.empty() || edge > edges.back()) edges.push_back(edge);
    }

    codes_.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const auto it = std::upper_bound(edges.begin(), edges.end(), column[i]);
        codes_[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(it - edges.begin());
    }
    bin_count_ = static_cast<int>(edges.size()) + 1;
}

namespace {

struct NodeRange {
    int begin = 0;
    int end = 0;  // exclusive
    double sum = 0.0;

    int count() const { return end - begin; }
};

struct Split {
    int feature = -1;
    int bin = -1;  // codes <= bin go left
    double gain = 0.0;
};

Split best_split(const NodeRange& node, const std::vector<const BinnedColumn*>& features,
                 const std::vector<int>& idx, const std::vector<double>& residual) {
    Split best;
    const double n_total = node.count();
    const double parent_score = node.sum * node.sum / n_total;

    double bin_sum[BinnedColumn::kMaxBins];
    int bin_count[BinnedColumn::kMaxBins];

    for (std::size_t f = 0; f < features.size(); ++f) {
        const auto& codes = features[f]->codes();
        const int bins = features[f]->bin_count();
        if (bins < 2) continue;
        std::fill(bin_sum, bin_sum + bins, 0.0);
        std::fill(bin_count, bin_count + bins, 0);
        for (int k = node.begin; k < node.end; ++k) {
            const int sample = idx[static_cast<std::size_t>(k)];
            const int code = codes[static_cast<std::size_t>(sample)];
            bin_sum[code] += residual[static_cast<std::size_t>(sample)];
            bin_count[code] += 1;
        }
        double left_sum = 0.0;
        int left_count = 0;
        for (int b = 0; b + 1 < bins; ++b) {
            left_sum += bin_sum[b];
            left_count += bin_count[b];
            const int right_count = node.count() - left_count;
            if (left_count == 0 || right_count == 0) continue;
            const double right_sum = node.sum - left_sum;
            const double gain = left_sum * left_sum / left_count +
                                right_sum * right_sum / right_count - parent_score;
            if (gain > best.gain) {
                best.feature = static_cast<int>(f);
                best.bin = b;
                best.gain = gain;
            }
        }
    }
    return best;
}

}  // namespace

std::vector<double> boosted_trees_residuals(const std::vector<const BinnedColumn*>& features,
                                            const Eigen::VectorXd& target,
                                            const BoostedTreesConfig& config) {
    const int n = static_cast<int>(target.size());
    if (n < 2) throw std::invalid_argument("boosted_trees_residuals: need >= 2 samples");
    for (const auto* f : features) {
        if (static_cast<int>(f->codes().size()) != n) {
            throw std::invalid_argument("boosted_trees_residuals: feature/target size mismatch");
        }
    }
    if (config.tree_count < 0 || config.max_depth < 1 || config.learning_rate <= 0.0) {
        throw std::invalid_argument("boosted_trees_residuals: invalid configuration");
    }

    const double base = target.mean();
    std::vector<double> fitted(static_cast<std::size_t>(n), base);
    std::vector<double> residual(static_cast<std::size_t>(n));

    if (features.empty() || config.tree_count == 0) {
        std::vector<double> out(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = target[i] - fitted[static_cast<std::size_t>(i)];
        return out;
    }

    std::vector<int> idx(static_cast<std::size_t>(n));
    std::vector<int> scratch(static_cast<std::size_t>(n));
    std::vector<NodeRange> level, next_level, leaves;

    for (int round = 0; round < config.tree_count; ++round) {
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            residual[static_cast<std::size_t>(i)] = target[i] - fitted[static_cast<std::size_t>(i)];
            total += residual[static_cast<std::size_t>(i)];
            idx[static_cast<std::size_t>(i)] = i;
        }

        level.assign(1, NodeRange{0, n, total});
        leaves.clear();
        for (int depth = 0; depth < config.max_depth && !level.empty(); ++depth) {
            next_level.clear();
            for (const auto& node : level) {
                const Split split = node.count() >= 2
                                        ? best_split(node, features, idx, residual)
                                        : Split{};
                if (split.feature < 0) {
                    leaves.push_back(node);
                    continue;
                }
                // Stable partition: left block keeps codes <= split.bin.
                const auto& codes = features[static_cast<std::size_t>(split.feature)]->codes();
                int left = node.begin;
                int right = 0;
                double left_sum = 0.0;
                for (int k = node.begin; k < node.end; ++k) {
                    const int sample = idx[static_cast<std::size_t>(k)];
                    if (codes[static_cast<std::size_t>(sample)] <= split.bin) {
                        idx[static_cast<std::size_t>(left++)] = sample;
                        left_sum += residual[static_cast<std::size_t>(sample)];
                    } else {
                        scratch[static_cast<std::size_t>(right++)] = sample;
                    }
                }
                std::copy(scratch.begin(), scratch.begin() + right, idx.begin() + left);
                next_level.push_back(NodeRange{node.begin, left, left_sum});
                next_level.push_back(NodeRange{left, node.end, node.sum - left_sum});
            }
            std::swap(level, next_level);
        }
        leaves.insert(leaves.end(), level.begin(), level.end());

        for (const auto& leaf : leaves) {
            const double value = config.learning_rate * leaf.sum / leaf.count();
            for (int k = leaf.begin; k < leaf.end; ++k) {
                fitted[static_cast<std::size_t>(idx[static_cast<std::size_t>(k)])] += value;
            }
        }
    }

    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = target[i] - fitted[static_cast<std::size_t>(i)];
    return out;
}

}  // namespace dagcheck
