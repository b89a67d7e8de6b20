#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/normal.hpp>

namespace dagcheck {

inline double normal_cdf(double x) {
    if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
    if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
    static const boost::math::normal_distribution<double> unit(0.0, 1.0);
    return boost::math::cdf(unit, x);
}

inline double normal_quantile(double p) {
    if (p <= 0.0 || p >= 1.0) throw std::invalid_argument("normal_quantile: p must be in (0,1)");
    static const boost::math::normal_distribution<double> unit(0.0, 1.0);
    return boost::math::quantile(unit, p);
}

// Two-sided p-value for a statistic with a standard normal null.
inline double normal_two_sided_p(double statistic) {
    if (std::isnan(statistic)) return std::numeric_limits<double>::quiet_NaN();
    return 2.0 * normal_cdf(-std::abs(statistic));
}

inline double gamma_cdf(double x, double shape, double scale) {
    if (x <= 0.0) return 0.0;
    const boost::math::gamma_distribution<double> dist(shape, scale);
    return boost::math::cdf(dist, x);
}

inline double chi_squared_cdf(double x, double dof) {
    if (x <= 0.0) return 0.0;
    const boost::math::chi_squared_distribution<double> dist(dof);
    return boost::math::cdf(dist, x);
}

inline double median(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("median: empty input");
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    double upper = values[mid];
    if (values.size() % 2 == 1) return upper;
    double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

inline std::vector<double> average_ranks(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double rank = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

inline double pearson_correlation(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2) {
        throw std::invalid_argument("pearson_correlation: need two equal-size samples");
    }
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return sxy / std::sqrt(sxx * syy);
}

// Spearman rank correlation with average ranks for ties.
inline double spearman_correlation(const std::vector<double>& xs, const std::vector<double>& ys) {
    return pearson_correlation(average_ranks(xs), average_ranks(ys));
}

// Pearson chi-square uniformity statistic against equal expected counts.
inline double chi_square_uniformity_pvalue(const std::vector<std::int64_t>& counts) {
    if (counts.size() < 2) throw std::invalid_argument("chi_square_uniformity_pvalue: need >= 2 cells");
    const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::int64_t{0}));
    const double expected = total / static_cast<double>(counts.size());
    double stat = 0.0;
    for (const auto c : counts) {
        const double diff = static_cast<double>(c) - expected;
        stat += diff * diff / expected;
    }
    return 1.0 - chi_squared_cdf(stat, static_cast<double>(counts.size() - 1));
}

}  // namespace dagcheck
