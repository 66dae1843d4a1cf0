#pragma once

#include "vineuq/types.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace testutil {

// Kolmogorov-Smirnov distance between a sample and a continuous CDF.
inline double ks_statistic(std::vector<double> x, const std::function<double(double)>& cdf) {
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = cdf(x[i]);
        d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    return d;
}

// 1% critical value of the one-sample KS statistic.
inline double ks_critical_1pct(std::size_t n) { return 1.628 / std::sqrt(static_cast<double>(n)); }

inline std::vector<double> column(const vuq::Matrix& m, Eigen::Index j) {
    std::vector<double> out(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) out[static_cast<std::size_t>(i)] = m(i, j);
    return out;
}

// O(n^2) Kendall tau-a.
inline double brute_kendall(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double a = (x[i] - x[j]) * (y[i] - y[j]);
            s += (a > 0) - (a < 0);
        }
    return s / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace testutil
