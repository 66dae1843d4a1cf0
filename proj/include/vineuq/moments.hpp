#pragma once

#include "vineuq/types.hpp"

#include <cstddef>
#include <limits>
#include <span>
#include <string_view>

namespace vuq {

// Undefined CoV (zero mean, zero hits) is reported as NaN; serialised as null.
inline constexpr double kUndefined = std::numeric_limits<double>::quiet_NaN();

enum class MomentMethod { MCS, PCE };
std::string_view to_string(MomentMethod m);

struct MomentResult {
    double mean = 0.0;
    double std = 0.0;
    double cov_mean = 0.0;
    /// 1/sqrt(2n); exact only for normally distributed responses.
    double cov_std = 0.0;
    std::size_t n_evals = 0;
    MomentMethod method = MomentMethod::MCS;
};

/// Sample mean and (n-1) standard deviation. Result is independent of the
/// order of the samples.
MomentResult mc_moments(std::span<const double> samples);

struct FailureEstimate {
    double pf = 0.0;
    double cov = kUndefined;
    std::size_t n = 0;
    std::size_t n_fail = 0;
};

/// Fraction of samples with y >= y_star (GE) or y <= y_star (LE), with
/// CoV sqrt((1 - pf) / (n pf)).
FailureEstimate mc_failure_probability(std::span<const double> samples, double y_star, Direction dir);

}  // namespace vuq
