#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace vuq {

enum class MarginalFamily { Uniform01, StandardNormal, Gumbel, Lognormal, Normal };

std::string_view to_string(MarginalFamily f);
MarginalFamily marginal_family_from_string(std::string_view name);

/// Univariate continuous distribution. Immutable after construction.
///
/// Parameter layout per family:
///   Uniform01, StandardNormal: none
///   Gumbel:    {location alpha, scale beta}      (maximum-value Gumbel)
///   Lognormal: {mu_log, sigma_log}               (log X ~ N(mu_log, sigma_log^2))
///   Normal:    {mean, std}
class Marginal {
public:
    static Marginal uniform01();
    static Marginal standard_normal();
    static Marginal normal(double mean, double std);
    static Marginal gumbel(double location, double scale);
    /// Moment matching: beta = sqrt(6) std / pi, alpha = mean - gamma beta.
    static Marginal gumbel_from_moments(double mean, double std);
    static Marginal lognormal(double mu_log, double sigma_log);
    /// From mean and coefficient of variation of the variable itself.
    static Marginal lognormal_from_moments(double mean, double cov);

    Marginal(MarginalFamily family, std::vector<double> params);

    MarginalFamily family() const { return family_; }
    const std::vector<double>& params() const { return params_; }

    double cdf(double x) const;
    /// p is clamped to [1e-15, 1 - 1e-15]; throws DomainError outside [0, 1].
    double inv_cdf(double p) const;
    double pdf(double x) const;

    double mean() const;
    double std() const;

    /// Typical spread, used to scale finite-difference steps.
    double scale() const;

    /// True if x lies inside the support (open for bounded families).
    bool in_domain(double x) const;

    bool operator==(const Marginal&) const = default;

private:
    void check_domain(double x, const char* op) const;

    MarginalFamily family_;
    std::vector<double> params_;
};

}  // namespace vuq
