#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace vuq {

enum class PairFamily { Independence, Gaussian, GumbelHougaard };

std::string_view to_string(PairFamily f);
PairFamily pair_family_from_string(std::string_view name);

struct TailDependence {
    double lower = 0.0;
    double upper = 0.0;
};

struct ParamBounds {
    double lower;
    double upper;
};

/// Bivariate parametric copula C(u, v).
///
/// h(u, v) is the conditional distribution of the first argument given the
/// second, C(u | v) = dC(u, v)/dv. All implemented families are exchangeable,
/// so the conditional of the second argument given the first is h(v, u).
class PairCopula {
public:
    static PairCopula independence();
    static PairCopula gaussian(double rho);
    static PairCopula gumbel_hougaard(double theta);

    PairCopula(PairFamily family, std::vector<double> params);

    PairFamily family() const { return family_; }
    const std::vector<double>& params() const { return params_; }
    std::size_t parameter_count() const { return params_.size(); }

    /// Parameter range searched during fitting.
    static ParamBounds fit_bounds(PairFamily family);
    static std::size_t parameter_count(PairFamily family);

    double cdf(double u, double v) const;
    double pdf(double u, double v) const;
    double log_pdf(double u, double v) const;

    /// C(u | v) = dC/dv.
    double h(double u, double v) const;
    /// Solves h(u, v) = w for u.
    double h_inv(double w, double v) const;

    /// C(v | u) = dC/du, the conditional of the second argument given the first.
    double h_first(double u, double v) const { return h(v, u); }
    /// Solves h_first(u, v) = w for v.
    double h_first_inv(double u, double w) const { return h_inv(w, u); }

    double kendall_tau() const;
    double spearman_rho() const;
    TailDependence tail_dependence() const;

    bool operator==(const PairCopula&) const = default;

private:
    PairFamily family_;
    std::vector<double> params_;
};

/// Parameters of the given family whose Kendall's tau equals tau.
std::vector<double> tau_invert(PairFamily family, double tau);

// Interior clamp applied before log / quantile evaluations.
inline constexpr double kUnitClamp = 1e-12;

}  // namespace vuq
