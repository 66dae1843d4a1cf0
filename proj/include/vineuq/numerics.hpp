#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace vuq {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kEulerGamma = 0.57721566490153286061;

// Probability arguments are clamped into [kProbEps, 1 - kProbEps] before inversion.
inline constexpr double kProbEps = 1e-15;

double norm_pdf(double x);
double norm_cdf(double x);

/// Standard normal quantile (Wichura AS241, ~1e-16 relative accuracy).
/// p is clamped to [kProbEps, 1 - kProbEps].
double norm_quantile(double p);

/// P(X <= x, Y <= y) for a standard bivariate normal with correlation rho.
/// Genz's BVND algorithm, double precision accuracy.
double bvn_cdf(double x, double y, double rho);

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule mapped onto [a, b].
QuadratureRule gauss_legendre(std::size_t n, double a = -1.0, double b = 1.0);

/// Maximise a unimodal function on [lo, hi] by golden-section search.
/// Returns the abscissa; stops when the bracket is narrower than tol.
double golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                          double tol, int max_iter = 200);

/// Bracket a maximum of f starting at x0 inside [lo, hi] and refine it with
/// golden-section search.
double bracketed_max(const std::function<double(double)>& f, double x0, double lo, double hi,
                     double tol);

/// Pairwise (cascade) summation; result does not depend on thread partitioning.
double pairwise_sum(std::span<const double> values);

}  // namespace vuq
