#pragma once

#include "vineuq/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace vuq {

/// Probabilists' Hermite polynomial He_k(z) / sqrt(k!), orthonormal under the
/// standard normal density.
double hermite_eval(unsigned k, double z);
/// Values for degrees 0..out.size()-1.
void hermite_all(double z, std::span<double> out);

using MultiIndex = std::vector<unsigned>;

/// Multi-indices in M variables with (sum alpha_i^q)^(1/q) <= degree,
/// sorted by total degree then reverse-lexicographically; the zero index comes first.
std::vector<MultiIndex> hyperbolic_basis(std::size_t dim, unsigned degree, double q);

/// n x P matrix of basis polynomials at the rows of z.
Matrix pce_design_matrix(const std::vector<MultiIndex>& basis, const Matrix& z);

struct PceOptions {
    unsigned degree_max = 10;
    unsigned degree_min = 1;
    double q = 0.75;
    /// false: ordinary least squares on the full truncated basis.
    bool sparse = true;
    /// Degree adaptivity stops after this many non-improving degrees.
    int early_stop = 2;
};

struct PceModel {
    std::size_t dimension = 0;
    std::vector<MultiIndex> indices;
    std::vector<double> coefficients;
    unsigned degree = 0;
    double q = 1.0;
    /// Corrected relative leave-one-out error of the selected fit.
    double loo_error = 0.0;
    bool sparse = true;

    double predict(std::span<const double> z) const;
};

/// Fits a Hermite PCE to responses at z-space design points.
PceModel pce_fit(const Matrix& z, std::span<const double> y, const PceOptions& options = {});

struct PceMoments {
    double mean;
    double std;
};
PceMoments pce_moments(const PceModel& p);
double pce_predict(const PceModel& p, std::span<const double> z);

/// n design points from independent standard normals (Sobol or pseudo-random).
Matrix standard_normal_design(std::size_t n, std::size_t dim, std::uint64_t seed, bool sobol);

}  // namespace vuq
