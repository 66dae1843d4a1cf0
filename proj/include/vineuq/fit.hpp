#pragma once

#include "vineuq/paircop.hpp"
#include "vineuq/types.hpp"
#include "vineuq/vine.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace vuq {

/// Kendall's tau-a of two equally long samples, O(n log n). Tied pairs count
/// as neither concordant nor discordant.
double sample_kendall_tau(std::span<const double> x, std::span<const double> y);
/// Same for the two columns of an n x 2 matrix.
double sample_kendall_tau(const Matrix& xy);
/// M x M matrix of pairwise sample taus (unit diagonal).
Eigen::MatrixXd kendall_tau_matrix(const Matrix& x);

/// Column-wise ranks / (n + 1); ties get their average rank.
Matrix pseudo_observations(const Matrix& x);

struct PairFit {
    std::vector<double> params;
    double log_likelihood = 0.0;
};

/// Maximum-likelihood parameter of a one-parameter family on pairs (u_i, v_i).
PairFit fit_pair_mle(PairFamily family, std::span<const double> u, std::span<const double> v);
PairFit fit_pair_mle(PairFamily family, const Matrix& uv);

/// Sum of pair log densities, order-independent to the last bit.
double pair_log_likelihood(const PairCopula& pc, std::span<const double> u, std::span<const double> v);

struct PairFitRecord {
    std::size_t tree = 0;
    std::size_t edge = 0;
    PairFamily family = PairFamily::Independence;
    std::vector<double> params;
    double log_likelihood = 0.0;
    double aic = 0.0;
};

struct PairSelection {
    PairCopula copula;
    PairFitRecord record;
};

/// Fits every candidate and keeps the smallest AIC; earlier candidates win ties.
PairSelection select_pair_aic(std::span<const double> u, std::span<const double> v,
                              const std::vector<PairFamily>& candidates);
PairSelection select_pair_aic(const Matrix& uv, const std::vector<PairFamily>& candidates);

/// Greedy C-vine ordering by largest residual sum of |tau|; lowest index wins ties.
std::vector<std::size_t> order_cvine(const Eigen::MatrixXd& tau);

/// D-vine path maximising sum of |tau| between neighbours. Exhaustive for
/// M <= 8 (first element below last; lexicographically first optimum),
/// genetic search otherwise.
std::vector<std::size_t> order_dvine(const Eigen::MatrixXd& tau, std::uint64_t seed = 0);

/// Total |tau| weight of a path.
double path_weight(const Eigen::MatrixXd& tau, std::span<const std::size_t> path);

enum class StructureMethod { Given, CVineHeuristic, DVineOtsp };
std::string_view to_string(StructureMethod m);

struct FitOptions {
    std::vector<PairFamily> candidates{PairFamily::Independence, PairFamily::Gaussian,
                                       PairFamily::GumbelHougaard};
    std::optional<std::vector<std::size_t>> order;  // given structure, 0-based
    bool global_refit = false;
    std::size_t min_rows = 30;
    std::uint64_t seed = 0;  // genetic ordering search
    int refit_max_cycles = 20;
    double refit_rel_tol = 1e-8;
};

struct FitReport {
    VineModel model;
    double log_likelihood = 0.0;
    double aic = 0.0;
    std::vector<PairFitRecord> per_pair;
    StructureMethod structure_method = StructureMethod::Given;
    bool global_refit = false;
    double sequential_log_likelihood = 0.0;
};

double aic(double log_likelihood, std::size_t k);

/// Sequential tree-by-tree selection and estimation, optionally followed by a
/// coordinate-wise global refit. U holds copula-scale data in (0,1).
FitReport fit_vine(const Matrix& u, VineKind kind, const FitOptions& options = {});

}  // namespace vuq
