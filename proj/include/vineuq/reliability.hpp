#pragma once

#include "vineuq/model.hpp"
#include "vineuq/moments.hpp"
#include "vineuq/types.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vuq {

/// g = y* - M for GE (failure when the response reaches y* from below) and
/// g = M - y* for LE. Failure is g <= 0. The model acts on standard-normal z.
struct LimitState {
    ModelPtr model;
    double y_star = 0.0;
    Direction direction = Direction::GE;

    double g(std::span<const double> z) const;
    double g_of_response(double y) const;
    std::size_t dimension() const { return model->dimension(); }
};

struct FormOptions {
    int max_iterations = 100;
    double fd_step = 1e-4;
    double tol_z = 1e-6;
    double tol_g = 1e-6;
    std::optional<std::vector<double>> start;
};

struct FormResult {
    std::vector<double> design_point_z;
    double beta = 0.0;
    double pf = 0.0;
    int iterations = 0;
    std::size_t n_evals = 0;
    bool converged = false;
    std::string diagnostics;
};

/// Improved HL-RF design-point search with finite-difference gradients.
FormResult form(const LimitState& ls, const FormOptions& options = {});

struct IsOptions {
    double cov_target = 0.1;
    std::size_t batch = 100;
    std::size_t n_max = 100000;
    std::uint64_t seed = 0;
};

struct IsResult {
    double pf = 0.0;
    double cov = kUndefined;
    std::size_t n_evals = 0;
    std::size_t batches = 0;
    std::size_t n_fail = 0;
};

/// Importance sampling with N(z*, I) proposals, batched until CoV <= target
/// or n_max evaluations.
IsResult importance_sampling(const LimitState& ls, std::span<const double> z_star, const IsOptions& options = {});

/// Plain Monte Carlo of the indicator g <= 0 in z-space, drawing from the same
/// substream as importance_sampling. With z* = 0 and the same n the two
/// estimates coincide exactly.
FailureEstimate mc_failure_probability_z(const LimitState& ls, std::size_t n, std::uint64_t seed);

}  // namespace vuq
