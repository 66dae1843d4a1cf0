#include "vineuq/reliability.hpp"

#include "vineuq/error.hpp"
#include "vineuq/kernels.hpp"
#include "vineuq/numerics.hpp"
#include "vineuq/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace vuq {

double LimitState::g_of_response(double y) const {
    return direction == Direction::GE ? y_star - y : y - y_star;
}

double LimitState::g(std::span<const double> z) const { return g_of_response(model->evaluate(z)); }

namespace {

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

// Finite-difference gradient of g at z; g0 = g(z) is reused for forward differences.
std::vector<double> fd_gradient(const LimitState& ls, const std::vector<double>& z, double g0, double h,
                                bool central, std::size_t& n_evals) {
    const std::size_t m = z.size();
    const std::size_t points = central ? 2 * m : m;
    std::vector<double> values(points);
    kernels::for_each_row(
        points,
        [&](std::size_t k) {
            std::vector<double> zz = z;
            const std::size_t i = central ? k / 2 : k;
            zz[i] += (central && k % 2 == 1) ? -h : h;
            values[k] = ls.g(zz);
        },
        ls.model->thread_safe());
    n_evals += points;
    std::vector<double> grad(m);
    for (std::size_t i = 0; i < m; ++i)
        grad[i] = central ? (values[2 * i] - values[2 * i + 1]) / (2.0 * h) : (values[i] - g0) / h;
    return grad;
}

}  // namespace

FormResult form(const LimitState& ls, const FormOptions& options) {
    if (!ls.model) throw DomainError("form: limit state has no model");
    const std::size_t m = ls.dimension();
    FormResult res;
    std::vector<double> z(m, 0.0);
    if (options.start) {
        if (options.start->size() != m) throw DomainError("form: start point dimension mismatch");
        z = *options.start;
    }
    auto eval = [&](std::span<const double> p) {
        ++res.n_evals;
        const double v = ls.g(p);
        if (!std::isfinite(v)) throw NumericalError("form: limit state is not finite");
        return v;
    };

    const std::vector<double> origin(m, 0.0);
    const double g_origin = eval(origin);
    double g = options.start ? eval(z) : g_origin;
    const double g_scale = g_origin != 0.0 ? std::abs(g_origin) : 1.0;

    bool central = false;
    double last_step = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= options.max_iterations; ++it) {
        res.iterations = it;
        central = central || last_step < 1e-3;
        const auto grad = fd_gradient(ls, z, g, options.fd_step, central, res.n_evals);
        const double gnorm = norm2(grad);
        if (!(gnorm > 0.0))
            throw NumericalError("form: zero gradient of the limit state (singular point) at iteration " +
                                 std::to_string(it));
        double gz = 0.0;
        for (std::size_t i = 0; i < m; ++i) gz += grad[i] * z[i];
        const double factor = (gz - g) / (gnorm * gnorm);
        std::vector<double> d(m), full(m);
        for (std::size_t i = 0; i < m; ++i) {
            full[i] = factor * grad[i];
            d[i] = full[i] - z[i];
        }
        const double c = 2.0 * std::max(norm2(z), norm2(full)) / gnorm + 1e-12;
        auto merit = [&](std::span<const double> p, double gp) {
            double s = 0.0;
            for (double v : p) s += v * v;
            return 0.5 * s + c * std::abs(gp);
        };
        const double m0 = merit(z, g);
        double lambda = 1.0;
        std::vector<double> trial(m);
        double g_trial = 0.0;
        for (int halving = 0; halving <= 10; ++halving) {
            for (std::size_t i = 0; i < m; ++i) trial[i] = z[i] + lambda * d[i];
            g_trial = eval(trial);
            if (merit(trial, g_trial) < m0 || halving == 10) break;
            lambda *= 0.5;
        }
        double step = 0.0;
        for (std::size_t i = 0; i < m; ++i) step += (trial[i] - z[i]) * (trial[i] - z[i]);
        step = std::sqrt(step);
        z = trial;
        g = g_trial;
        last_step = step;
        if (step < options.tol_z && std::abs(g) / g_scale < options.tol_g) {
            res.converged = true;
            break;
        }
    }
    res.design_point_z = z;
    const double r = norm2(z);
    res.beta = g_origin > 0.0 ? r : -r;
    res.pf = norm_cdf(-res.beta);
    if (!res.converged) {
        std::ostringstream os;
        os << "not converged after " << res.iterations << " iterations; last step " << last_step
           << ", |g|/g0 = " << std::abs(g) / g_scale;
        res.diagnostics = os.str();
    }
    return res;
}

IsResult importance_sampling(const LimitState& ls, std::span<const double> z_star, const IsOptions& options) {
    if (!ls.model) throw DomainError("importance_sampling: limit state has no model");
    const std::size_t m = ls.dimension();
    if (z_star.size() != m) throw DomainError("importance_sampling: design point dimension mismatch");
    if (!(options.cov_target > 0.0)) throw ConfigError("importance_sampling: cov_target must be positive");
    if (options.batch == 0 || options.n_max == 0) throw ConfigError("importance_sampling: batch and n_max must be positive");

    const PseudoRandomSource source(options.seed, Stream::ImportanceSampling);
    double zs2 = 0.0;
    for (double v : z_star) zs2 += v * v;

    IsResult res;
    std::vector<double> terms;
    terms.reserve(std::min(options.n_max, std::size_t{1} << 20));
    while (res.n_evals < options.n_max) {
        const std::size_t start = res.n_evals;
        const std::size_t count = std::min(options.batch, options.n_max - start);
        terms.resize(start + count);
        kernels::for_each_row(
            count,
            [&](std::size_t k) {
                std::vector<double> u(m), z(m);
                source.fill(start + k, u);
                double dot = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    z[i] = z_star[i] + norm_quantile(u[i]);
                    dot += z[i] * z_star[i];
                }
                const double gv = ls.g(z);
                if (std::isnan(gv)) throw NumericalError("importance_sampling: limit state is NaN");
                terms[start + k] = gv <= 0.0 ? std::exp(-dot + 0.5 * zs2) : 0.0;
            },
            ls.model->thread_safe());
        res.n_evals += count;
        ++res.batches;
        for (std::size_t k = start; k < start + count; ++k)
            if (terms[k] > 0.0) ++res.n_fail;

        const double n = static_cast<double>(res.n_evals);
        res.pf = pairwise_sum(terms) / n;
        if (res.n_fail > 0 && res.n_evals > 1) {
            std::vector<double> dev(terms.size());
            for (std::size_t k = 0; k < terms.size(); ++k) dev[k] = (terms[k] - res.pf) * (terms[k] - res.pf);
            const double var = pairwise_sum(dev) / (n * (n - 1.0));
            res.cov = std::sqrt(var) / res.pf;
            if (res.cov <= options.cov_target) break;
        } else {
            res.cov = kUndefined;
        }
    }
    return res;
}

FailureEstimate mc_failure_probability_z(const LimitState& ls, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw DomainError("mc_failure_probability_z: n must be positive");
    const std::size_t m = ls.dimension();
    const PseudoRandomSource source(seed, Stream::ImportanceSampling);
    std::vector<double> ind(n);
    kernels::for_each_row(
        n,
        [&](std::size_t r) {
            std::vector<double> u(m), z(m);
            source.fill(r, u);
            for (std::size_t i = 0; i < m; ++i) z[i] = norm_quantile(u[i]);
            ind[r] = ls.g(z) <= 0.0 ? 1.0 : 0.0;
        },
        ls.model->thread_safe());
    FailureEstimate f;
    f.n = n;
    for (double v : ind)
        if (v > 0.0) ++f.n_fail;
    f.pf = pairwise_sum(ind) / static_cast<double>(n);
    f.cov = f.n_fail == 0 ? kUndefined : std::sqrt((1.0 - f.pf) / (static_cast<double>(n) * f.pf));
    return f;
}

}  // namespace vuq
