#include "vineuq/paircop.hpp"

#include "vineuq/error.hpp"
#include "vineuq/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace vuq {

std::string_view to_string(PairFamily f) {
    switch (f) {
        case PairFamily::Independence: return "independence";
        case PairFamily::Gaussian: return "gaussian";
        case PairFamily::GumbelHougaard: return "gumbel_hougaard";
    }
    return "unknown";
}

PairFamily pair_family_from_string(std::string_view name) {
    if (name == "independence" || name == "indep") return PairFamily::Independence;
    if (name == "gaussian" || name == "normal" || name == "gauss") return PairFamily::Gaussian;
    if (name == "gumbel_hougaard" || name == "gumbel" || name == "gh")
        return PairFamily::GumbelHougaard;
    throw ConfigError("unknown pair-copula family '" + std::string(name) + "'");
}

namespace {

double clamp_unit(double u) { return std::clamp(u, kUnitClamp, 1.0 - kUnitClamp); }

// Gumbel-Hougaard pieces in terms of x = -log u, y = -log v.
struct GhTerms {
    double x, y, log_x, log_y, a, log_a, w;  // a = x^t + y^t, w = a^(1/t)
};

GhTerms gh_terms(double u, double v, double theta) {
    GhTerms t{};
    t.x = -std::log(u);
    t.y = -std::log(v);
    t.log_x = std::log(t.x);
    t.log_y = std::log(t.y);
    // a computed relative to the larger term to avoid overflow for big theta.
    const double lmax = std::max(t.log_x, t.log_y);
    const double s = std::exp(theta * (t.log_x - lmax)) + std::exp(theta * (t.log_y - lmax));
    t.log_a = theta * lmax + std::log(s);
    t.a = std::exp(t.log_a);
    t.w = std::exp(t.log_a / theta);
    return t;
}

}  // namespace

PairCopula PairCopula::independence() { return {PairFamily::Independence, {}}; }
PairCopula PairCopula::gaussian(double rho) { return {PairFamily::Gaussian, {rho}}; }
PairCopula PairCopula::gumbel_hougaard(double theta) {
    return {PairFamily::GumbelHougaard, {theta}};
}

std::size_t PairCopula::parameter_count(PairFamily family) {
    return family == PairFamily::Independence ? 0 : 1;
}

ParamBounds PairCopula::fit_bounds(PairFamily family) {
    switch (family) {
        case PairFamily::Gaussian: return {-0.9999, 0.9999};
        case PairFamily::GumbelHougaard: return {1.0, 50.0};
        case PairFamily::Independence: break;
    }
    return {0.0, 0.0};
}

PairCopula::PairCopula(PairFamily family, std::vector<double> params)
    : family_(family), params_(std::move(params)) {
    if (params_.size() != parameter_count(family_))
        throw DomainError("pair copula " + std::string(to_string(family_)) + " expects " +
                          std::to_string(parameter_count(family_)) + " parameter(s)");
    switch (family_) {
        case PairFamily::Gaussian:
            if (!(std::abs(params_[0]) < 1.0))
                throw DomainError("gaussian pair copula: rho must lie in (-1, 1)");
            break;
        case PairFamily::GumbelHougaard:
            if (!(params_[0] >= 1.0) || !std::isfinite(params_[0]))
                throw DomainError("gumbel_hougaard pair copula: theta must lie in [1, inf)");
            break;
        case PairFamily::Independence: break;
    }
}

double PairCopula::cdf(double u, double v) const {
    if (u <= 0.0 || v <= 0.0) return 0.0;
    if (u >= 1.0) return std::min(v, 1.0);
    if (v >= 1.0) return u;
    switch (family_) {
        case PairFamily::Independence: return u * v;
        case PairFamily::Gaussian:
            return bvn_cdf(norm_quantile(clamp_unit(u)), norm_quantile(clamp_unit(v)), params_[0]);
        case PairFamily::GumbelHougaard: {
            const double theta = params_[0];
            if (theta == 1.0) return u * v;
            return std::exp(-gh_terms(u, v, theta).w);
        }
    }
    return 0.0;
}

double PairCopula::log_pdf(double u, double v) const {
    if (family_ == PairFamily::Independence) return 0.0;
    u = clamp_unit(u);
    v = clamp_unit(v);
    if (family_ == PairFamily::Gaussian) {
        const double rho = params_[0];
        const double x = norm_quantile(u), y = norm_quantile(v);
        const double r2 = 1.0 - rho * rho;
        return -0.5 * std::log(r2) - (rho * rho * (x * x + y * y) - 2.0 * rho * x * y) / (2.0 * r2);
    }
    const double theta = params_[0];
    const GhTerms t = gh_terms(u, v, theta);
    return -t.w + t.x + t.y + (theta - 1.0) * (t.log_x + t.log_y) +
           (2.0 / theta - 2.0) * t.log_a + std::log1p((theta - 1.0) / t.w);
}

double PairCopula::pdf(double u, double v) const { return std::exp(log_pdf(u, v)); }

double PairCopula::h(double u, double v) const {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    v = clamp_unit(v);
    switch (family_) {
        case PairFamily::Independence: return u;
        case PairFamily::Gaussian: {
            const double rho = params_[0];
            return norm_cdf((norm_quantile(u) - rho * norm_quantile(v)) /
                            std::sqrt(1.0 - rho * rho));
        }
        case PairFamily::GumbelHougaard: {
            const double theta = params_[0];
            if (theta == 1.0) return u;
            const GhTerms t = gh_terms(u, v, theta);
            const double log_h =
                -t.w + (1.0 / theta - 1.0) * t.log_a + (theta - 1.0) * t.log_y + t.y;
            return std::clamp(std::exp(log_h), 0.0, 1.0);
        }
    }
    return 0.0;
}

double PairCopula::h_inv(double w, double v) const {
    if (w <= 0.0) return 0.0;
    if (w >= 1.0) return 1.0;
    v = clamp_unit(v);
    switch (family_) {
        case PairFamily::Independence: return w;
        case PairFamily::Gaussian: {
            const double rho = params_[0];
            return norm_cdf(norm_quantile(w) * std::sqrt(1.0 - rho * rho) +
                            rho * norm_quantile(v));
        }
        case PairFamily::GumbelHougaard: break;
    }
    if (params_[0] == 1.0) return w;
    // Safeguarded Newton on [lo, hi]; h is monotone in u with derivative pdf(u, v).
    // Near v = 1 the conditional mass crowds against u = 1 and the residual
    // cannot reach the tolerance; stop once no double lies inside the bracket.
    double lo = 0.0, hi = 1.0;
    double u = w;
    double best = u, best_r = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 2000; ++it) {
        const double r = h(u, v) - w;
        if (std::abs(r) < best_r) {
            best_r = std::abs(r);
            best = u;
        }
        if (std::abs(r) < 1e-13) return u;
        if (r > 0.0)
            hi = u;
        else
            lo = u;
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) return best;
        const double dens = pdf(u, v);
        double next = u - r / dens;
        if (!(dens > 0.0) || !(next > lo && next < hi)) next = mid;
        u = next;
    }
    throw NumericalError("h_inv (gumbel_hougaard theta=" + std::to_string(params_[0]) +
                         "): no convergence for w=" + std::to_string(w) +
                         ", v=" + std::to_string(v));
}

double PairCopula::kendall_tau() const {
    switch (family_) {
        case PairFamily::Independence: return 0.0;
        case PairFamily::Gaussian: return 2.0 / kPi * std::asin(params_[0]);
        case PairFamily::GumbelHougaard: return (params_[0] - 1.0) / params_[0];
    }
    return 0.0;
}

double PairCopula::spearman_rho() const {
    switch (family_) {
        case PairFamily::Independence: return 0.0;
        case PairFamily::Gaussian: return 6.0 / kPi * std::asin(params_[0] / 2.0);
        case PairFamily::GumbelHougaard: {
            if (params_[0] == 1.0) return 0.0;
            // rho_S = 12 * int int (C(u,v) - uv) du dv on a tensor Gauss-Legendre grid.
            static const QuadratureRule rule = gauss_legendre(128, 0.0, 1.0);
            double acc = 0.0;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i)
                for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
                    const double u = rule.nodes[i], v = rule.nodes[j];
                    acc += rule.weights[i] * rule.weights[j] * (cdf(u, v) - u * v);
                }
            return 12.0 * acc;
        }
    }
    return 0.0;
}

TailDependence PairCopula::tail_dependence() const {
    if (family_ == PairFamily::GumbelHougaard) return {0.0, 2.0 - std::pow(2.0, 1.0 / params_[0])};
    return {0.0, 0.0};
}

std::vector<double> tau_invert(PairFamily family, double tau) {
    switch (family) {
        case PairFamily::Independence:
            if (tau != 0.0) throw DomainError("independence copula only attains tau = 0");
            return {};
        case PairFamily::Gaussian:
            if (!(tau > -1.0 && tau < 1.0))
                throw DomainError("gaussian copula: tau must lie in (-1, 1)");
            return {std::sin(kPi * tau / 2.0)};
        case PairFamily::GumbelHougaard:
            if (!(tau >= 0.0 && tau < 1.0))
                throw DomainError("gumbel_hougaard copula: tau must lie in [0, 1)");
            return {1.0 / (1.0 - tau)};
    }
    return {};
}

}  // namespace vuq
