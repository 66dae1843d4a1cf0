#include "vineuq/margins.hpp"

#include "vineuq/error.hpp"
#include "vineuq/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace vuq {

std::string_view to_string(MarginalFamily f) {
    switch (f) {
        case MarginalFamily::Uniform01: return "uniform01";
        case MarginalFamily::StandardNormal: return "standard_normal";
        case MarginalFamily::Gumbel: return "gumbel";
        case MarginalFamily::Lognormal: return "lognormal";
        case MarginalFamily::Normal: return "normal";
    }
    return "unknown";
}

MarginalFamily marginal_family_from_string(std::string_view name) {
    if (name == "uniform01" || name == "uniform") return MarginalFamily::Uniform01;
    if (name == "standard_normal" || name == "stdnormal") return MarginalFamily::StandardNormal;
    if (name == "gumbel") return MarginalFamily::Gumbel;
    if (name == "lognormal") return MarginalFamily::Lognormal;
    if (name == "normal" || name == "gaussian") return MarginalFamily::Normal;
    throw ConfigError("unknown marginal family '" + std::string(name) + "'");
}

Marginal Marginal::uniform01() { return {MarginalFamily::Uniform01, {}}; }
Marginal Marginal::standard_normal() { return {MarginalFamily::StandardNormal, {}}; }
Marginal Marginal::normal(double mean, double std) { return {MarginalFamily::Normal, {mean, std}}; }
Marginal Marginal::gumbel(double location, double scale) {
    return {MarginalFamily::Gumbel, {location, scale}};
}
Marginal Marginal::gumbel_from_moments(double mean, double std) {
    const double beta = std::sqrt(6.0) * std / kPi;
    return gumbel(mean - kEulerGamma * beta, beta);
}
Marginal Marginal::lognormal(double mu_log, double sigma_log) {
    return {MarginalFamily::Lognormal, {mu_log, sigma_log}};
}
Marginal Marginal::lognormal_from_moments(double mean, double cov) {
    if (!(mean > 0.0)) throw DomainError("lognormal: mean must be positive");
    const double s2 = std::log1p(cov * cov);
    return lognormal(std::log(mean) - 0.5 * s2, std::sqrt(s2));
}

Marginal::Marginal(MarginalFamily family, std::vector<double> params)
    : family_(family), params_(std::move(params)) {
    std::size_t expected = 0;
    switch (family_) {
        case MarginalFamily::Uniform01:
        case MarginalFamily::StandardNormal: expected = 0; break;
        case MarginalFamily::Gumbel:
        case MarginalFamily::Lognormal:
        case MarginalFamily::Normal: expected = 2; break;
    }
    if (params_.size() != expected)
        throw DomainError("marginal " + std::string(to_string(family_)) + " expects " +
                          std::to_string(expected) + " parameters");
    for (double p : params_)
        if (!std::isfinite(p)) throw DomainError("marginal parameters must be finite");
    if (expected == 2 && !(params_[1] > 0.0))
        throw DomainError("marginal " + std::string(to_string(family_)) +
                          ": scale parameter must be positive");
}

bool Marginal::in_domain(double x) const {
    if (std::isnan(x)) return false;
    switch (family_) {
        case MarginalFamily::Uniform01: return x >= 0.0 && x <= 1.0;
        case MarginalFamily::Lognormal: return x > 0.0;
        default: return true;
    }
}

void Marginal::check_domain(double x, const char* op) const {
    if (!in_domain(x))
        throw DomainError(std::string(op) + ": x=" + std::to_string(x) + " outside the domain of " +
                          std::string(to_string(family_)));
}

double Marginal::cdf(double x) const {
    check_domain(x, "cdf");
    switch (family_) {
        case MarginalFamily::Uniform01: return x;
        case MarginalFamily::StandardNormal: return norm_cdf(x);
        case MarginalFamily::Normal: return norm_cdf((x - params_[0]) / params_[1]);
        case MarginalFamily::Gumbel: return std::exp(-std::exp(-(x - params_[0]) / params_[1]));
        case MarginalFamily::Lognormal: return norm_cdf((std::log(x) - params_[0]) / params_[1]);
    }
    return 0.0;
}

double Marginal::inv_cdf(double p) const {
    if (!(p >= 0.0 && p <= 1.0))
        throw DomainError("inv_cdf: probability " + std::to_string(p) + " outside [0, 1]");
    p = std::clamp(p, kProbEps, 1.0 - kProbEps);
    switch (family_) {
        case MarginalFamily::Uniform01: return p;
        case MarginalFamily::StandardNormal: return norm_quantile(p);
        case MarginalFamily::Normal: return params_[0] + params_[1] * norm_quantile(p);
        case MarginalFamily::Gumbel: {
            const double log_p = p > 0.5 ? std::log1p(p - 1.0) : std::log(p);
            return params_[0] - params_[1] * std::log(-log_p);
        }
        case MarginalFamily::Lognormal:
            return std::exp(params_[0] + params_[1] * norm_quantile(p));
    }
    return 0.0;
}

double Marginal::pdf(double x) const {
    check_domain(x, "pdf");
    switch (family_) {
        case MarginalFamily::Uniform01: return 1.0;
        case MarginalFamily::StandardNormal: return norm_pdf(x);
        case MarginalFamily::Normal: return norm_pdf((x - params_[0]) / params_[1]) / params_[1];
        case MarginalFamily::Gumbel: {
            const double t = (x - params_[0]) / params_[1];
            return std::exp(-t - std::exp(-t)) / params_[1];
        }
        case MarginalFamily::Lognormal:
            return norm_pdf((std::log(x) - params_[0]) / params_[1]) / (params_[1] * x);
    }
    return 0.0;
}

double Marginal::mean() const {
    switch (family_) {
        case MarginalFamily::Uniform01: return 0.5;
        case MarginalFamily::StandardNormal: return 0.0;
        case MarginalFamily::Normal: return params_[0];
        case MarginalFamily::Gumbel: return params_[0] + kEulerGamma * params_[1];
        case MarginalFamily::Lognormal: return std::exp(params_[0] + 0.5 * params_[1] * params_[1]);
    }
    return 0.0;
}

double Marginal::std() const {
    switch (family_) {
        case MarginalFamily::Uniform01: return std::sqrt(1.0 / 12.0);
        case MarginalFamily::StandardNormal: return 1.0;
        case MarginalFamily::Normal: return params_[1];
        case MarginalFamily::Gumbel: return kPi * params_[1] / std::sqrt(6.0);
        case MarginalFamily::Lognormal: {
            const double s2 = params_[1] * params_[1];
            return mean() * std::sqrt(std::expm1(s2));
        }
    }
    return 0.0;
}

double Marginal::scale() const {
    return family_ == MarginalFamily::Gumbel ? params_[1] : std();
}

}  // namespace vuq
