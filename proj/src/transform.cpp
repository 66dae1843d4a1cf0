#include "vineuq/transform.hpp"

#include "vineuq/error.hpp"
#include "vineuq/kernels.hpp"
#include "vineuq/log.hpp"

#include <cmath>
#include <string>

namespace vuq {

namespace {

template <class Fn>
auto with_component(std::size_t i, Fn&& fn) {
    try {
        return fn();
    } catch (const DomainError& e) {
        throw DomainError("component " + std::to_string(i + 1) + ": " + e.what());
    } catch (const NumericalError& e) {
        throw NumericalError("component " + std::to_string(i + 1) + ": " + e.what());
    }
}

}  // namespace

IsoTransform::IsoTransform(InputModel input, std::vector<Marginal> targets)
    : input_(std::move(input)),
      targets_(std::move(targets)),
      clamps_(std::make_shared<std::atomic<std::size_t>>(0)) {
    if (targets_.empty()) targets_.assign(input_.dimension(), Marginal::standard_normal());
    if (targets_.size() != input_.dimension())
        throw DomainError("IsoTransform: " + std::to_string(targets_.size()) + " targets for a " +
                          std::to_string(input_.dimension()) + "-dimensional input");
    if (input_.copula().dimension() != input_.dimension())
        throw DomainError("IsoTransform: copula dimension does not match marginals");
}

double IsoTransform::clamp_z(std::size_t i, double z) const {
    if (targets_[i].family() != MarginalFamily::StandardNormal || std::abs(z) <= kZClamp) return z;
    if (clamps_->fetch_add(1) == 0)
        log_warning("standard-normal value " + std::to_string(z) + " in component " +
                    std::to_string(i + 1) + " clamped to |z| = 8.2");
    return std::copysign(kZClamp, z);
}

void IsoTransform::forward(std::span<const double> x, std::span<double> z) const {
    const std::size_t m = dimension();
    if (x.size() != m || z.size() != m) throw DomainError("IsoTransform::forward: dimension mismatch");
    std::vector<double> u(m), w(m);
    for (std::size_t i = 0; i < m; ++i)
        u[i] = with_component(i, [&] { return input_.marginals()[i].cdf(x[i]); });
    input_.copula().rosenblatt(u, w);
    for (std::size_t i = 0; i < m; ++i)
        z[i] = clamp_z(i, with_component(i, [&] { return targets_[i].inv_cdf(w[i]); }));
}

void IsoTransform::inverse(std::span<const double> z, std::span<double> x) const {
    const std::size_t m = dimension();
    if (x.size() != m || z.size() != m) throw DomainError("IsoTransform::inverse: dimension mismatch");
    std::vector<double> w(m), u(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (std::isnan(z[i])) throw DomainError("component " + std::to_string(i + 1) + ": NaN input");
        const double zi = clamp_z(i, z[i]);
        w[i] = with_component(i, [&] { return targets_[i].cdf(zi); });
    }
    input_.copula().inverse_rosenblatt(w, u);
    for (std::size_t i = 0; i < m; ++i)
        x[i] = with_component(i, [&] { return input_.marginals()[i].inv_cdf(u[i]); });
}

Matrix IsoTransform::forward(const Matrix& x) const {
    if (static_cast<std::size_t>(x.cols()) != dimension())
        throw DomainError("IsoTransform::forward: column count mismatch");
    Matrix z(x.rows(), x.cols());
    kernels::for_each_row(static_cast<std::size_t>(x.rows()), [&](std::size_t r) {
        const auto row = static_cast<Eigen::Index>(r);
        forward(row_span(x, row), row_span(z, row));
    });
    return z;
}

Matrix IsoTransform::inverse(const Matrix& z) const {
    if (static_cast<std::size_t>(z.cols()) != dimension())
        throw DomainError("IsoTransform::inverse: column count mismatch");
    Matrix x(z.rows(), z.cols());
    kernels::for_each_row(static_cast<std::size_t>(z.rows()), [&](std::size_t r) {
        const auto row = static_cast<Eigen::Index>(r);
        inverse(row_span(z, row), row_span(x, row));
    });
    return x;
}

CompositionalModel::CompositionalModel(ModelPtr model, IsoTransform transform)
    : model_(std::move(model)), transform_(std::move(transform)) {
    if (!model_) throw DomainError("CompositionalModel: null model");
    if (model_->dimension() != transform_.dimension())
        throw DomainError("CompositionalModel: model dimension " + std::to_string(model_->dimension()) +
                          " does not match transform dimension " +
                          std::to_string(transform_.dimension()));
}

double CompositionalModel::evaluate(std::span<const double> z) const {
    std::vector<double> x(transform_.dimension());
    transform_.inverse(z, x);
    return model_->evaluate(x);
}

CompositionalModel compose(ModelPtr model, IsoTransform transform) {
    return {std::move(model), std::move(transform)};
}

}  // namespace vuq
