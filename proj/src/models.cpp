#include "vineuq/models.hpp"

#include "vineuq/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace vuq {

TrussSpec TrussSpec::truss23() {
    constexpr double kE = 2.1e11;
    constexpr double kChord = 2.0e-3;
    constexpr double kDiagonal = 1.0e-3;
    TrussSpec s;
    // Lower chord nodes 0..6 at x = 0, 4, ..., 24; upper chord nodes 7..12 at x = 2, 6, ..., 22.
    for (int i = 0; i < 7; ++i) s.nodes.push_back({4.0 * i, 0.0});
    for (int i = 0; i < 6; ++i) s.nodes.push_back({2.0 + 4.0 * i, 2.0});
    for (std::size_t i = 0; i < 6; ++i) s.bars.push_back({i, i + 1, kChord, kE});
    for (std::size_t i = 0; i < 5; ++i) s.bars.push_back({7 + i, 8 + i, kChord, kE});
    for (std::size_t i = 0; i < 6; ++i) {
        s.bars.push_back({i, 7 + i, kDiagonal, kE});
        s.bars.push_back({i + 1, 7 + i, kDiagonal, kE});
    }
    s.supports = {{0, true, true}, {6, false, true}};
    s.load_nodes = {7, 8, 9, 10, 11, 12};
    return s;
}

void TrussSpec::validate() const {
    const std::size_t n = nodes.size();
    if (n < 2) throw StructuralError("truss needs at least two nodes");
    for (const auto& b : bars) {
        if (b.node_a >= n || b.node_b >= n || b.node_a == b.node_b)
            throw StructuralError("truss bar references an invalid node");
        if (!(b.area > 0.0) || !(b.youngs > 0.0))
            throw StructuralError("truss bar needs positive area and Young's modulus");
    }
    for (const auto& s : supports)
        if (s.node >= n) throw StructuralError("truss support references an invalid node");
    for (std::size_t l : load_nodes)
        if (l >= n) throw StructuralError("truss load references an invalid node");
}

TrussSolver::TrussSolver(TrussSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    const auto ndof = static_cast<Eigen::Index>(2 * spec_.nodes.size());
    k_global_ = Eigen::MatrixXd::Zero(ndof, ndof);
    for (const auto& bar : spec_.bars) {
        const auto& pa = spec_.nodes[bar.node_a];
        const auto& pb = spec_.nodes[bar.node_b];
        const double dx = pb[0] - pa[0], dy = pb[1] - pa[1];
        const double len = std::hypot(dx, dy);
        const double c = dx / len, s = dy / len;
        const double k = bar.youngs * bar.area / len;
        const std::array<double, 4> dir{-c, -s, c, s};
        const std::array<Eigen::Index, 4> dofs{
            static_cast<Eigen::Index>(2 * bar.node_a), static_cast<Eigen::Index>(2 * bar.node_a + 1),
            static_cast<Eigen::Index>(2 * bar.node_b), static_cast<Eigen::Index>(2 * bar.node_b + 1)};
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) k_global_(dofs[i], dofs[j]) += k * dir[i] * dir[j];
    }
    std::vector<bool> fixed(static_cast<std::size_t>(ndof), false);
    for (const auto& sup : spec_.supports) {
        if (sup.fixed_x) fixed[2 * sup.node] = true;
        if (sup.fixed_y) fixed[2 * sup.node + 1] = true;
    }
    for (Eigen::Index d = 0; d < ndof; ++d)
        if (!fixed[static_cast<std::size_t>(d)]) free_dofs_.push_back(d);
    const auto nfree = static_cast<Eigen::Index>(free_dofs_.size());
    k_reduced_.resize(nfree, nfree);
    for (Eigen::Index i = 0; i < nfree; ++i)
        for (Eigen::Index j = 0; j < nfree; ++j)
            k_reduced_(i, j) = k_global_(free_dofs_[i], free_dofs_[j]);
    llt_.compute(k_reduced_);
    // LLT on a singular matrix can still report success with a tiny pivot.
    const double max_diag = k_reduced_.diagonal().maxCoeff();
    const Eigen::MatrixXd l = llt_.matrixL();
    const double min_pivot = l.diagonal().minCoeff();
    if (llt_.info() != Eigen::Success || !(min_pivot * min_pivot > 1e-10 * max_diag))
        throw StructuralError("truss stiffness is singular after support elimination (mechanism)");
}

Eigen::VectorXd TrussSolver::displacements(std::span<const double> loads) const {
    if (loads.size() != spec_.load_nodes.size())
        throw DomainError("truss: expected " + std::to_string(spec_.load_nodes.size()) +
                          " loads, got " + std::to_string(loads.size()));
    Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(2 * spec_.nodes.size()));
    for (std::size_t i = 0; i < loads.size(); ++i)
        f(static_cast<Eigen::Index>(2 * spec_.load_nodes[i] + 1)) -= loads[i];
    const auto nfree = static_cast<Eigen::Index>(free_dofs_.size());
    Eigen::VectorXd f_free(nfree);
    for (Eigen::Index i = 0; i < nfree; ++i) f_free(i) = f(free_dofs_[i]);
    const Eigen::VectorXd d_free = llt_.solve(f_free);
    Eigen::VectorXd d = Eigen::VectorXd::Zero(f.size());
    for (Eigen::Index i = 0; i < nfree; ++i) d(free_dofs_[i]) = d_free(i);
    return d;
}

Eigen::VectorXd TrussSolver::vertical_displacements(std::span<const double> loads) const {
    const Eigen::VectorXd d = displacements(loads);
    Eigen::VectorXd v(static_cast<Eigen::Index>(spec_.nodes.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = d(2 * i + 1);
    return v;
}

double TrussSolver::max_deflection_cm(std::span<const double> loads) const {
    return std::max(0.0, -vertical_displacements(loads).minCoeff()) * 100.0;
}

double truss_deflection(const TrussSpec& spec, std::span<const double> loads) {
    return TrussSolver(spec).max_deflection_cm(loads);
}

TrussModel::TrussModel(TrussSpec spec, double output_scale, std::string name)
    : solver_(std::move(spec)), output_scale_(output_scale), name_(std::move(name)) {}

double TrussModel::evaluate(std::span<const double> loads) const {
    return output_scale_ * solver_.max_deflection_cm(loads);
}

VineModel truss_vine(double theta, std::size_t dim) {
    std::vector<std::size_t> order(dim);
    for (std::size_t i = 0; i < dim; ++i) order[i] = i;
    VineModel v = VineModel::independent(VineKind::CVine, order);
    for (std::size_t e = 0; e + 1 < dim; ++e) v = v.with_pair(0, e, PairCopula::gumbel_hougaard(theta));
    return v;
}

GaussianCopula truss_gaussian(double rho, std::size_t dim) {
    const auto m = static_cast<Eigen::Index>(dim);
    Eigen::MatrixXd r = Eigen::MatrixXd::Identity(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j) {
            if (i == j) continue;
            r(i, j) = (i == 0 || j == 0) ? rho : rho * rho;
        }
    return GaussianCopula(r);
}

InputModel make_truss_input(TrussCopula choice, const std::optional<VineModel>& fitted) {
    std::vector<Marginal> margins(6, Marginal::gumbel_from_moments(kTrussLoadMean, kTrussLoadStd));
    switch (choice) {
        case TrussCopula::Independence: return {margins, IndependenceCopula{6}};
        case TrussCopula::Gaussian: return {margins, truss_gaussian()};
        case TrussCopula::Vine: return {margins, truss_vine()};
        case TrussCopula::VineFitted:
            if (!fitted) throw ConfigError("make_truss_input: fitted vine required");
            return {margins, *fitted};
    }
    throw ConfigError("make_truss_input: unknown copula choice");
}

// ---------------------------------------------------------------------------

AnalyticModel AnalyticModel::linear_sum(std::vector<double> weights) {
    AnalyticModel m(AnalyticKind::LinearSum, weights.size());
    m.weights_ = std::move(weights);
    return m;
}

AnalyticModel AnalyticModel::product(std::size_t dim) { return {AnalyticKind::Product, dim}; }

AnalyticModel AnalyticModel::quadratic(Eigen::MatrixXd a) {
    if (a.rows() != a.cols()) throw DomainError("quadratic model: matrix must be square");
    AnalyticModel m(AnalyticKind::Quadratic, static_cast<std::size_t>(a.rows()));
    m.quad_ = std::move(a);
    return m;
}

std::string AnalyticModel::name() const {
    switch (kind_) {
        case AnalyticKind::LinearSum: return "linear-sum";
        case AnalyticKind::Product: return "product";
        case AnalyticKind::Quadratic: return "quadratic";
    }
    return "analytic";
}

double AnalyticModel::evaluate(std::span<const double> x) const {
    if (x.size() != dim_) throw DomainError("analytic model: dimension mismatch");
    switch (kind_) {
        case AnalyticKind::LinearSum: {
            double s = 0.0;
            for (std::size_t i = 0; i < dim_; ++i) s += weights_[i] * x[i];
            return s;
        }
        case AnalyticKind::Product: {
            double p = 1.0;
            for (double v : x) p *= v;
            return p;
        }
        case AnalyticKind::Quadratic: {
            const Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(dim_));
            return v.dot(quad_ * v);
        }
    }
    return 0.0;
}

AnalyticModel::Moments AnalyticModel::moments(std::span<const double> means,
                                              std::span<const double> stds) const {
    if (means.size() != dim_ || stds.size() != dim_)
        throw DomainError("analytic moments: dimension mismatch");
    switch (kind_) {
        case AnalyticKind::LinearSum: {
            Moments m{0.0, 0.0};
            for (std::size_t i = 0; i < dim_; ++i) {
                m.mean += weights_[i] * means[i];
                m.variance += weights_[i] * weights_[i] * stds[i] * stds[i];
            }
            return m;
        }
        case AnalyticKind::Product: {
            double mean = 1.0, second = 1.0;
            for (std::size_t i = 0; i < dim_; ++i) {
                mean *= means[i];
                second *= stds[i] * stds[i] + means[i] * means[i];
            }
            return {mean, second - mean * mean};
        }
        case AnalyticKind::Quadratic: {
            const auto n = static_cast<Eigen::Index>(dim_);
            const Eigen::MatrixXd a = 0.5 * (quad_ + quad_.transpose());
            Eigen::VectorXd mu(n), var(n);
            for (Eigen::Index i = 0; i < n; ++i) {
                mu(i) = means[static_cast<std::size_t>(i)];
                var(i) = stds[static_cast<std::size_t>(i)] * stds[static_cast<std::size_t>(i)];
            }
            const Eigen::MatrixXd sigma = var.asDiagonal();
            const Eigen::MatrixXd as = a * sigma;
            return {(as).trace() + mu.dot(a * mu),
                    2.0 * (as * as).trace() + 4.0 * mu.dot(a * sigma * a * mu)};
        }
    }
    return {0.0, 0.0};
}

double analytic_eval(const AnalyticModel& m, std::span<const double> x) { return m.evaluate(x); }

}  // namespace vuq
