#include "vineuq/vine.hpp"

#include "vineuq/error.hpp"
#include "vineuq/kernels.hpp"
#include "vineuq/numerics.hpp"
#include "vineuq/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace vuq {

std::string_view to_string(VineKind k) {
    switch (k) {
        case VineKind::CVine: return "cvine";
        case VineKind::DVine: return "dvine";
        case VineKind::RVine: return "rvine";
    }
    return "unknown";
}

VineKind vine_kind_from_string(std::string_view name) {
    if (name == "cvine" || name == "c") return VineKind::CVine;
    if (name == "dvine" || name == "d") return VineKind::DVine;
    if (name == "rvine" || name == "r") return VineKind::RVine;
    throw ConfigError("unknown vine kind '" + std::string(name) + "'");
}

namespace {

void check_permutation(const std::vector<std::size_t>& order) {
    std::vector<bool> seen(order.size(), false);
    for (std::size_t v : order) {
        if (v >= order.size() || seen[v])
            throw DomainError("vine order is not a permutation of the variables");
        seen[v] = true;
    }
}

std::string edge_where(std::size_t tree, std::size_t edge) {
    return "tree " + std::to_string(tree + 1) + ", edge " + std::to_string(edge + 1);
}

}  // namespace

VineModel::VineModel(VineKind kind, std::vector<std::size_t> order,
                     std::vector<std::vector<PairCopula>> trees)
    : kind_(kind), order_(std::move(order)), trees_(std::move(trees)) {
    const std::size_t m = order_.size();
    if (m < 2) throw DomainError("vine needs at least two variables");
    check_permutation(order_);
    if (trees_.size() != m - 1)
        throw DomainError("vine with " + std::to_string(m) + " variables needs " +
                          std::to_string(m - 1) + " trees, got " + std::to_string(trees_.size()));
    for (std::size_t t = 0; t < trees_.size(); ++t)
        if (trees_[t].size() != m - 1 - t)
            throw DomainError("vine tree " + std::to_string(t + 1) + " must hold " +
                              std::to_string(m - 1 - t) + " pair copulas, got " +
                              std::to_string(trees_[t].size()));
}

VineModel VineModel::independent(VineKind kind, std::vector<std::size_t> order) {
    const std::size_t m = order.size();
    std::vector<std::vector<PairCopula>> trees;
    for (std::size_t t = 0; t + 1 < m; ++t)
        trees.emplace_back(m - 1 - t, PairCopula::independence());
    return {kind, std::move(order), std::move(trees)};
}

VineModel VineModel::rvine(std::vector<std::size_t> order,
                           std::vector<std::vector<PairCopula>> trees,
                           std::vector<std::vector<std::size_t>> structure) {
    VineModel v(VineKind::RVine, std::move(order), std::move(trees));
    v.structure_ = std::move(structure);
    return v;
}

VineModel::EdgeLabel VineModel::edge_label(std::size_t tree, std::size_t edge) const {
    EdgeLabel lbl{};
    if (kind_ == VineKind::DVine) {
        lbl.first = edge;
        lbl.second = edge + tree + 1;
        for (std::size_t p = edge + 1; p < lbl.second; ++p) lbl.conditioned_on.push_back(p);
    } else {
        lbl.first = tree;
        lbl.second = tree + 1 + edge;
        for (std::size_t p = 0; p < tree; ++p) lbl.conditioned_on.push_back(p);
    }
    return lbl;
}

std::size_t VineModel::parameter_count() const {
    std::size_t k = 0;
    for (const auto& tree : trees_)
        for (const auto& pc : tree) k += pc.parameter_count();
    return k;
}

VineModel VineModel::with_pair(std::size_t tree, std::size_t edge, PairCopula pc) const {
    VineModel out = *this;
    out.trees_.at(tree).at(edge) = std::move(pc);
    return out;
}

void VineModel::require_supported() const {
    if (kind_ == VineKind::RVine)
        throw StructuralError(
            "unsupported structure: only C- and D-vines support density and transforms");
}

double VineModel::log_density(std::span<const double> u) const {
    require_supported();
    const std::size_t m = dimension();
    if (u.size() != m) throw DomainError("vine log_density: dimension mismatch");
    double logd = 0.0;
    auto accumulate = [&](double term, std::size_t t, std::size_t e) {
        if (!std::isfinite(term))
            throw NumericalError("vine density: non-finite pair density at " + edge_where(t, e));
        logd += term;
    };
    if (kind_ == VineKind::CVine) {
        // cur[k] holds u_{k | 0..t-1} for k >= t.
        std::vector<double> cur(m);
        for (std::size_t p = 0; p < m; ++p) cur[p] = std::clamp(u[order_[p]], kUnitClamp, 1.0 - kUnitClamp);
        for (std::size_t t = 0; t + 1 < m; ++t) {
            for (std::size_t e = 0; t + 1 + e < m; ++e) {
                const PairCopula& pc = trees_[t][e];
                const std::size_t k = t + 1 + e;
                accumulate(pc.log_pdf(cur[t], cur[k]), t, e);
            }
            if (t + 2 < m)
                for (std::size_t e = 0; t + 1 + e < m; ++e) {
                    const std::size_t k = t + 1 + e;
                    cur[k] = trees_[t][e].h_first(cur[t], cur[k]);
                }
        }
        return logd;
    }
    // D-vine: lhs[i] = u_{i | i+1..i+t}, rhs[i] = u_{i+t | i..i+t-1}.
    std::vector<double> lhs(m), rhs(m);
    for (std::size_t p = 0; p < m; ++p) lhs[p] = rhs[p] = std::clamp(u[order_[p]], kUnitClamp, 1.0 - kUnitClamp);
    for (std::size_t t = 0; t + 1 < m; ++t) {
        const std::size_t n_edges = m - 1 - t;
        for (std::size_t i = 0; i < n_edges; ++i) {
            const PairCopula& pc = trees_[t][i];
            const double a = lhs[i], b = rhs[i + 1];
            accumulate(pc.log_pdf(a, b), t, i);
            if (t + 2 < m) {
                lhs[i] = pc.h(a, b);
                rhs[i] = pc.h_first(a, b);
            }
        }
    }
    return logd;
}

void VineModel::rosenblatt_cvine(std::span<const double> up, std::span<double> wp) const {
    const std::size_t m = dimension();
    for (std::size_t k = 0; k < m; ++k) {
        double x = up[k];
        for (std::size_t j = 0; j < k; ++j) x = trees_[j][k - j - 1].h_first(wp[j], x);
        wp[k] = x;
    }
}

void VineModel::inverse_cvine(std::span<const double> wp, std::span<double> up) const {
    const std::size_t m = dimension();
    for (std::size_t k = 0; k < m; ++k) {
        double x = wp[k];
        for (std::size_t j = k; j-- > 0;) x = trees_[j][k - j - 1].h_first_inv(wp[j], x);
        up[k] = x;
    }
}

namespace {

// Triangular storage for D-vine conditional values: value(t, i), t + i < m.
class Triangle {
public:
    explicit Triangle(std::size_t m) : m_(m), data_(m * m, 0.0) {}
    double& operator()(std::size_t t, std::size_t i) { return data_[t * m_ + i]; }

private:
    std::size_t m_;
    std::vector<double> data_;
};

}  // namespace

void VineModel::rosenblatt_dvine(std::span<const double> up, std::span<double> wp) const {
    const std::size_t m = dimension();
    Triangle lhs(m), rhs(m);
    for (std::size_t k = 0; k < m; ++k) {
        lhs(0, k) = rhs(0, k) = up[k];
        for (std::size_t t = 0; t < k; ++t) {
            const std::size_t i = k - t - 1;
            const PairCopula& pc = trees_[t][i];
            const double a = lhs(t, i), b = rhs(t, i + 1);
            rhs(t + 1, i) = pc.h_first(a, b);
            lhs(t + 1, i) = pc.h(a, b);
        }
        wp[k] = rhs(k, 0);
    }
}

void VineModel::inverse_dvine(std::span<const double> wp, std::span<double> up) const {
    const std::size_t m = dimension();
    Triangle lhs(m), rhs(m);
    for (std::size_t k = 0; k < m; ++k) {
        rhs(k, 0) = wp[k];
        for (std::size_t t = k; t-- > 0;) {
            const std::size_t i = k - t - 1;
            rhs(t, i + 1) = trees_[t][i].h_first_inv(lhs(t, i), rhs(t + 1, i));
        }
        up[k] = rhs(0, k);
        lhs(0, k) = up[k];
        for (std::size_t t = 0; t < k; ++t) {
            const std::size_t i = k - t - 1;
            lhs(t + 1, i) = trees_[t][i].h(lhs(t, i), rhs(t, i + 1));
        }
    }
}

void VineModel::rosenblatt(std::span<const double> u, std::span<double> w) const {
    require_supported();
    const std::size_t m = dimension();
    if (u.size() != m || w.size() != m) throw DomainError("vine rosenblatt: dimension mismatch");
    std::vector<double> up(m), wp(m);
    for (std::size_t p = 0; p < m; ++p) up[p] = u[order_[p]];
    if (kind_ == VineKind::CVine)
        rosenblatt_cvine(up, wp);
    else
        rosenblatt_dvine(up, wp);
    for (std::size_t p = 0; p < m; ++p) w[order_[p]] = wp[p];
}

void VineModel::inverse_rosenblatt(std::span<const double> w, std::span<double> u) const {
    require_supported();
    const std::size_t m = dimension();
    if (u.size() != m || w.size() != m)
        throw DomainError("vine inverse_rosenblatt: dimension mismatch");
    std::vector<double> up(m), wp(m);
    for (std::size_t p = 0; p < m; ++p) wp[p] = w[order_[p]];
    if (kind_ == VineKind::CVine)
        inverse_cvine(wp, up);
    else
        inverse_dvine(wp, up);
    for (std::size_t p = 0; p < m; ++p) u[order_[p]] = up[p];
}

// ---------------------------------------------------------------------------

GaussianCopula::GaussianCopula(Eigen::MatrixXd correlation) : corr_(std::move(correlation)) {
    const Eigen::Index m = corr_.rows();
    if (m < 1 || corr_.cols() != m) throw DomainError("gaussian copula: correlation must be square");
    for (Eigen::Index i = 0; i < m; ++i) {
        if (std::abs(corr_(i, i) - 1.0) > 1e-12)
            throw DomainError("gaussian copula: correlation diagonal must be 1");
        for (Eigen::Index j = 0; j < i; ++j)
            if (std::abs(corr_(i, j) - corr_(j, i)) > 1e-12)
                throw DomainError("gaussian copula: correlation must be symmetric");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(corr_);
    if (llt.info() != Eigen::Success)
        throw DomainError("gaussian copula: correlation must be positive definite");
    chol_ = llt.matrixL();
    log_det_ = 2.0 * chol_.diagonal().array().log().sum();
    precision_minus_identity_ =
        llt.solve(Eigen::MatrixXd::Identity(m, m)) - Eigen::MatrixXd::Identity(m, m);
}

double GaussianCopula::log_density(std::span<const double> u) const {
    const auto m = static_cast<Eigen::Index>(dimension());
    if (static_cast<Eigen::Index>(u.size()) != m)
        throw DomainError("gaussian copula: dimension mismatch");
    Eigen::VectorXd x(m);
    for (Eigen::Index i = 0; i < m; ++i) x(i) = norm_quantile(std::clamp(u[i], kUnitClamp, 1.0 - kUnitClamp));
    return -0.5 * log_det_ - 0.5 * x.dot(precision_minus_identity_ * x);
}

void GaussianCopula::rosenblatt(std::span<const double> u, std::span<double> w) const {
    const auto m = static_cast<Eigen::Index>(dimension());
    if (static_cast<Eigen::Index>(u.size()) != m || static_cast<Eigen::Index>(w.size()) != m)
        throw DomainError("gaussian copula rosenblatt: dimension mismatch");
    Eigen::VectorXd x(m);
    for (Eigen::Index i = 0; i < m; ++i) x(i) = norm_quantile(u[i]);
    chol_.triangularView<Eigen::Lower>().solveInPlace(x);
    for (Eigen::Index i = 0; i < m; ++i) w[i] = norm_cdf(x(i));
}

void GaussianCopula::inverse_rosenblatt(std::span<const double> w, std::span<double> u) const {
    const auto m = static_cast<Eigen::Index>(dimension());
    if (static_cast<Eigen::Index>(u.size()) != m || static_cast<Eigen::Index>(w.size()) != m)
        throw DomainError("gaussian copula inverse_rosenblatt: dimension mismatch");
    Eigen::VectorXd z(m);
    for (Eigen::Index i = 0; i < m; ++i) z(i) = norm_quantile(w[i]);
    const Eigen::VectorXd x = chol_.triangularView<Eigen::Lower>() * z;
    for (Eigen::Index i = 0; i < m; ++i) u[i] = norm_cdf(x(i));
}

// ---------------------------------------------------------------------------

std::size_t Copula::dimension() const {
    return std::visit(
        [](const auto& c) -> std::size_t {
            if constexpr (std::is_same_v<std::decay_t<decltype(c)>, IndependenceCopula>)
                return c.dimension;
            else
                return c.dimension();
        },
        impl_);
}

std::string_view Copula::label() const {
    switch (impl_.index()) {
        case 0: return "independence";
        case 1: return "gaussian";
        default: return "vine";
    }
}

double Copula::log_density(std::span<const double> u) const {
    if (u.size() != dimension()) throw DomainError("copula log_density: dimension mismatch");
    if (std::holds_alternative<IndependenceCopula>(impl_)) return 0.0;
    if (const auto* g = std::get_if<GaussianCopula>(&impl_)) return g->log_density(u);
    return std::get<VineModel>(impl_).log_density(u);
}

void Copula::rosenblatt(std::span<const double> u, std::span<double> w) const {
    if (u.size() != dimension() || w.size() != dimension())
        throw DomainError("copula rosenblatt: dimension mismatch");
    if (std::holds_alternative<IndependenceCopula>(impl_)) {
        std::copy(u.begin(), u.end(), w.begin());
        return;
    }
    if (const auto* g = std::get_if<GaussianCopula>(&impl_)) return g->rosenblatt(u, w);
    std::get<VineModel>(impl_).rosenblatt(u, w);
}

void Copula::inverse_rosenblatt(std::span<const double> w, std::span<double> u) const {
    if (u.size() != dimension() || w.size() != dimension())
        throw DomainError("copula inverse_rosenblatt: dimension mismatch");
    if (std::holds_alternative<IndependenceCopula>(impl_)) {
        std::copy(w.begin(), w.end(), u.begin());
        return;
    }
    if (const auto* g = std::get_if<GaussianCopula>(&impl_)) return g->inverse_rosenblatt(w, u);
    std::get<VineModel>(impl_).inverse_rosenblatt(w, u);
}

double copula_log_likelihood(const Copula& c, const Matrix& u) {
    if (static_cast<std::size_t>(u.cols()) != c.dimension())
        throw DomainError("copula_log_likelihood: column count does not match copula dimension");
    double total = 0.0;
    for (Eigen::Index r = 0; r < u.rows(); ++r) {
        double term;
        try {
            term = c.log_density(row_span(u, r));
        } catch (const std::exception& e) {
            throw NumericalError("log-likelihood row " + std::to_string(r) + ": " + e.what());
        }
        if (!std::isfinite(term))
            throw NumericalError("log-likelihood row " + std::to_string(r) + ": non-finite density");
        total += term;
    }
    return total;
}

Matrix sample(const Copula& c, std::size_t n, std::uint64_t seed) {
    return sample(c, n, PseudoRandomSource(seed, Stream::Sampling));
}

Matrix sample(const Copula& c, std::size_t n, const UniformSource& source) {
    if (n < 1) throw DomainError("sample: n must be at least 1");
    return kernels::sample_copula(c, n, source);
}

// ---------------------------------------------------------------------------

InputModel::InputModel(std::vector<Marginal> marginals, Copula copula)
    : marginals_(std::move(marginals)), copula_(std::move(copula)) {
    if (marginals_.size() != copula_.dimension())
        throw DomainError("input model: " + std::to_string(marginals_.size()) +
                          " marginals but copula dimension " +
                          std::to_string(copula_.dimension()));
}

double InputModel::joint_pdf(std::span<const double> x) const {
    const std::size_t m = dimension();
    if (x.size() != m) throw DomainError("joint_pdf: dimension mismatch");
    std::vector<double> u(m);
    double log_f = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        u[i] = marginals_[i].cdf(x[i]);
        const double f = marginals_[i].pdf(x[i]);
        if (f <= 0.0) return 0.0;
        log_f += std::log(f);
    }
    return std::exp(copula_.log_density(u) + log_f);
}

void InputModel::to_uniform(std::span<const double> x, std::span<double> u) const {
    if (x.size() != dimension() || u.size() != dimension())
        throw DomainError("to_uniform: dimension mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) {
        try {
            u[i] = marginals_[i].cdf(x[i]);
        } catch (const DomainError& e) {
            throw DomainError("component " + std::to_string(i) + ": " + e.what());
        }
    }
}

void InputModel::to_physical(std::span<const double> u, std::span<double> x) const {
    if (x.size() != dimension() || u.size() != dimension())
        throw DomainError("to_physical: dimension mismatch");
    for (std::size_t i = 0; i < u.size(); ++i) {
        try {
            x[i] = marginals_[i].inv_cdf(u[i]);
        } catch (const DomainError& e) {
            throw DomainError("component " + std::to_string(i) + ": " + e.what());
        }
    }
}

Matrix InputModel::to_uniform(const Matrix& x) const {
    Matrix u(x.rows(), x.cols());
    kernels::for_each_row(static_cast<std::size_t>(x.rows()), [&](std::size_t r) {
        to_uniform(row_span(x, static_cast<Eigen::Index>(r)), row_span(u, static_cast<Eigen::Index>(r)));
    });
    return u;
}

Matrix InputModel::to_physical(const Matrix& u) const {
    Matrix x(u.rows(), u.cols());
    kernels::for_each_row(static_cast<std::size_t>(u.rows()), [&](std::size_t r) {
        to_physical(row_span(u, static_cast<Eigen::Index>(r)), row_span(x, static_cast<Eigen::Index>(r)));
    });
    return x;
}

Matrix InputModel::sample(std::size_t n, std::uint64_t seed) const {
    return to_physical(vuq::sample(copula_, n, seed));
}

}  // namespace vuq
