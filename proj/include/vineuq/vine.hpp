#pragma once

#include "vineuq/margins.hpp"
#include "vineuq/paircop.hpp"
#include "vineuq/types.hpp"

#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace vuq {

class UniformSource;

enum class VineKind { CVine, DVine, RVine };

std::string_view to_string(VineKind k);
VineKind vine_kind_from_string(std::string_view name);

/// Simplified C- or D-vine copula.
///
/// order[p] is the variable placed at position p (0-based). For a C-vine,
/// trees[t][e] couples positions t and t+1+e given positions 0..t-1. For a
/// D-vine, trees[t][e] couples positions e and e+t+1 given the positions in
/// between. The first pair-copula argument always belongs to the lower
/// position.
///
/// RVine models are kept only for serialisation round-trips; density and
/// transform operations reject them with StructuralError.
class VineModel {
public:
    VineModel(VineKind kind, std::vector<std::size_t> order,
              std::vector<std::vector<PairCopula>> trees);

    /// All pair copulas set to independence.
    static VineModel independent(VineKind kind, std::vector<std::size_t> order);

    /// General R-vine kept in serialised form (structure matrix, 0-based).
    static VineModel rvine(std::vector<std::size_t> order, std::vector<std::vector<PairCopula>> trees,
                           std::vector<std::vector<std::size_t>> structure);
    const std::vector<std::vector<std::size_t>>& structure() const { return structure_; }

    VineKind kind() const { return kind_; }
    std::size_t dimension() const { return order_.size(); }
    const std::vector<std::size_t>& order() const { return order_; }
    const std::vector<std::vector<PairCopula>>& trees() const { return trees_; }
    const PairCopula& pair(std::size_t tree, std::size_t edge) const { return trees_[tree][edge]; }

    /// Positions (in the ordering) joined by edge (tree, edge), and its conditioning set.
    struct EdgeLabel {
        std::size_t first, second;
        std::vector<std::size_t> conditioned_on;
    };
    EdgeLabel edge_label(std::size_t tree, std::size_t edge) const;

    std::size_t parameter_count() const;

    double log_density(std::span<const double> u) const;

    /// w[order[p]] = C(u at p | u at positions < p). Output indexed by variable.
    void rosenblatt(std::span<const double> u, std::span<double> w) const;
    void inverse_rosenblatt(std::span<const double> w, std::span<double> u) const;

    VineModel with_pair(std::size_t tree, std::size_t edge, PairCopula pc) const;

    bool operator==(const VineModel&) const = default;

private:
    void require_supported() const;
    void rosenblatt_cvine(std::span<const double> up, std::span<double> wp) const;
    void rosenblatt_dvine(std::span<const double> up, std::span<double> wp) const;
    void inverse_cvine(std::span<const double> wp, std::span<double> up) const;
    void inverse_dvine(std::span<const double> wp, std::span<double> up) const;

    VineKind kind_;
    std::vector<std::size_t> order_;
    std::vector<std::vector<PairCopula>> trees_;
    std::vector<std::vector<std::size_t>> structure_;
};

struct IndependenceCopula {
    std::size_t dimension;
    bool operator==(const IndependenceCopula&) const = default;
};

/// M-variate Gaussian copula with correlation matrix R (symmetric, unit
/// diagonal, positive definite).
class GaussianCopula {
public:
    explicit GaussianCopula(Eigen::MatrixXd correlation);

    std::size_t dimension() const { return static_cast<std::size_t>(corr_.rows()); }
    const Eigen::MatrixXd& correlation() const { return corr_; }
    const Eigen::MatrixXd& cholesky() const { return chol_; }

    double log_density(std::span<const double> u) const;
    void rosenblatt(std::span<const double> u, std::span<double> w) const;
    void inverse_rosenblatt(std::span<const double> w, std::span<double> u) const;

    bool operator==(const GaussianCopula& o) const { return corr_ == o.corr_; }

private:
    Eigen::MatrixXd corr_;
    Eigen::MatrixXd chol_;  // lower triangular
    Eigen::MatrixXd precision_minus_identity_;
    double log_det_ = 0.0;
};

/// An M-copula: independence, Gaussian, or vine.
class Copula {
public:
    using Variant = std::variant<IndependenceCopula, GaussianCopula, VineModel>;

    Copula(IndependenceCopula c) : impl_(c) {}
    Copula(GaussianCopula c) : impl_(std::move(c)) {}
    Copula(VineModel c) : impl_(std::move(c)) {}

    const Variant& variant() const { return impl_; }
    std::size_t dimension() const;
    std::string_view label() const;

    double log_density(std::span<const double> u) const;
    void rosenblatt(std::span<const double> u, std::span<double> w) const;
    void inverse_rosenblatt(std::span<const double> w, std::span<double> u) const;

    bool operator==(const Copula&) const = default;

private:
    Variant impl_;
};

/// Sum of row log densities; errors carry the offending row index.
double copula_log_likelihood(const Copula& c, const Matrix& u);

/// n rows from the copula via inverse Rosenblatt of the source's uniforms.
Matrix sample(const Copula& c, std::size_t n, std::uint64_t seed);
Matrix sample(const Copula& c, std::size_t n, const UniformSource& source);

/// Joint distribution of marginals coupled by a copula.
class InputModel {
public:
    InputModel(std::vector<Marginal> marginals, Copula copula);

    std::size_t dimension() const { return marginals_.size(); }
    const std::vector<Marginal>& marginals() const { return marginals_; }
    const Copula& copula() const { return copula_; }

    double joint_pdf(std::span<const double> x) const;

    void to_uniform(std::span<const double> x, std::span<double> u) const;
    void to_physical(std::span<const double> u, std::span<double> x) const;
    Matrix to_uniform(const Matrix& x) const;
    Matrix to_physical(const Matrix& u) const;

    Matrix sample(std::size_t n, std::uint64_t seed) const;

    bool operator==(const InputModel&) const = default;

private:
    std::vector<Marginal> marginals_;
    Copula copula_;
};

}  // namespace vuq
