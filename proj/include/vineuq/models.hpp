#pragma once

#include "vineuq/model.hpp"
#include "vineuq/vine.hpp"

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vuq {

struct TrussBar {
    std::size_t node_a;
    std::size_t node_b;
    double area;     // m^2
    double youngs;   // Pa
};

struct TrussSupport {
    std::size_t node;
    bool fixed_x;
    bool fixed_y;
};

/// Planar pin-jointed truss. Coordinates in metres, loads in newtons.
struct TrussSpec {
    std::vector<std::array<double, 2>> nodes;
    std::vector<TrussBar> bars;
    std::vector<TrussSupport> supports;
    std::vector<std::size_t> load_nodes;  // receive downward loads P1..Pk in order

    /// 23-bar, 13-node benchmark truss: 24 m span, 2 m high, E = 210 GPa,
    /// chord bars 2e-3 m^2, diagonals 1e-3 m^2, pin at (0,0), roller at (24,0).
    static TrussSpec truss23();

    void validate() const;
};

/// Assembles and factorises the reduced stiffness once; solves are cheap and
/// reentrant.
class TrussSolver {
public:
    explicit TrussSolver(TrussSpec spec);

    const TrussSpec& spec() const { return spec_; }

    /// Full 2N x 2N global stiffness (before support elimination).
    const Eigen::MatrixXd& global_stiffness() const { return k_global_; }
    /// Stiffness restricted to free degrees of freedom.
    const Eigen::MatrixXd& reduced_stiffness() const { return k_reduced_; }

    /// Nodal displacements (u_x, u_y per node, metres) for downward loads in N.
    Eigen::VectorXd displacements(std::span<const double> loads) const;
    /// Vertical nodal displacements, metres, positive upward.
    Eigen::VectorXd vertical_displacements(std::span<const double> loads) const;
    /// Largest downward vertical displacement in cm (positive down).
    double max_deflection_cm(std::span<const double> loads) const;

private:
    TrussSpec spec_;
    Eigen::MatrixXd k_global_;
    Eigen::MatrixXd k_reduced_;
    std::vector<Eigen::Index> free_dofs_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
};

/// Largest downward deflection (cm) of the truss under the given loads.
double truss_deflection(const TrussSpec& spec, std::span<const double> loads);

/// Truss as a computational model of its loads. output_scale converts the
/// deflection in cm (1.0 keeps cm, 0.01 reports metres).
class TrussModel final : public ComputationalModel {
public:
    explicit TrussModel(TrussSpec spec = TrussSpec::truss23(), double output_scale = 1.0,
                        std::string name = "truss23");

    double evaluate(std::span<const double> loads) const override;
    std::size_t dimension() const override { return solver_.spec().load_nodes.size(); }
    std::string name() const override { return name_; }

    const TrussSolver& solver() const { return solver_; }

private:
    TrussSolver solver_;
    double output_scale_;
    std::string name_;
};

enum class TrussCopula { Independence, Gaussian, Vine, VineFitted };

/// Load model for the truss: six Gumbel marginals (mean 5e4 N, std 7.5e3 N)
/// with the chosen copula. VineFitted needs the fitted vine.
InputModel make_truss_input(TrussCopula choice,
                            const std::optional<VineModel>& fitted = std::nullopt);

/// C-vine rooted at P1 with Gumbel-Hougaard(theta) first-tree pairs and
/// independence conditionals.
VineModel truss_vine(double theta = 1.1, std::size_t dim = 6);
/// One-factor Gaussian copula: rho_{1j} = rho, rho_{ij} = rho^2 for i, j != 1.
GaussianCopula truss_gaussian(double rho = 0.141, std::size_t dim = 6);

inline constexpr double kTrussLoadMean = 5.0e4;
inline constexpr double kTrussLoadStd = 7.5e3;

enum class AnalyticKind { LinearSum, Product, Quadratic };

/// Closed-form test functions with known moments.
///   LinearSum: y = sum_i w_i x_i
///   Product:   y = prod_i x_i
///   Quadratic: y = x^T A x
class AnalyticModel final : public ComputationalModel {
public:
    static AnalyticModel linear_sum(std::vector<double> weights);
    static AnalyticModel product(std::size_t dim);
    static AnalyticModel quadratic(Eigen::MatrixXd a);

    double evaluate(std::span<const double> x) const override;
    std::size_t dimension() const override { return dim_; }
    std::string name() const override;

    AnalyticKind kind() const { return kind_; }

    struct Moments {
        double mean;
        double variance;
    };
    /// Exact mean and variance for independent inputs with the given means
    /// and standard deviations. Quadratic additionally assumes Gaussian inputs.
    Moments moments(std::span<const double> means, std::span<const double> stds) const;

private:
    AnalyticModel(AnalyticKind kind, std::size_t dim) : kind_(kind), dim_(dim) {}

    AnalyticKind kind_;
    std::size_t dim_;
    std::vector<double> weights_;
    Eigen::MatrixXd quad_;
};

double analytic_eval(const AnalyticModel& m, std::span<const double> x);

}  // namespace vuq
