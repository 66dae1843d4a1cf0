#include "vineuq/error.hpp"
#include "vineuq/fit.hpp"
#include "vineuq/models.hpp"
#include "vineuq/numerics.hpp"
#include "vineuq/rng.hpp"
#include "vineuq/vine.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace vuq;

namespace {

double partial(double r12, double r13, double r23) {
    return (r23 - r12 * r13) / std::sqrt((1 - r12 * r12) * (1 - r13 * r13));
}

VineModel mixed_cvine() {
    return VineModel(VineKind::CVine, {2, 0, 3, 1},
                     {{PairCopula::gumbel_hougaard(1.8), PairCopula::gaussian(-0.4), PairCopula::gaussian(0.6)},
                      {PairCopula::gumbel_hougaard(1.3), PairCopula::independence()},
                      {PairCopula::gaussian(0.3)}});
}

VineModel mixed_dvine() {
    return VineModel(VineKind::DVine, {1, 3, 0, 2},
                     {{PairCopula::gaussian(0.7), PairCopula::gumbel_hougaard(2.0), PairCopula::gaussian(-0.2)},
                      {PairCopula::gumbel_hougaard(1.2), PairCopula::gaussian(0.25)},
                      {PairCopula::gumbel_hougaard(1.4)}});
}

}  // namespace

TEST_CASE("three-dimensional Gaussian pair vines equal the Gaussian copula") {
    const double r12 = 0.5, r13 = 0.3, r23 = 0.4;
    Eigen::MatrixXd r(3, 3);
    r << 1, r12, r13, r12, 1, r23, r13, r23, 1;
    const GaussianCopula gc(r);
    const VineModel cv(VineKind::CVine, {0, 1, 2},
                       {{PairCopula::gaussian(r12), PairCopula::gaussian(r13)},
                        {PairCopula::gaussian(partial(r12, r13, r23))}});
    // Path 1-2-3; the conditional pair is (1,3 | 2).
    const VineModel dv(VineKind::DVine, {0, 1, 2},
                       {{PairCopula::gaussian(r12), PairCopula::gaussian(r23)},
                        {PairCopula::gaussian(partial(r12, r23, r13))}});
    PseudoRandomSource src(11, Stream::Sampling);
    std::vector<double> u(3);
    for (std::uint64_t k = 0; k < 200; ++k) {
        src.fill(k, u);
        const double ref = std::exp(gc.log_density(u));
        CHECK(std::abs(std::exp(cv.log_density(u)) - ref) < 1e-6 * std::max(1.0, ref));
        CHECK(std::abs(std::exp(dv.log_density(u)) - ref) < 1e-6 * std::max(1.0, ref));
    }
}

TEST_CASE("Rosenblatt round-trip for C- and D-vines") {
    for (const VineModel& v : {mixed_cvine(), mixed_dvine(), truss_vine()}) {
        CAPTURE(to_string(v.kind()));
        const std::size_t m = v.dimension();
        PseudoRandomSource src(5, Stream::Sampling);
        std::vector<double> u(m), w(m), back(m);
        for (std::uint64_t k = 0; k < 2000; ++k) {
            src.fill(k, u);
            v.rosenblatt(u, w);
            v.inverse_rosenblatt(w, back);
            for (std::size_t i = 0; i < m; ++i) CHECK(std::abs(back[i] - u[i]) < 1e-7);
        }
    }
}

TEST_CASE("Rosenblatt of vine samples is uniform and independent") {
    for (const VineModel& v : {mixed_cvine(), mixed_dvine()}) {
        const std::size_t n = 100000;
        const Copula c(v);
        const Matrix u = sample(c, n, 21);
        Matrix w(u.rows(), u.cols());
        for (Eigen::Index r = 0; r < u.rows(); ++r) v.rosenblatt(row_span(u, r), row_span(w, r));
        const auto id = [](double x) { return x; };
        for (Eigen::Index j = 0; j < w.cols(); ++j)
            CHECK(testutil::ks_statistic(testutil::column(w, j), id) < testutil::ks_critical_1pct(n));
        // Under independence tau-hat is approximately N(0, 2(2n+5)/(9n(n-1))).
        const double sd = std::sqrt(2.0 * (2.0 * n + 5) / (9.0 * n * (n - 1.0)));
        const Eigen::MatrixXd tau = kendall_tau_matrix(w);
        for (Eigen::Index i = 0; i < tau.rows(); ++i)
            for (Eigen::Index j = i + 1; j < tau.cols(); ++j) CHECK(std::abs(tau(i, j)) < 4.0 * sd);
        // The original sample is dependent.
        CHECK(std::abs(kendall_tau_matrix(u)(v.order()[0], v.order()[1])) > 20 * sd);
    }
}

TEST_CASE("first-tree taus of samples match the pair copulas") {
    const VineModel v = truss_vine(1.1);
    const Matrix u = sample(Copula(v), 50000, 3);
    const Eigen::MatrixXd tau = kendall_tau_matrix(u);
    for (Eigen::Index j = 1; j < 6; ++j) CHECK(tau(0, j) == doctest::Approx(1.0 / 11.0).epsilon(0.1));
    // Conditionally independent loads share only the root.
    CHECK(tau(1, 2) == doctest::Approx(1.0 / 121.0).epsilon(0.8));
}

TEST_CASE("independence vine Rosenblatt is the identity and density is one") {
    const VineModel v = VineModel::independent(VineKind::CVine, {0, 1, 2, 3});
    const std::vector<double> u = {0.1, 0.4, 0.9, 0.33};
    std::vector<double> w(4);
    v.rosenblatt(u, w);
    for (std::size_t i = 0; i < 4; ++i) CHECK(w[i] == doctest::Approx(u[i]).epsilon(1e-15));
    CHECK(v.log_density(u) == 0.0);
    CHECK(v.parameter_count() == 0);
}

TEST_CASE("edge labels and parameter counts") {
    const VineModel c = mixed_cvine();
    CHECK(c.parameter_count() == 5);
    const auto l = c.edge_label(1, 1);
    CHECK(l.first == 1);
    CHECK(l.second == 3);
    CHECK(l.conditioned_on == std::vector<std::size_t>{0});
    const auto d = mixed_dvine().edge_label(2, 0);
    CHECK(d.first == 0);
    CHECK(d.second == 3);
    CHECK(d.conditioned_on == std::vector<std::size_t>{1, 2});
}

TEST_CASE("structural validation") {
    CHECK_THROWS(VineModel(VineKind::CVine, {0, 0, 1}, {{PairCopula::independence(), PairCopula::independence()},
                                                        {PairCopula::independence()}}));
    CHECK_THROWS(VineModel(VineKind::CVine, {0, 1, 2}, {{PairCopula::independence()}}));
    const VineModel r = VineModel::rvine({0, 1, 2}, {{PairCopula::independence(), PairCopula::independence()},
                                                     {PairCopula::independence()}},
                                         {{0, 0, 0}, {1, 1, 0}, {2, 0, 0}});
    const std::vector<double> u = {0.2, 0.5, 0.7};
    CHECK_THROWS_AS(r.log_density(u), StructuralError);
    Eigen::MatrixXd bad(2, 2);
    bad << 1, 1.5, 1.5, 1;
    CHECK_THROWS(GaussianCopula(bad));
}

TEST_CASE("Gaussian copula Rosenblatt is the Cholesky whitening of normal scores") {
    Eigen::MatrixXd r(3, 3);
    r << 1, 0.6, -0.2, 0.6, 1, 0.1, -0.2, 0.1, 1;
    const GaussianCopula gc(r);
    const Eigen::MatrixXd l = r.llt().matrixL();
    const std::vector<double> u = {0.3, 0.85, 0.1};
    Eigen::Vector3d x;
    for (int i = 0; i < 3; ++i) x(i) = norm_quantile(u[static_cast<std::size_t>(i)]);
    const Eigen::Vector3d z = l.triangularView<Eigen::Lower>().solve(x);
    std::vector<double> w(3), back(3);
    gc.rosenblatt(u, w);
    for (int i = 0; i < 3; ++i) CHECK(w[static_cast<std::size_t>(i)] == doctest::Approx(norm_cdf(z(i))).epsilon(1e-12));
    gc.inverse_rosenblatt(w, back);
    for (std::size_t i = 0; i < 3; ++i) CHECK(back[i] == doctest::Approx(u[i]).epsilon(1e-12));
}

TEST_CASE("sampling is reproducible per seed") {
    const Copula c(mixed_cvine());
    const Matrix a = sample(c, 100, 9), b = sample(c, 100, 9), d = sample(c, 100, 10);
    CHECK(a == b);
    CHECK(a != d);
    CHECK(copula_log_likelihood(c, a) > 0.0);
}
