#include "vineuq/error.hpp"
#include "vineuq/fit.hpp"
#include "vineuq/models.hpp"
#include "vineuq/rng.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

using namespace vuq;

namespace {

Eigen::MatrixXd tau3(double t12, double t13, double t23) {
    Eigen::MatrixXd t(3, 3);
    t << 1, t12, t13, t12, 1, t23, t13, t23, 1;
    return t;
}

Matrix pair_sample(const PairCopula& pc, std::size_t n, std::uint64_t seed) {
    return sample(Copula(VineModel(VineKind::CVine, {0, 1}, {{pc}})), n, seed);
}

// Profile log-likelihood maximiser: grid of step 10*step, then step around the best node.
double grid_argmax(PairFamily fam, const Matrix& uv, double lo, double hi, double step) {
    std::vector<double> u = testutil::column(uv, 0), v = testutil::column(uv, 1);
    auto scan = [&](double a, double b, double h) {
        double best = a, best_ll = -INFINITY;
        for (double t = a; t <= b + 1e-12; t += h) {
            const double ll = pair_log_likelihood(PairCopula(fam, {t}), u, v);
            if (ll > best_ll) {
                best_ll = ll;
                best = t;
            }
        }
        return best;
    };
    const double coarse = scan(lo, hi, 10 * step);
    return scan(std::max(lo, coarse - 10 * step), std::min(hi, coarse + 10 * step), step);
}

}  // namespace

TEST_CASE("sample Kendall tau: small examples") {
    const std::vector<double> x = {1, 2, 3};
    CHECK(sample_kendall_tau(x, std::vector<double>{1, 2, 3}) == 1.0);
    CHECK(sample_kendall_tau(x, std::vector<double>{3, 2, 1}) == -1.0);
    CHECK(sample_kendall_tau(x, std::vector<double>{1, 3, 2}) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK_THROWS_AS(sample_kendall_tau(std::vector<double>{1}, std::vector<double>{1}), DomainError);
}

TEST_CASE("sample Kendall tau agrees with brute force, with and without ties") {
    std::mt19937_64 gen(17);
    std::uniform_int_distribution<int> coarse(0, 6);
    std::normal_distribution<double> nd;
    for (int rep = 0; rep < 10; ++rep) {
        std::vector<double> x(257), y(257);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = rep % 2 ? coarse(gen) : nd(gen);
            y[i] = 0.5 * x[i] + (rep % 2 ? coarse(gen) : nd(gen));
        }
        CHECK(sample_kendall_tau(x, y) == doctest::Approx(testutil::brute_kendall(x, y)).epsilon(1e-14));
    }
}

TEST_CASE("pseudo-observations use average ranks over n + 1") {
    Matrix x(4, 2);
    x << 3.0, 1.0, 1.0, 1.0, 2.0, 5.0, 2.0, 0.0;
    const Matrix u = pseudo_observations(x);
    CHECK(u(0, 0) == doctest::Approx(4.0 / 5.0));
    CHECK(u(1, 0) == doctest::Approx(1.0 / 5.0));
    CHECK(u(2, 0) == doctest::Approx(2.5 / 5.0));
    CHECK(u(3, 0) == doctest::Approx(2.5 / 5.0));
    CHECK(u(0, 1) == doctest::Approx(2.5 / 5.0));
    CHECK(u(2, 1) == doctest::Approx(4.0 / 5.0));
}

TEST_CASE("pair MLE matches a likelihood grid scan") {
    SUBCASE("Gumbel-Hougaard 1.1") {
        const Matrix uv = pair_sample(PairCopula::gumbel_hougaard(1.1), 100000, 1);
        const PairFit f = fit_pair_mle(PairFamily::GumbelHougaard, uv);
        CHECK(f.params[0] >= 1.07);
        CHECK(f.params[0] <= 1.13);
        CHECK(std::abs(f.params[0] - grid_argmax(PairFamily::GumbelHougaard, uv, 1.0, 2.0, 1e-3)) < 1.5e-3);
    }
    SUBCASE("Gaussian 0.141") {
        const Matrix uv = pair_sample(PairCopula::gaussian(0.141), 100000, 2);
        const PairFit f = fit_pair_mle(PairFamily::Gaussian, uv);
        CHECK(f.params[0] >= 0.13);
        CHECK(f.params[0] <= 0.15);
        CHECK(std::abs(f.params[0] - grid_argmax(PairFamily::Gaussian, uv, 0.0, 0.3, 1e-3)) < 1.5e-3);
    }
    SUBCASE("independence has no parameters") {
        const Matrix uv = pair_sample(PairCopula::independence(), 100, 3);
        const PairFit f = fit_pair_mle(PairFamily::Independence, uv);
        CHECK(f.params.empty());
        CHECK(f.log_likelihood == 0.0);
    }
}

TEST_CASE("AIC pair selection") {
    const std::vector<PairFamily> all = {PairFamily::Independence, PairFamily::Gaussian, PairFamily::GumbelHougaard};
    CHECK(select_pair_aic(pair_sample(PairCopula::independence(), 10000, 4), all).copula.family() ==
          PairFamily::Independence);
    CHECK(select_pair_aic(pair_sample(PairCopula::gumbel_hougaard(5.0), 2000, 5), all).copula.family() ==
          PairFamily::GumbelHougaard);
    CHECK(select_pair_aic(pair_sample(PairCopula::gaussian(-0.6), 2000, 6), all).copula.family() ==
          PairFamily::Gaussian);
    const auto single = select_pair_aic(pair_sample(PairCopula::gaussian(0.3), 500, 7), {PairFamily::GumbelHougaard});
    CHECK(single.copula.family() == PairFamily::GumbelHougaard);
    const auto& r = single.record;
    CHECK(r.aic == -2.0 * r.log_likelihood + 2.0 * static_cast<double>(r.params.size()));
    CHECK_THROWS(select_pair_aic(pair_sample(PairCopula::gaussian(0.3), 50, 7), {}));
}

TEST_CASE("C-vine ordering") {
    CHECK(order_cvine(tau3(0.5, 0.4, 0.1)) == std::vector<std::size_t>{0, 1, 2});
    CHECK(order_cvine(tau3(0.2, 0.2, 0.2)) == std::vector<std::size_t>{0, 1, 2});
    CHECK(order_cvine(tau3(0.1, -0.2, 0.6)) == std::vector<std::size_t>{2, 0, 1});
    Eigen::MatrixXd t2(2, 2);
    t2 << 1, 0.3, 0.3, 1;
    CHECK(order_cvine(t2) == std::vector<std::size_t>{0, 1});
}

TEST_CASE("D-vine ordering examples") {
    const std::vector<std::size_t> p = order_dvine(tau3(0.5, 0.4, 0.1));
    CHECK(p == std::vector<std::size_t>{1, 0, 2});
    CHECK(path_weight(tau3(0.5, 0.4, 0.1), p) == doctest::Approx(0.9));
    Eigen::MatrixXd t2(2, 2);
    t2 << 1, 0.3, 0.3, 1;
    CHECK(order_dvine(t2) == std::vector<std::size_t>{0, 1});
}

TEST_CASE("D-vine ordering attains the exhaustive optimum for M <= 8") {
    std::mt19937_64 gen(23);
    std::uniform_real_distribution<double> d(-0.9, 0.9);
    for (std::size_t m : {4u, 6u, 8u}) {
        Eigen::MatrixXd t = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
        for (Eigen::Index i = 0; i < t.rows(); ++i)
            for (Eigen::Index j = i + 1; j < t.cols(); ++j) t(i, j) = t(j, i) = d(gen);
        std::vector<std::size_t> perm(m);
        std::iota(perm.begin(), perm.end(), 0);
        double best = -1.0;
        do best = std::max(best, path_weight(t, perm));
        while (std::next_permutation(perm.begin(), perm.end()));
        const auto p = order_dvine(t);
        CHECK(path_weight(t, p) == best);
        CHECK(p.front() < p.back());
    }
}

TEST_CASE("genetic D-vine ordering recovers a chain for M > 8") {
    const std::size_t m = 11;
    // Hidden chain through a shuffled labelling.
    std::vector<std::size_t> chain = {4, 9, 0, 7, 2, 10, 5, 1, 8, 3, 6};
    Eigen::MatrixXd t = Eigen::MatrixXd::Constant(m, m, 0.05);
    t.diagonal().setOnes();
    for (std::size_t k = 0; k + 1 < m; ++k)
        t(static_cast<Eigen::Index>(chain[k]), static_cast<Eigen::Index>(chain[k + 1])) =
            t(static_cast<Eigen::Index>(chain[k + 1]), static_cast<Eigen::Index>(chain[k])) = 0.5;
    const auto p = order_dvine(t, 1);
    CHECK(path_weight(t, p) == doctest::Approx(0.5 * (m - 1)));
    CHECK(order_dvine(t, 1) == p);
    std::vector<std::size_t> sorted = p;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < m; ++i) CHECK(sorted[i] == i);
}

TEST_CASE("fit_vine on independent data") {
    // AIC admits a one-parameter family when its likelihood-ratio statistic
    // exceeds 2, which happens for about one pair in six per extra candidate.
    // Selected families must then be weak, and an all-independence fit has AIC 0.
    std::size_t pairs = 0, spurious = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Matrix u = sample(Copula(IndependenceCopula{4}), 3000, seed);
        const FitReport r = fit_vine(u, VineKind::DVine);
        CHECK(r.per_pair.size() == 6);
        CHECK(r.structure_method == StructureMethod::DVineOtsp);
        bool all_indep = true;
        for (std::size_t t = 0; t < r.model.trees().size(); ++t)
            for (const auto& pc : r.model.trees()[t]) {
                ++pairs;
                if (pc.family() == PairFamily::Independence) continue;
                all_indep = false;
                ++spurious;
                CHECK(std::abs(pc.kendall_tau()) < 0.03);
            }
        CHECK((r.aic == 0.0) == all_indep);
    }
    CHECK(static_cast<double>(spurious) / static_cast<double>(pairs) < 0.4);
}

TEST_CASE("fit_vine with M = 2 reduces to pair selection") {
    const Matrix u = pair_sample(PairCopula::gumbel_hougaard(2.0), 500, 9);
    const FitReport r = fit_vine(u, VineKind::CVine);
    const auto sel = select_pair_aic(u, FitOptions{}.candidates);
    CHECK(r.model.pair(0, 0) == sel.copula);
    CHECK(r.aic == sel.record.aic);
}

TEST_CASE("fit_vine recovers the truss vine on a large sample") {
    const Matrix u = sample(Copula(truss_vine()), 3000, 10);
    FitOptions o;
    o.order = std::vector<std::size_t>{0, 1, 2, 3, 4, 5};
    const FitReport r = fit_vine(u, VineKind::CVine, o);
    for (std::size_t e = 0; e < 5; ++e) {
        CHECK(r.model.pair(0, e).family() == PairFamily::GumbelHougaard);
        CHECK(r.model.pair(0, e).params()[0] == doctest::Approx(1.1).epsilon(0.05));
    }
    CHECK(r.structure_method == StructureMethod::Given);
}

TEST_CASE("fit invariants: AIC bookkeeping, row-order invariance, refit monotonicity") {
    const VineModel truth(VineKind::CVine, {0, 1, 2, 3},
                          {{PairCopula::gumbel_hougaard(1.6), PairCopula::gaussian(0.4), PairCopula::gaussian(-0.3)},
                           {PairCopula::gumbel_hougaard(1.3), PairCopula::independence()},
                           {PairCopula::gaussian(0.2)}});
    const Matrix u = sample(Copula(truth), 400, 12);
    const FitReport a = fit_vine(u, VineKind::CVine);
    double ll = 0.0;
    std::size_t k = 0;
    for (const auto& rec : a.per_pair) {
        CHECK(rec.aic == -2.0 * rec.log_likelihood + 2.0 * static_cast<double>(rec.params.size()));
        k += rec.params.size();
    }
    for (const auto& rec : a.per_pair) ll += rec.log_likelihood;
    CHECK(a.log_likelihood == doctest::Approx(ll).epsilon(1e-10));
    CHECK(a.aic == -2.0 * a.log_likelihood + 2.0 * static_cast<double>(k));

    std::vector<Eigen::Index> perm(static_cast<std::size_t>(u.rows()));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), std::mt19937_64(5));
    Matrix shuffled(u.rows(), u.cols());
    for (Eigen::Index r = 0; r < u.rows(); ++r) shuffled.row(r) = u.row(perm[static_cast<std::size_t>(r)]);
    const FitReport b = fit_vine(shuffled, VineKind::CVine);
    CHECK(b.model == a.model);
    CHECK(b.log_likelihood == a.log_likelihood);

    FitOptions o;
    o.global_refit = true;
    const FitReport g = fit_vine(u, VineKind::CVine, o);
    CHECK(g.global_refit);
    CHECK(g.log_likelihood >= g.sequential_log_likelihood - 1e-6);
    CHECK(g.sequential_log_likelihood == doctest::Approx(a.log_likelihood).epsilon(1e-12));
    CHECK(g.model.order() == a.model.order());
}

TEST_CASE("fit_vine input validation") {
    const Matrix small = sample(Copula(IndependenceCopula{3}), 10, 1);
    CHECK_THROWS_AS(fit_vine(small, VineKind::CVine), DomainError);
    const Matrix u = sample(Copula(IndependenceCopula{3}), 100, 1);
    CHECK_THROWS_AS(fit_vine(u, VineKind::RVine), StructuralError);
    Matrix bad = u;
    bad(3, 1) = 1.5;
    CHECK_THROWS(fit_vine(bad, VineKind::CVine));
    FitOptions o;
    o.order = std::vector<std::size_t>{0, 0, 1};
    CHECK_THROWS(fit_vine(u, VineKind::CVine, o));
}
