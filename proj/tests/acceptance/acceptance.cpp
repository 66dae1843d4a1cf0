// End-to-end acceptance checks for the truss reproduction and the property
// suites. Prints one PASS/FAIL line per criterion; exits nonzero if any fails.

#include "vineuq/fit.hpp"
#include "vineuq/kernels.hpp"
#include "vineuq/models.hpp"
#include "vineuq/moments.hpp"
#include "vineuq/numerics.hpp"
#include "vineuq/paircop.hpp"
#include "vineuq/pce.hpp"
#include "vineuq/reliability.hpp"
#include "vineuq/rng.hpp"
#include "vineuq/transform.hpp"
#include "vineuq/vine.hpp"

#include <CLI11.hpp>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace vuq;

namespace {

constexpr std::uint64_t kSeed = 1;

// Criterion 1
constexpr double kTauGh = 0.0909, kTauGhTol = 1e-4;
constexpr double kLambdaGh = 0.122, kLambdaTol = 5e-4;
constexpr double kTauGauss = 0.0904, kTauGaussTol = 1e-4;
constexpr double kRhoSGauss = 0.135, kRhoSTol = 1e-3;

// Criterion 2
constexpr std::size_t kMomentsN = 1000000;
constexpr double kMeanRef = 7.78, kMeanTol = 0.005;
constexpr double kStdRef[3] = {0.528, 0.566, 0.581};
constexpr double kStdTol = 0.02;
constexpr double kMomentsSeconds = 120.0;

// Criterion 3: reported estimates and their standard deviations.
constexpr std::size_t kPfN = 10000000;
constexpr double kThresholdCm = 11.0;
constexpr double kPfRef[3] = {1.5e-5, 3.4e-5, 5.04e-4};
constexpr double kPfSd[3] = {0.1e-5, 0.2e-5, 0.07e-4};
constexpr double kPfSigmas = 3.0;
constexpr double kFormVineRef = 4.88e-4, kFormTol = 0.15;
constexpr std::size_t kFormMaxRuns = 500;
constexpr double kPfSeconds = 1200.0;

// Criterion 4
constexpr std::size_t kFitN = 300;
constexpr double kThetaLo = 1.0, kThetaHi = 1.3;
constexpr double kFittedPfTol = 0.25;

// Criterion 5
constexpr std::size_t kPceN = 200;
constexpr double kPceMeanTol = 1e-3, kPceStdTol = 1e-2;
const std::vector<std::size_t> kSweep = {20, 50, 100, 200, 500};
// Relative error resolvable against the Monte Carlo reference mean.
constexpr double kSweepNoise = 1e-4;

const char* const kCopulaNames[3] = {"independence", "gaussian", "vine"};

struct Line {
    bool pass;
    std::string text;
};

class Report {
public:
    void sub(bool pass, const std::string& text) { subs_.push_back({pass, text}); }
    void info(const std::string& text) { std::printf("      info  %s\n", text.c_str()); }

    bool close(int id, const std::string& title, double seconds) {
        bool ok = true;
        for (const auto& s : subs_) {
            std::printf("      %s  %s\n", s.pass ? "ok  " : "FAIL", s.text.c_str());
            ok = ok && s.pass;
        }
        std::printf("%s criterion %d: %s (%.1f s)\n", ok ? "PASS" : "FAIL", id, title.c_str(), seconds);
        std::fflush(stdout);
        subs_.clear();
        results_[id] = ok;
        return ok;
    }

    const std::map<int, bool>& results() const { return results_; }

private:
    std::vector<Line> subs_;
    std::map<int, bool> results_;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

class Timer {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct Simulation {
    MomentResult moments;  // first kMomentsN samples
    FailureEstimate pf;    // all samples
    double seconds_moments = 0.0;
    double seconds_total = 0.0;
};

Simulation simulate(const InputModel& input, std::size_t n_total) {
    const TrussModel truss;
    const PseudoRandomSource src(kSeed, Stream::Sampling);
    Simulation s;
    Timer t;
    const auto y = kernels::simulate_responses(input, truss, n_total, src);
    s.seconds_total = t.seconds();
    s.seconds_moments = s.seconds_total * static_cast<double>(kMomentsN) / static_cast<double>(n_total);
    s.moments = mc_moments(std::span<const double>(y.data(), std::min(kMomentsN, n_total)));
    s.pf = mc_failure_probability(y, kThresholdCm, Direction::GE);
    return s;
}

FitReport fit_truss_sample(std::uint64_t seed, bool given_structure) {
    const PseudoRandomSource src(seed, Stream::Bootstrap);
    const Matrix u = kernels::sample_copula(Copula(truss_vine()), kFitN, src);
    FitOptions o;
    if (given_structure) o.order = std::vector<std::size_t>{0, 1, 2, 3, 4, 5};
    return fit_vine(u, VineKind::CVine, o);
}

struct FitPattern {
    bool first_tree_gh = true;
    bool theta_in_range = true;
    bool conditionals_independent = true;
    std::string first_tree;
    std::size_t conditional_non_indep = 0;
};

FitPattern inspect(const VineModel& v) {
    FitPattern p;
    std::ostringstream ft;
    for (const auto& pc : v.trees()[0]) {
        ft << to_string(pc.family());
        if (!pc.params().empty()) ft << fmt("(%.4f)", pc.params()[0]);
        ft << ' ';
        if (pc.family() != PairFamily::GumbelHougaard) {
            p.first_tree_gh = false;
            p.theta_in_range = false;
        } else if (pc.params()[0] < kThetaLo || pc.params()[0] > kThetaHi) {
            p.theta_in_range = false;
        }
    }
    for (std::size_t t = 1; t < v.trees().size(); ++t)
        for (const auto& pc : v.trees()[t])
            if (pc.family() != PairFamily::Independence) {
                p.conditionals_independent = false;
                ++p.conditional_non_indep;
            }
    p.first_tree = ft.str();
    return p;
}

// ---------------------------------------------------------------------------

void criterion1(Report& r) {
    Timer t;
    const PairCopula gh = PairCopula::gumbel_hougaard(1.1);
    const PairCopula g = PairCopula::gaussian(0.141);
    auto line = [&](const char* what, double got, double want, double tol) {
        r.sub(std::abs(got - want) <= tol, fmt("%s = %.6f, expected %.4f +- %.0e", what, got, want, tol));
    };
    line("Kendall tau, Gumbel-Hougaard theta 1.1", gh.kendall_tau(), kTauGh, kTauGhTol);
    line("upper tail dependence, Gumbel-Hougaard theta 1.1", gh.tail_dependence().upper, kLambdaGh, kLambdaTol);
    line("Kendall tau, Gaussian rho 0.141", g.kendall_tau(), kTauGauss, kTauGaussTol);
    line("Spearman rho, Gaussian rho 0.141", g.spearman_rho(), kRhoSGauss, kRhoSTol);
    r.close(1, "closed-form dependence measures", t.seconds());
}

struct TrussRuns {
    Simulation sims[3];
    std::optional<Simulation> fitted;
    std::optional<VineModel> fitted_vine;
};

void criterion2(Report& r, const TrussRuns& runs) {
    double seconds = 0.0;
    for (int c = 0; c < 3; ++c) {
        const auto& m = runs.sims[c].moments;
        seconds += runs.sims[c].seconds_moments;
        r.sub(rel(m.mean, kMeanRef) <= kMeanTol,
              fmt("%-12s mean %.5f cm (rel. err %.2e, tol %.1e)", kCopulaNames[c], m.mean, rel(m.mean, kMeanRef), kMeanTol));
        r.sub(rel(m.std, kStdRef[c]) <= kStdTol, fmt("%-12s std  %.5f cm vs %.3f (rel. err %.2e, tol %.0e)",
                                                     kCopulaNames[c], m.std, kStdRef[c], rel(m.std, kStdRef[c]), kStdTol));
    }
    if (runs.fitted) {
        const auto& m = runs.fitted->moments;
        seconds += runs.fitted->seconds_moments;
        r.sub(rel(m.mean, kMeanRef) <= kMeanTol, fmt("%-12s mean %.5f cm (rel. err %.2e, tol %.1e)", "fitted vine",
                                                     m.mean, rel(m.mean, kMeanRef), kMeanTol));
        r.info(fmt("fitted vine std %.5f cm", m.std));
    } else {
        r.sub(false, "fitted vine unavailable");
    }
    r.sub(seconds < kMomentsSeconds, fmt("runtime %.1f s for 4 x %zu samples (target %.0f s)", seconds, kMomentsN, kMomentsSeconds));
    r.close(2, "truss deflection moments by Monte Carlo", seconds);
}

void criterion3(Report& r, const TrussRuns& runs, const FormResult& form_vine) {
    double seconds = 0.0;
    for (int c = 0; c < 3; ++c) {
        const auto& pf = runs.sims[c].pf;
        seconds += runs.sims[c].seconds_total;
        const double dev = std::abs(pf.pf - kPfRef[c]) / kPfSd[c];
        r.sub(dev <= kPfSigmas, fmt("%-12s pf %.4e (%zu of %zu) vs %.3e +- %.2e: %.2f sd (tol %.0f)", kCopulaNames[c],
                                    pf.pf, pf.n_fail, pf.n, kPfRef[c], kPfSd[c], dev, kPfSigmas));
    }
    r.sub(seconds < kPfSeconds, fmt("runtime %.1f s for 3 x %zu samples (target %.0f s)", seconds, kPfN, kPfSeconds));
    r.sub(rel(form_vine.pf, kFormVineRef) <= kFormTol,
          fmt("FORM vine pf %.4e vs %.3e (rel. err %.3f, tol %.2f), beta %.4f", form_vine.pf, kFormVineRef,
              rel(form_vine.pf, kFormVineRef), kFormTol, form_vine.beta));
    r.sub(form_vine.converged && form_vine.n_evals <= kFormMaxRuns,
          fmt("FORM converged=%d in %d iterations with %zu model runs (limit %zu)", form_vine.converged ? 1 : 0,
              form_vine.iterations, form_vine.n_evals, kFormMaxRuns));
    r.close(3, "truss failure probabilities (Monte Carlo and FORM)", seconds);
}

void criterion4(Report& r, const FitReport& given, const TrussRuns& runs, double fit_seconds) {
    const FitPattern p = inspect(given.model);
    r.info(fmt("%zu draws (seed %llu), root variable 1 given, families by AIC", kFitN,
               static_cast<unsigned long long>(kSeed)));
    r.sub(p.first_tree_gh, "first tree all Gumbel-Hougaard: " + p.first_tree);
    r.sub(p.theta_in_range, fmt("first-tree theta in [%.1f, %.1f]", kThetaLo, kThetaHi));
    r.sub(p.conditionals_independent,
          fmt("conditional pairs all independence (%zu of 10 are not)", p.conditional_non_indep));
    const double ref = runs.sims[2].pf.pf;
    const double got = runs.fitted->pf.pf;
    r.sub(rel(got, ref) <= kFittedPfTol,
          fmt("fitted-vine Monte Carlo pf %.4e vs vine reference %.4e (rel. dev %.3f, tol %.2f)", got, ref,
              rel(got, ref), kFittedPfTol));

    // Diagnostics: heuristic structure and the pattern rate over other samples.
    const FitPattern h = inspect(fit_truss_sample(kSeed, false).model);
    r.info("heuristic structure, same sample: first tree " + h.first_tree +
           fmt("| %zu non-independent conditionals", h.conditional_non_indep));
    int all_ok = 0, gh_ok = 0, cond_ok = 0;
    const int reps = 20;
    for (int s = 1; s <= reps; ++s) {
        const FitPattern q = inspect(fit_truss_sample(1000 + static_cast<std::uint64_t>(s), true).model);
        gh_ok += q.first_tree_gh && q.theta_in_range;
        cond_ok += q.conditionals_independent;
        all_ok += q.first_tree_gh && q.theta_in_range && q.conditionals_independent;
    }
    r.info(fmt("over %d further samples: first tree GH in range %d, conditionals independent %d, both %d", reps, gh_ok,
               cond_ok, all_ok));
    r.close(4, "fitted-vine pipeline", fit_seconds + runs.fitted->seconds_total);
}

void criterion5(Report& r, const TrussRuns& runs) {
    Timer t;
    const InputModel input = make_truss_input(TrussCopula::Vine);
    const auto truss = std::make_shared<TrussModel>();
    const CompositionalModel cm(truss, IsoTransform(input));
    const double ref_mean = runs.sims[2].moments.mean, ref_std = runs.sims[2].moments.std;
    const std::size_t n_max = std::max(kPceN, kSweep.back());
    const Matrix design = standard_normal_design(n_max, 6, kSeed, true);
    const std::vector<double> y = kernels::evaluate_rows(cm, design);

    auto fit_first = [&](std::size_t n) {
        const Matrix z = design.topRows(static_cast<Eigen::Index>(n));
        const PceModel p = pce_fit(z, std::span<const double>(y.data(), n));
        return std::make_pair(p, pce_moments(p));
    };

    const auto [model200, m200] = fit_first(kPceN);
    r.sub(rel(m200.mean, ref_mean) < kPceMeanTol, fmt("n=%zu mean %.5f vs %.5f (rel. err %.2e, tol %.0e)", kPceN,
                                                      m200.mean, ref_mean, rel(m200.mean, ref_mean), kPceMeanTol));
    r.sub(rel(m200.std, ref_std) < kPceStdTol, fmt("n=%zu std  %.5f vs %.5f (rel. err %.2e, tol %.0e)", kPceN, m200.std,
                                                   ref_std, rel(m200.std, ref_std), kPceStdTol));
    r.info(fmt("selected degree %u, %zu terms, LOO error %.2e", model200.degree, model200.indices.size(),
               model200.loo_error));

    double prev = INFINITY;
    bool monotone = true;
    std::ostringstream sweep;
    for (std::size_t n : kSweep) {
        const auto [p, m] = fit_first(n);
        const double e = rel(m.mean, ref_mean);
        sweep << fmt("n=%zu: %.2e/%.2e  ", n, e, rel(m.std, ref_std));
        if (e > prev + kSweepNoise) monotone = false;
        prev = std::min(prev, e);
    }
    r.info("mean/std relative errors " + sweep.str());
    r.sub(monotone, fmt("mean error non-increasing over the sweep within %.0e", kSweepNoise));
    r.close(5, "PCE moments under the vine", t.seconds());
}

// Property suites ------------------------------------------------------------

bool frechet_grid() {
    const std::vector<PairCopula> fam = {PairCopula::independence(), PairCopula::gaussian(0.141),
                                         PairCopula::gaussian(-0.9), PairCopula::gumbel_hougaard(1.1),
                                         PairCopula::gumbel_hougaard(5.0)};
    for (const auto& pc : fam)
        for (int i = 0; i <= 20; ++i)
            for (int j = 0; j <= 20; ++j) {
                const double u = i / 20.0, v = j / 20.0, c = pc.cdf(u, v);
                if (c < std::max(u + v - 1, 0.0) - 1e-15 || c > std::min(u, v) + 1e-15) return false;
            }
    return true;
}

double density_normalisation_error() {
    const auto rule = gauss_legendre(64, 0.0, 1.0);
    double worst = 0.0;
    for (const auto& pc : {PairCopula::independence(), PairCopula::gaussian(0.141), PairCopula::gaussian(-0.5),
                           PairCopula::gumbel_hougaard(1.1), PairCopula::gumbel_hougaard(1.5)}) {
        double s = 0.0;
        for (std::size_t i = 0; i < 64; ++i)
            for (std::size_t j = 0; j < 64; ++j)
                s += rule.weights[i] * rule.weights[j] * pc.pdf(rule.nodes[i], rule.nodes[j]);
        worst = std::max(worst, std::abs(s - 1.0));
    }
    return worst;
}

double h_finite_difference_error() {
    const PseudoRandomSource src(kSeed, Stream::Sampling);
    double worst = 0.0;
    std::vector<double> uv(2);
    for (const auto& pc : {PairCopula::gaussian(0.141), PairCopula::gaussian(-0.7), PairCopula::gumbel_hougaard(1.1),
                           PairCopula::gumbel_hougaard(3.0)})
        for (std::uint64_t k = 0; k < 200; ++k) {
            src.fill(k, uv);
            const double u = 0.01 + 0.98 * uv[0], v = 0.01 + 0.98 * uv[1], h = 1e-5;
            const double fd = (pc.cdf(u, v + h) - pc.cdf(u, v - h)) / (2 * h);
            worst = std::max(worst, std::abs(pc.h(u, v) - fd));
        }
    return worst;
}

double h_inverse_roundtrip_error() {
    const PseudoRandomSource src(kSeed, Stream::Sampling);
    double worst = 0.0;
    std::vector<double> uv(2);
    for (const auto& pc : {PairCopula::independence(), PairCopula::gaussian(0.6), PairCopula::gumbel_hougaard(1.1),
                           PairCopula::gumbel_hougaard(5.0)})
        for (std::uint64_t k = 0; k < 100; ++k) {
            src.fill(k, uv);
            worst = std::max(worst, std::abs(pc.h(pc.h_inv(uv[0], uv[1]), uv[1]) - uv[0]));
        }
    return worst;
}

struct RosenblattStats {
    double roundtrip = 0.0;
    double ks_max = 0.0;
    double ks_crit = 0.0;
    double tau_max = 0.0;
    double tau_crit = 0.0;
};

RosenblattStats rosenblatt_checks() {
    const std::size_t n = 100000;
    const VineModel v = truss_vine();
    const Copula c(v);
    const Matrix u = kernels::sample_copula(c, n, PseudoRandomSource(kSeed, Stream::Sampling));
    const Matrix w = kernels::rosenblatt_rows(c, u);
    const Matrix back = kernels::inverse_rosenblatt_rows(c, w);
    RosenblattStats s;
    s.roundtrip = (back - u).cwiseAbs().maxCoeff();
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
        std::vector<double> col(n);
        for (std::size_t i = 0; i < n; ++i) col[i] = w(static_cast<Eigen::Index>(i), j);
        std::sort(col.begin(), col.end());
        double d = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            d = std::max({d, col[i] - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - col[i]});
        s.ks_max = std::max(s.ks_max, d);
    }
    s.ks_crit = 1.628 / std::sqrt(static_cast<double>(n));
    const Eigen::MatrixXd tau = kendall_tau_matrix(w);
    for (Eigen::Index i = 0; i < tau.rows(); ++i)
        for (Eigen::Index j = i + 1; j < tau.cols(); ++j) s.tau_max = std::max(s.tau_max, std::abs(tau(i, j)));
    s.tau_crit = 4.0 * std::sqrt(2.0 * (2.0 * n + 5) / (9.0 * n * (n - 1.0)));
    return s;
}

double gaussian_vine_density_error() {
    const double r12 = 0.5, r13 = 0.3, r23 = 0.4;
    Eigen::MatrixXd r(3, 3);
    r << 1, r12, r13, r12, 1, r23, r13, r23, 1;
    const GaussianCopula gc(r);
    const double partial = (r23 - r12 * r13) / std::sqrt((1 - r12 * r12) * (1 - r13 * r13));
    const VineModel cv(VineKind::CVine, {0, 1, 2},
                       {{PairCopula::gaussian(r12), PairCopula::gaussian(r13)}, {PairCopula::gaussian(partial)}});
    const PseudoRandomSource src(kSeed, Stream::Sampling);
    std::vector<double> u(3);
    double worst = 0.0;
    for (std::uint64_t k = 0; k < 1000; ++k) {
        src.fill(k, u);
        const double ref = std::exp(gc.log_density(u));
        worst = std::max(worst, std::abs(std::exp(cv.log_density(u)) - ref) / std::max(1.0, ref));
    }
    return worst;
}

double gram_identity_error() {
    // Gauss-Hermite nodes for the standard normal weight (Golub-Welsch), tensorised.
    const int q = 8;
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(q, q);
    for (int k = 1; k < q; ++k) jac(k, k - 1) = jac(k - 1, k) = std::sqrt(static_cast<double>(k));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
    const auto basis = hyperbolic_basis(3, 4, 1.0);
    Matrix z(q * q * q, 3);
    std::vector<double> w(static_cast<std::size_t>(q * q * q));
    int row = 0;
    for (int a = 0; a < q; ++a)
        for (int b = 0; b < q; ++b)
            for (int c = 0; c < q; ++c, ++row) {
                z.row(row) << es.eigenvalues()(a), es.eigenvalues()(b), es.eigenvalues()(c);
                w[static_cast<std::size_t>(row)] = std::pow(es.eigenvectors()(0, a), 2) *
                                                   std::pow(es.eigenvectors()(0, b), 2) *
                                                   std::pow(es.eigenvectors()(0, c), 2);
            }
    const Matrix psi = pce_design_matrix(basis, z);
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(psi.cols(), psi.cols());
    for (Eigen::Index n = 0; n < psi.rows(); ++n) gram += w[static_cast<std::size_t>(n)] * psi.row(n).transpose() * psi.row(n);
    return (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

double pce_recovery_error() {
    const Matrix z = standard_normal_design(80, 3, kSeed, false);
    std::vector<double> y(80);
    for (Eigen::Index r = 0; r < z.rows(); ++r)
        y[static_cast<std::size_t>(r)] = 1.5 - 2.0 * hermite_eval(1, z(r, 1)) + 0.7 * hermite_eval(2, z(r, 0)) * hermite_eval(1, z(r, 2));
    PceOptions o;
    o.q = 1.0;
    o.degree_max = 4;
    const PceModel p = pce_fit(z, y, o);
    double worst = 0.0;
    for (std::size_t k = 0; k < p.indices.size(); ++k) {
        const MultiIndex& a = p.indices[k];
        double expect = 0.0;
        if (a == MultiIndex{0, 0, 0}) expect = 1.5;
        if (a == MultiIndex{0, 1, 0}) expect = -2.0;
        if (a == MultiIndex{2, 0, 1}) expect = 0.7;
        worst = std::max(worst, std::abs(p.coefficients[k] - expect));
    }
    return worst;
}

double form_affine_error() {
    const std::vector<double> a = {0.8, -1.2, 2.0};
    const auto m = std::make_shared<FunctionModel>("affine", 3, [a](std::span<const double> z) {
        return 1.0 + a[0] * z[0] + a[1] * z[1] + a[2] * z[2];
    });
    const double beta = (9.0 - 1.0) / std::sqrt(0.64 + 1.44 + 4.0);
    return std::abs(form(LimitState{m, 9.0, Direction::GE}).beta - beta);
}

bool is_origin_matches_mc() {
    const auto m = std::make_shared<FunctionModel>("sum", 2, [](std::span<const double> z) { return z[0] + z[1]; });
    const LimitState ls{m, 2.0, Direction::GE};
    IsOptions o;
    o.cov_target = 1e-12;
    o.n_max = 5000;
    o.seed = kSeed;
    const std::vector<double> origin = {0.0, 0.0};
    return importance_sampling(ls, origin, o).pf == mc_failure_probability_z(ls, 5000, kSeed).pf;
}

void criterion6(Report& r) {
    Timer t;
    r.sub(frechet_grid(), "Frechet bounds on a 21 x 21 grid");
    const double dn = density_normalisation_error();
    r.sub(dn < 1e-4, fmt("density integrates to 1 (64-point Gauss-Legendre): max error %.2e (tol 1e-4)", dn));
    const double hf = h_finite_difference_error();
    r.sub(hf < 1e-6, fmt("h vs central difference of the cdf: max error %.2e (tol 1e-6)", hf));
    const double hi = h_inverse_roundtrip_error();
    r.sub(hi < 1e-8, fmt("h_inv round trip: max error %.2e (tol 1e-8)", hi));
    const RosenblattStats rs = rosenblatt_checks();
    r.sub(rs.roundtrip < 1e-7, fmt("Rosenblatt round trip at n=1e5: max error %.2e (tol 1e-7)", rs.roundtrip));
    r.sub(rs.ks_max < rs.ks_crit, fmt("Rosenblatt output uniform: max KS %.2e (1%% critical %.2e)", rs.ks_max, rs.ks_crit));
    r.sub(rs.tau_max < rs.tau_crit,
          fmt("Rosenblatt output independent: max |tau| %.2e (4 sd %.2e)", rs.tau_max, rs.tau_crit));
    const double gv = gaussian_vine_density_error();
    r.sub(gv < 1e-6, fmt("3-d Gaussian-pair C-vine density vs Gaussian copula: max error %.2e (tol 1e-6)", gv));
    const double gi = gram_identity_error();
    r.sub(gi < 1e-10, fmt("PCE Gram matrix = identity: max error %.2e (tol 1e-10)", gi));
    const double pr = pce_recovery_error();
    r.sub(pr < 1e-10, fmt("exact recovery of an in-basis polynomial: max coefficient error %.2e", pr));
    const double fa = form_affine_error();
    r.sub(fa < 1e-10, fmt("FORM on an affine limit state: beta error %.2e (tol 1e-10)", fa));
    r.sub(is_origin_matches_mc(), "importance sampling at z* = 0 equals Monte Carlo on matched seeds");
    r.close(6, "property suites", t.seconds());
}

void criterion7(Report& r, const TrussRuns& runs, const FormResult& form_vine, const LimitState& ls) {
    Timer t;
    r.info("dome structure results need an external finite-element model and are not reproduced");
    IsOptions o;
    o.seed = kSeed;
    const IsResult is = importance_sampling(ls, form_vine.design_point_z, o);
    const double ref = runs.sims[2].pf.pf;
    const double sd = is.cov * is.pf;
    r.sub(is.cov <= 0.1 + 1e-12, fmt("truss vine importance sampling: pf %.4e, CoV %.3f after %zu runs", is.pf, is.cov, is.n_evals));
    r.sub(std::abs(is.pf - ref) <= 3.0 * sd,
          fmt("agrees with the Monte Carlo reference %.4e within 3 sd (%.2f sd)", ref, std::abs(is.pf - ref) / sd));
    r.close(7, "importance sampling on the truss (dome substitute)", t.seconds());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance checks"};
    std::vector<int> only;
    app.add_option("--only", only, "run only these criteria (1-7)")->delimiter(',');
    CLI11_PARSE(app, argc, argv);
    const std::set<int> want(only.begin(), only.end());
    auto enabled = [&](int id) { return want.empty() || want.count(id) > 0; };

    kernels::configure_threads_from_env();
    std::printf("threads: %d, seed: %llu\n", kernels::max_threads(), static_cast<unsigned long long>(kSeed));
    Report report;

    if (enabled(1)) criterion1(report);

    const bool need_truss = enabled(2) || enabled(3) || enabled(4) || enabled(5) || enabled(7);
    TrussRuns runs;
    std::optional<FitReport> fit;
    double fit_seconds = 0.0;
    if (need_truss) {
        const TrussCopula kinds[3] = {TrussCopula::Independence, TrussCopula::Gaussian, TrussCopula::Vine};
        const bool full = enabled(3) || enabled(4) || enabled(7);
        for (int c = 0; c < 3; ++c) runs.sims[c] = simulate(make_truss_input(kinds[c]), full ? kPfN : kMomentsN);
        Timer ft;
        fit = fit_truss_sample(kSeed, true);
        fit_seconds = ft.seconds();
        runs.fitted_vine = fit->model;
        runs.fitted = simulate(make_truss_input(TrussCopula::VineFitted, fit->model), full ? kPfN : kMomentsN);
    }

    std::optional<FormResult> form_vine;
    std::optional<LimitState> ls;
    if (enabled(3) || enabled(7)) {
        const auto truss = std::make_shared<TrussModel>();
        ls = LimitState{std::make_shared<CompositionalModel>(truss, IsoTransform(make_truss_input(TrussCopula::Vine))),
                        kThresholdCm, Direction::GE};
        form_vine = form(*ls);
    }

    if (enabled(2)) criterion2(report, runs);
    if (enabled(3)) criterion3(report, runs, *form_vine);
    if (enabled(4)) criterion4(report, *fit, runs, fit_seconds);
    if (enabled(5)) criterion5(report, runs);
    if (enabled(6)) criterion6(report);
    if (enabled(7)) criterion7(report, runs, *form_vine, *ls);

    int failed = 0;
    for (const auto& [id, ok] : report.results()) failed += !ok;
    std::printf("%zu criteria run, %d failed\n", report.results().size(), failed);
    return failed == 0 ? 0 : 1;
}
