#include "vineuq/fit.hpp"

#include "vineuq/error.hpp"
#include "vineuq/numerics.hpp"
#include "vineuq/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

namespace vuq {

namespace {

std::int64_t count_inversions(std::vector<double>& a, std::vector<double>& buf, std::size_t lo,
                              std::size_t hi) {
    if (hi - lo < 2) return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::int64_t inv = count_inversions(a, buf, lo, mid) + count_inversions(a, buf, mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (a[j] < a[i]) {
            inv += static_cast<std::int64_t>(mid - i);
            buf[k++] = a[j++];
        } else {
            buf[k++] = a[i++];
        }
    }
    while (i < mid) buf[k++] = a[i++];
    while (j < hi) buf[k++] = a[j++];
    std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
              a.begin() + static_cast<std::ptrdiff_t>(lo));
    return inv;
}

std::int64_t tied_pairs(const std::vector<double>& sorted) {
    std::int64_t total = 0;
    std::size_t run = 1;
    for (std::size_t i = 1; i <= sorted.size(); ++i) {
        if (i < sorted.size() && sorted[i] == sorted[i - 1]) {
            ++run;
        } else {
            total += static_cast<std::int64_t>(run * (run - 1) / 2);
            run = 1;
        }
    }
    return total;
}

std::vector<double> column(const Matrix& m, Eigen::Index c) {
    std::vector<double> out(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) out[static_cast<std::size_t>(r)] = m(r, c);
    return out;
}

double sorted_sum(std::vector<double>& terms) {
    std::sort(terms.begin(), terms.end());
    return pairwise_sum(terms);
}

double vine_log_likelihood(const VineModel& v, const Matrix& u) {
    std::vector<double> terms(static_cast<std::size_t>(u.rows()));
    for (Eigen::Index r = 0; r < u.rows(); ++r) {
        const double t = v.log_density(row_span(u, r));
        if (!std::isfinite(t)) return -std::numeric_limits<double>::infinity();
        terms[static_cast<std::size_t>(r)] = t;
    }
    return sorted_sum(terms);
}

std::string edge_name(const VineModel& v, std::size_t t, std::size_t e) {
    const auto label = v.edge_label(t, e);
    std::ostringstream os;
    os << "tree " << t + 1 << " edge " << e + 1 << " (variables " << v.order()[label.first] + 1
       << "," << v.order()[label.second] + 1;
    if (!label.conditioned_on.empty()) {
        os << " |";
        for (std::size_t c : label.conditioned_on) os << ' ' << v.order()[c] + 1;
    }
    os << ')';
    return os.str();
}

}  // namespace

double sample_kendall_tau(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DomainError("kendall tau: samples differ in length");
    const std::size_t n = x.size();
    if (n < 2) throw DomainError("kendall tau: need at least two observations");
    for (std::size_t i = 0; i < n; ++i)
        if (std::isnan(x[i]) || std::isnan(y[i])) throw DomainError("kendall tau: NaN in sample");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
    });
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = x[idx[i]];
        ys[i] = y[idx[i]];
    }
    const auto n0 = static_cast<std::int64_t>(n * (n - 1) / 2);
    const std::int64_t n1 = tied_pairs(xs);
    std::int64_t n3 = 0;
    {
        std::size_t run = 1;
        for (std::size_t i = 1; i <= n; ++i) {
            if (i < n && xs[i] == xs[i - 1] && ys[i] == ys[i - 1]) {
                ++run;
            } else {
                n3 += static_cast<std::int64_t>(run * (run - 1) / 2);
                run = 1;
            }
        }
    }
    std::vector<double> buf(n);
    const std::int64_t swaps = count_inversions(ys, buf, 0, n);
    const std::int64_t n2 = tied_pairs(ys);  // ys is now sorted
    const std::int64_t diff = n0 - n1 - n2 + n3 - 2 * swaps;
    return static_cast<double>(diff) / static_cast<double>(n0);
}

double sample_kendall_tau(const Matrix& xy) {
    if (xy.cols() != 2) throw DomainError("kendall tau: expected two columns");
    const auto a = column(xy, 0), b = column(xy, 1);
    return sample_kendall_tau(a, b);
}

Eigen::MatrixXd kendall_tau_matrix(const Matrix& x) {
    const Eigen::Index m = x.cols();
    std::vector<std::vector<double>> cols;
    for (Eigen::Index c = 0; c < m; ++c) cols.push_back(column(x, c));
    Eigen::MatrixXd tau = Eigen::MatrixXd::Identity(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = i + 1; j < m; ++j)
            tau(i, j) = tau(j, i) = sample_kendall_tau(cols[static_cast<std::size_t>(i)],
                                                       cols[static_cast<std::size_t>(j)]);
    return tau;
}

Matrix pseudo_observations(const Matrix& x) {
    const Eigen::Index n = x.rows();
    Matrix u(n, x.cols());
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
        std::iota(idx.begin(), idx.end(), Eigen::Index{0});
        std::stable_sort(idx.begin(), idx.end(),
                         [&](Eigen::Index a, Eigen::Index b) { return x(a, c) < x(b, c); });
        for (Eigen::Index i = 0; i < n;) {
            Eigen::Index j = i;
            while (j + 1 < n && x(idx[static_cast<std::size_t>(j + 1)], c) == x(idx[static_cast<std::size_t>(i)], c)) ++j;
            const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
            for (Eigen::Index k = i; k <= j; ++k)
                u(idx[static_cast<std::size_t>(k)], c) = rank / static_cast<double>(n + 1);
            i = j + 1;
        }
    }
    return u;
}

double pair_log_likelihood(const PairCopula& pc, std::span<const double> u, std::span<const double> v) {
    if (pc.family() == PairFamily::Independence) return 0.0;
    std::vector<double> terms(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double t = pc.log_pdf(u[i], v[i]);
        if (!std::isfinite(t)) return -std::numeric_limits<double>::infinity();
        terms[i] = t;
    }
    return sorted_sum(terms);
}

PairFit fit_pair_mle(PairFamily family, std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) throw DomainError("fit_pair_mle: columns differ in length");
    if (u.size() < 2) throw DomainError("fit_pair_mle: need at least two observations");
    if (family == PairFamily::Independence) return {{}, 0.0};
    for (std::size_t i = 0; i < u.size(); ++i)
        if (!(u[i] > 0.0 && u[i] < 1.0 && v[i] > 0.0 && v[i] < 1.0))
            throw DomainError("fit_pair_mle: observation " + std::to_string(i + 1) +
                              " outside the open unit square");

    const ParamBounds b = PairCopula::fit_bounds(family);
    const double tau = sample_kendall_tau(u, v);
    double start;
    if (family == PairFamily::GumbelHougaard)
        start = tau_invert(family, std::clamp(tau, 0.0, 0.95))[0];
    else
        start = tau_invert(family, std::clamp(tau, -0.95, 0.95))[0];
    start = std::clamp(start, b.lower, b.upper);

    auto objective = [&](double p) {
        try {
            return pair_log_likelihood(PairCopula(family, {p}), u, v);
        } catch (const std::exception&) {
            return -std::numeric_limits<double>::infinity();
        }
    };
    const double best = bracketed_max(objective, start, b.lower, b.upper, 1e-6);
    const double ll = objective(best);
    if (!std::isfinite(ll)) {
        std::ostringstream os;
        os << "fit_pair_mle: " << to_string(family) << " likelihood not finite (start " << start
           << ", bounds [" << b.lower << ", " << b.upper << "], final " << best << ")";
        throw NumericalError(os.str());
    }
    return {{best}, ll};
}

PairFit fit_pair_mle(PairFamily family, const Matrix& uv) {
    if (uv.cols() != 2) throw DomainError("fit_pair_mle: expected two columns");
    const auto a = column(uv, 0), b = column(uv, 1);
    return fit_pair_mle(family, a, b);
}

double aic(double log_likelihood, std::size_t k) {
    return -2.0 * log_likelihood + 2.0 * static_cast<double>(k);
}

PairSelection select_pair_aic(std::span<const double> u, std::span<const double> v,
                              const std::vector<PairFamily>& candidates) {
    if (candidates.empty()) throw ConfigError("select_pair_aic: no candidate families");
    std::optional<PairSelection> best;
    std::string failures;
    for (PairFamily f : candidates) {
        try {
            PairFit fit = fit_pair_mle(f, u, v);
            PairFitRecord rec;
            rec.family = f;
            rec.params = fit.params;
            rec.log_likelihood = fit.log_likelihood;
            rec.aic = aic(fit.log_likelihood, PairCopula::parameter_count(f));
            if (!best || rec.aic < best->record.aic)
                best = PairSelection{PairCopula(f, fit.params), rec};
        } catch (const std::exception& e) {
            failures += std::string(failures.empty() ? "" : "; ") + std::string(to_string(f)) + ": " + e.what();
        }
    }
    if (!best) throw NumericalError("select_pair_aic: every candidate failed: " + failures);
    return *best;
}

PairSelection select_pair_aic(const Matrix& uv, const std::vector<PairFamily>& candidates) {
    if (uv.cols() != 2) throw DomainError("select_pair_aic: expected two columns");
    const auto a = column(uv, 0), b = column(uv, 1);
    return select_pair_aic(a, b, candidates);
}

std::vector<std::size_t> order_cvine(const Eigen::MatrixXd& tau) {
    const auto m = static_cast<std::size_t>(tau.rows());
    if (tau.cols() != tau.rows()) throw DomainError("order_cvine: tau matrix must be square");
    std::vector<std::size_t> order;
    std::vector<bool> used(m, false);
    for (std::size_t step = 0; step < m; ++step) {
        std::size_t best = m;
        double best_sum = -1.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (used[i]) continue;
            double s = 0.0;
            for (std::size_t j = 0; j < m; ++j)
                if (j != i && !used[j])
                    s += std::abs(tau(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
            if (s > best_sum) {
                best_sum = s;
                best = i;
            }
        }
        used[best] = true;
        order.push_back(best);
    }
    return order;
}

double path_weight(const Eigen::MatrixXd& tau, std::span<const std::size_t> path) {
    double w = 0.0;
    for (std::size_t k = 0; k + 1 < path.size(); ++k)
        w += std::abs(tau(static_cast<Eigen::Index>(path[k]), static_cast<Eigen::Index>(path[k + 1])));
    return w;
}

namespace {

std::vector<std::size_t> canonical_path(std::vector<std::size_t> p) {
    if (p.size() > 1 && p.front() > p.back()) std::reverse(p.begin(), p.end());
    return p;
}

std::vector<std::size_t> otsp_exhaustive(const Eigen::MatrixXd& tau) {
    const auto m = static_cast<std::size_t>(tau.rows());
    std::vector<std::size_t> p(m), best;
    std::iota(p.begin(), p.end(), 0);
    double best_w = -1.0;
    do {
        if (m > 1 && p.front() > p.back()) continue;
        const double w = path_weight(tau, p);
        if (w > best_w) {
            best_w = w;
            best = p;
        }
    } while (std::next_permutation(p.begin(), p.end()));
    return best;
}

class GaRng {
public:
    explicit GaRng(std::uint64_t seed) : rng_(seed, Stream::Genetic) {}
    double uniform() { return rng_.uniform(counter_++); }
    std::size_t below(std::size_t n) {
        return std::min(n - 1, static_cast<std::size_t>(uniform() * static_cast<double>(n)));
    }

private:
    CounterRng rng_;
    std::uint64_t counter_ = 0;
};

std::vector<std::size_t> order_crossover(const std::vector<std::size_t>& a,
                                         const std::vector<std::size_t>& b, GaRng& rng) {
    const std::size_t m = a.size();
    std::size_t i = rng.below(m), j = rng.below(m);
    if (i > j) std::swap(i, j);
    std::vector<std::size_t> child(m, m);
    std::vector<bool> taken(m, false);
    for (std::size_t k = i; k <= j; ++k) {
        child[k] = a[k];
        taken[a[k]] = true;
    }
    std::size_t pos = (j + 1) % m;
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t gene = b[(j + 1 + k) % m];
        if (taken[gene]) continue;
        child[pos] = gene;
        taken[gene] = true;
        pos = (pos + 1) % m;
    }
    return child;
}

std::vector<std::size_t> otsp_genetic(const Eigen::MatrixXd& tau, std::uint64_t seed) {
    constexpr std::size_t kPopulation = 120;
    constexpr int kGenerations = 500;
    constexpr double kMutation = 0.3;
    constexpr std::size_t kElite = 2;
    const auto m = static_cast<std::size_t>(tau.rows());
    GaRng rng(seed);

    std::vector<std::vector<std::size_t>> pop(kPopulation, std::vector<std::size_t>(m));
    for (std::size_t p = 0; p < kPopulation; ++p) {
        std::iota(pop[p].begin(), pop[p].end(), 0);
        if (p == 0) continue;
        for (std::size_t k = m - 1; k > 0; --k) std::swap(pop[p][k], pop[p][rng.below(k + 1)]);
    }
    std::vector<double> fit(kPopulation);
    auto evaluate = [&] {
        for (std::size_t p = 0; p < kPopulation; ++p) fit[p] = path_weight(tau, pop[p]);
    };
    auto ranked = [&] {
        std::vector<std::size_t> idx(kPopulation);
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fit[a] > fit[b]; });
        return idx;
    };
    auto tournament = [&]() -> const std::vector<std::size_t>& {
        std::size_t best = rng.below(kPopulation);
        for (int k = 0; k < 2; ++k) {
            const std::size_t c = rng.below(kPopulation);
            if (fit[c] > fit[best]) best = c;
        }
        return pop[best];
    };

    evaluate();
    for (int g = 0; g < kGenerations; ++g) {
        const auto idx = ranked();
        std::vector<std::vector<std::size_t>> next;
        next.reserve(kPopulation);
        for (std::size_t e = 0; e < kElite; ++e) next.push_back(pop[idx[e]]);
        while (next.size() < kPopulation) {
            auto child = order_crossover(tournament(), tournament(), rng);
            if (rng.uniform() < kMutation) {
                std::size_t i = rng.below(m), j = rng.below(m);
                if (rng.uniform() < 0.5) {
                    std::swap(child[i], child[j]);
                } else {
                    if (i > j) std::swap(i, j);
                    std::reverse(child.begin() + static_cast<std::ptrdiff_t>(i),
                                 child.begin() + static_cast<std::ptrdiff_t>(j) + 1);
                }
            }
            next.push_back(std::move(child));
        }
        pop = std::move(next);
        evaluate();
    }
    return pop[ranked().front()];
}

}  // namespace

std::vector<std::size_t> order_dvine(const Eigen::MatrixXd& tau, std::uint64_t seed) {
    if (tau.cols() != tau.rows()) throw DomainError("order_dvine: tau matrix must be square");
    const auto m = static_cast<std::size_t>(tau.rows());
    if (m <= 2) {
        std::vector<std::size_t> p(m);
        std::iota(p.begin(), p.end(), 0);
        return p;
    }
    if (m <= 8) return otsp_exhaustive(tau);
    return canonical_path(otsp_genetic(tau, seed));
}

std::string_view to_string(StructureMethod m) {
    switch (m) {
        case StructureMethod::Given: return "given";
        case StructureMethod::CVineHeuristic: return "cvine_heuristic";
        case StructureMethod::DVineOtsp: return "dvine_otsp";
    }
    return "unknown";
}

FitReport fit_vine(const Matrix& u, VineKind kind, const FitOptions& options) {
    if (kind == VineKind::RVine) throw StructuralError("fit_vine: unsupported structure (rvine)");
    const auto n = static_cast<std::size_t>(u.rows());
    const auto m = static_cast<std::size_t>(u.cols());
    if (m < 2) throw DomainError("fit_vine: need at least two variables");
    if (n < options.min_rows)
        throw DomainError("fit_vine: " + std::to_string(n) + " rows, need at least " +
                          std::to_string(options.min_rows));
    for (Eigen::Index r = 0; r < u.rows(); ++r)
        for (Eigen::Index c = 0; c < u.cols(); ++c)
            if (!(u(r, c) > 0.0 && u(r, c) < 1.0))
                throw DomainError("fit_vine: row " + std::to_string(r + 1) + " column " +
                                  std::to_string(c + 1) + " outside (0,1)");

    std::vector<std::size_t> identity(m);
    std::iota(identity.begin(), identity.end(), 0);
    FitReport report{VineModel::independent(kind, identity), 0.0, 0.0, {}, StructureMethod::Given, false, 0.0};
    std::vector<std::size_t> order;
    if (options.order) {
        order = *options.order;
        report.structure_method = StructureMethod::Given;
    } else {
        const Eigen::MatrixXd tau = kendall_tau_matrix(u);
        if (kind == VineKind::CVine) {
            order = order_cvine(tau);
            report.structure_method = StructureMethod::CVineHeuristic;
        } else {
            order = order_dvine(tau, options.seed);
            report.structure_method = StructureMethod::DVineOtsp;
        }
    }
    VineModel model = VineModel::independent(kind, order);

    auto fit_edge = [&](std::size_t t, std::size_t e, const std::vector<double>& a,
                        const std::vector<double>& b) {
        try {
            PairSelection sel = select_pair_aic(a, b, options.candidates);
            sel.record.tree = t;
            sel.record.edge = e;
            report.per_pair.push_back(sel.record);
            model = model.with_pair(t, e, sel.copula);
        } catch (const std::exception& ex) {
            throw NumericalError("fit_vine: " + edge_name(model, t, e) + ": " + ex.what());
        }
    };

    std::vector<std::vector<double>> data(m);
    for (std::size_t p = 0; p < m; ++p) data[p] = column(u, static_cast<Eigen::Index>(order[p]));

    if (kind == VineKind::CVine) {
        for (std::size_t t = 0; t + 1 < m; ++t) {
            for (std::size_t e = 0; t + 1 + e < m; ++e) fit_edge(t, e, data[t], data[t + 1 + e]);
            if (t + 2 < m)
                for (std::size_t e = 0; t + 1 + e < m; ++e) {
                    const PairCopula& pc = model.pair(t, e);
                    auto& col = data[t + 1 + e];
                    for (std::size_t i = 0; i < n; ++i) col[i] = pc.h_first(data[t][i], col[i]);
                }
        }
    } else {
        std::vector<std::vector<double>> lhs = data, rhs = data;
        for (std::size_t t = 0; t + 1 < m; ++t) {
            const std::size_t n_edges = m - 1 - t;
            for (std::size_t i = 0; i < n_edges; ++i) {
                fit_edge(t, i, lhs[i], rhs[i + 1]);
                if (t + 2 < m) {
                    const PairCopula& pc = model.pair(t, i);
                    std::vector<double> nl(n), nr(n);
                    for (std::size_t r = 0; r < n; ++r) {
                        nl[r] = pc.h(lhs[i][r], rhs[i + 1][r]);
                        nr[r] = pc.h_first(lhs[i][r], rhs[i + 1][r]);
                    }
                    lhs[i] = std::move(nl);
                    rhs[i] = std::move(nr);
                }
            }
        }
    }

    double ll = vine_log_likelihood(model, u);
    report.sequential_log_likelihood = ll;

    if (options.global_refit) {
        report.global_refit = true;
        for (int cycle = 0; cycle < options.refit_max_cycles; ++cycle) {
            const double before = ll;
            for (std::size_t t = 0; t + 1 < m; ++t)
                for (std::size_t e = 0; e < model.trees()[t].size(); ++e) {
                    const PairCopula current = model.pair(t, e);
                    if (current.family() == PairFamily::Independence) continue;
                    const ParamBounds b = PairCopula::fit_bounds(current.family());
                    auto objective = [&](double p) {
                        try {
                            return vine_log_likelihood(model.with_pair(t, e, PairCopula(current.family(), {p})), u);
                        } catch (const std::exception&) {
                            return -std::numeric_limits<double>::infinity();
                        }
                    };
                    const double p = bracketed_max(objective, current.params()[0], b.lower, b.upper, 1e-6);
                    const double cand = objective(p);
                    if (cand > ll) {
                        model = model.with_pair(t, e, PairCopula(current.family(), {p}));
                        ll = cand;
                    }
                }
            if (std::abs(ll - before) <= options.refit_rel_tol * std::max(1.0, std::abs(ll))) break;
        }
        // Per-pair records keep the sequential fits; refresh parameters.
        for (auto& rec : report.per_pair) rec.params = model.pair(rec.tree, rec.edge).params();
    }

    report.model = std::move(model);
    report.log_likelihood = ll;
    report.aic = aic(ll, report.model.parameter_count());
    return report;
}

}  // namespace vuq
