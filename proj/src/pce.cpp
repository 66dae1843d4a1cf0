#include "vineuq/pce.hpp"

#include "vineuq/error.hpp"
#include "vineuq/numerics.hpp"
#include "vineuq/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>

namespace vuq {

double hermite_eval(unsigned k, double z) {
    // Normalised recurrence: psi_{j+1} = (z psi_j - sqrt(j) psi_{j-1}) / sqrt(j+1).
    double prev = 0.0, cur = 1.0;
    for (unsigned j = 0; j < k; ++j) {
        const double next = (z * cur - std::sqrt(static_cast<double>(j)) * prev) / std::sqrt(static_cast<double>(j + 1));
        prev = cur;
        cur = next;
    }
    return cur;
}

void hermite_all(double z, std::span<double> out) {
    if (out.empty()) return;
    out[0] = 1.0;
    if (out.size() > 1) out[1] = z;
    for (std::size_t j = 1; j + 1 < out.size(); ++j)
        out[j + 1] = (z * out[j] - std::sqrt(static_cast<double>(j)) * out[j - 1]) /
                     std::sqrt(static_cast<double>(j + 1));
}

std::vector<MultiIndex> hyperbolic_basis(std::size_t dim, unsigned degree, double q) {
    if (dim == 0) throw DomainError("hyperbolic_basis: zero dimension");
    if (!(q > 0.0 && q <= 1.0)) throw DomainError("hyperbolic_basis: q must lie in (0, 1]");
    std::vector<MultiIndex> out;
    MultiIndex alpha(dim, 0);
    const double limit = std::pow(static_cast<double>(degree), q) * (1.0 + 1e-12);
    // Depth-first enumeration over total degree <= degree, filtered by the q-norm.
    auto recurse = [&](auto&& self, std::size_t i, unsigned remaining, double acc) -> void {
        if (i == dim) {
            out.push_back(alpha);
            return;
        }
        for (unsigned a = 0; a <= remaining; ++a) {
            const double next = acc + (a == 0 ? 0.0 : std::pow(static_cast<double>(a), q));
            if (next > limit) break;
            alpha[i] = a;
            self(self, i + 1, remaining - a, next);
        }
        alpha[i] = 0;
    };
    recurse(recurse, 0, degree, 0.0);
    auto total = [](const MultiIndex& a) { return std::accumulate(a.begin(), a.end(), 0u); };
    std::stable_sort(out.begin(), out.end(), [&](const MultiIndex& a, const MultiIndex& b) {
        const unsigned ta = total(a), tb = total(b);
        if (ta != tb) return ta < tb;
        return a > b;
    });
    return out;
}

Matrix pce_design_matrix(const std::vector<MultiIndex>& basis, const Matrix& z) {
    const Eigen::Index n = z.rows();
    const auto m = static_cast<std::size_t>(z.cols());
    unsigned max_deg = 0;
    for (const auto& a : basis) {
        if (a.size() != m) throw DomainError("pce_design_matrix: multi-index dimension mismatch");
        for (unsigned v : a) max_deg = std::max(max_deg, v);
    }
    Matrix psi(n, static_cast<Eigen::Index>(basis.size()));
    std::vector<double> h(static_cast<std::size_t>(max_deg + 1) * m);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (std::size_t i = 0; i < m; ++i)
            hermite_all(z(r, static_cast<Eigen::Index>(i)),
                        std::span<double>(h.data() + i * (max_deg + 1), max_deg + 1));
        for (std::size_t b = 0; b < basis.size(); ++b) {
            double v = 1.0;
            for (std::size_t i = 0; i < m; ++i)
                if (basis[b][i] != 0) v *= h[i * (max_deg + 1) + basis[b][i]];
            psi(r, static_cast<Eigen::Index>(b)) = v;
        }
    }
    return psi;
}

double PceModel::predict(std::span<const double> z) const {
    if (z.size() != dimension) throw DomainError("pce_predict: dimension mismatch");
    unsigned max_deg = 0;
    for (const auto& a : indices)
        for (unsigned v : a) max_deg = std::max(max_deg, v);
    std::vector<double> h(static_cast<std::size_t>(max_deg + 1) * dimension);
    for (std::size_t i = 0; i < dimension; ++i)
        hermite_all(z[i], std::span<double>(h.data() + i * (max_deg + 1), max_deg + 1));
    double y = 0.0;
    for (std::size_t b = 0; b < indices.size(); ++b) {
        double v = coefficients[b];
        for (std::size_t i = 0; i < dimension; ++i)
            if (indices[b][i] != 0) v *= h[i * (max_deg + 1) + indices[b][i]];
        y += v;
    }
    return y;
}

double pce_predict(const PceModel& p, std::span<const double> z) { return p.predict(z); }

PceMoments pce_moments(const PceModel& p) {
    double mean = 0.0, var = 0.0;
    for (std::size_t b = 0; b < p.indices.size(); ++b) {
        const bool zero = std::all_of(p.indices[b].begin(), p.indices[b].end(), [](unsigned v) { return v == 0; });
        if (zero)
            mean += p.coefficients[b];
        else
            var += p.coefficients[b] * p.coefficients[b];
    }
    return {mean, std::sqrt(var)};
}

namespace {

struct OlsFit {
    Eigen::VectorXd coef;
    double loo = std::numeric_limits<double>::infinity();
};

// Least squares on the given columns with the corrected relative LOO error.
std::optional<OlsFit> ols_loo(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, double var_y) {
    const Eigen::Index n = a.rows(), p = a.cols();
    if (n - p < 1) return std::nullopt;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    const Eigen::MatrixXd r = qr.matrixQR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
    const double rmax = r.diagonal().cwiseAbs().maxCoeff();
    if (!(r.diagonal().cwiseAbs().minCoeff() > 1e-10 * rmax)) return std::nullopt;
    OlsFit fit;
    fit.coef = qr.solve(y);
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
    const Eigen::MatrixXd rinv =
        r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
    const Eigen::VectorXd resid = y - a * fit.coef;
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double h = q.row(i).squaredNorm();
        if (h >= 1.0 - 1e-12) return std::nullopt;
        const double e = resid(i) / (1.0 - h);
        sum += e * e;
    }
    const double nd = static_cast<double>(n);
    const double correction = nd / (nd - static_cast<double>(p)) * (1.0 + rinv.squaredNorm());
    fit.loo = sum / nd / var_y * correction;
    return fit;
}

struct Candidate {
    std::vector<std::size_t> columns;  // indices into the basis (0 = constant)
    Eigen::VectorXd coef;
    double loo = std::numeric_limits<double>::infinity();
};

Eigen::MatrixXd gather(const Matrix& psi, const std::vector<std::size_t>& cols) {
    Eigen::MatrixXd a(psi.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) a.col(static_cast<Eigen::Index>(k)) = psi.col(static_cast<Eigen::Index>(cols[k]));
    return a;
}

Candidate fit_full_ols(const Matrix& psi, const Eigen::VectorXd& y, double var_y) {
    Candidate c;
    c.columns.resize(static_cast<std::size_t>(psi.cols()));
    std::iota(c.columns.begin(), c.columns.end(), 0);
    if (auto f = ols_loo(gather(psi, c.columns), y, var_y)) {
        c.coef = f->coef;
        c.loo = f->loo;
    }
    return c;
}

// Least-angle path over the non-constant columns; at every step the active set
// plus the constant is refitted by least squares and scored by corrected LOO.
Candidate fit_hybrid_lars(const Matrix& psi, const Eigen::VectorXd& y, double var_y) {
    const Eigen::Index n = psi.rows();
    const Eigen::Index p = psi.cols() - 1;
    Candidate best;
    if (p <= 0 || n < 3) return best;

    Eigen::MatrixXd x = psi.rightCols(p);
    std::vector<bool> usable(static_cast<std::size_t>(p), true);
    for (Eigen::Index j = 0; j < p; ++j) {
        x.col(j).array() -= x.col(j).mean();
        const double norm = x.col(j).norm();
        if (norm < 1e-12) {
            usable[static_cast<std::size_t>(j)] = false;
            x.col(j).setZero();
        } else {
            x.col(j) /= norm;
        }
    }
    const Eigen::VectorXd yc = y.array() - y.mean();
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(n);

    const auto max_steps = static_cast<std::size_t>(std::min<Eigen::Index>(p, n - 2));
    const std::size_t patience = std::max<std::size_t>(10, static_cast<std::size_t>(n / 10));
    std::vector<std::size_t> active;
    std::vector<bool> in_active(static_cast<std::size_t>(p), false);
    std::vector<double> sign;
    Eigen::MatrixXd gram;  // signed Gram of the active columns
    std::size_t since_best = 0;

    Eigen::VectorXd c = x.transpose() * yc;
    double c0 = 0.0;
    std::size_t first = 0;
    for (Eigen::Index j = 0; j < p; ++j)
        if (usable[static_cast<std::size_t>(j)] && std::abs(c(j)) > c0) {
            c0 = std::abs(c(j));
            first = static_cast<std::size_t>(j);
        }
    if (c0 == 0.0) return best;

    auto add = [&](std::size_t j) {
        const double s = c(static_cast<Eigen::Index>(j)) >= 0.0 ? 1.0 : -1.0;
        const auto k = static_cast<Eigen::Index>(active.size());
        Eigen::MatrixXd g(k + 1, k + 1);
        g.topLeftCorner(k, k) = gram;
        for (Eigen::Index a = 0; a < k; ++a) {
            const double v = sign[static_cast<std::size_t>(a)] * s *
                             x.col(static_cast<Eigen::Index>(active[static_cast<std::size_t>(a)])).dot(x.col(static_cast<Eigen::Index>(j)));
            g(a, k) = g(k, a) = v;
        }
        g(k, k) = 1.0;
        gram = std::move(g);
        active.push_back(j);
        sign.push_back(s);
        in_active[j] = true;
    };

    auto score = [&] {
        std::vector<std::size_t> cols{0};
        for (std::size_t j : active) cols.push_back(j + 1);
        auto f = ols_loo(gather(psi, cols), y, var_y);
        if (f && f->loo < best.loo) {
            best.columns = std::move(cols);
            best.coef = f->coef;
            best.loo = f->loo;
            since_best = 0;
        } else {
            ++since_best;
        }
    };

    add(first);
    score();
    while (active.size() < max_steps && since_best < patience) {
        c = x.transpose() * (yc - mu);
        double cmax = 0.0;
        for (std::size_t j : active) cmax = std::max(cmax, std::abs(c(static_cast<Eigen::Index>(j))));
        if (cmax < 1e-12 * c0) break;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
        if (ldlt.info() != Eigen::Success) break;
        const Eigen::VectorXd ones = Eigen::VectorXd::Ones(gram.rows());
        const Eigen::VectorXd ginv1 = ldlt.solve(ones);
        const double denom = ones.dot(ginv1);
        if (!(denom > 0.0) || !std::isfinite(denom)) break;
        const double aa = 1.0 / std::sqrt(denom);
        Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
        for (std::size_t k = 0; k < active.size(); ++k)
            u += (aa * ginv1(static_cast<Eigen::Index>(k)) * sign[k]) * x.col(static_cast<Eigen::Index>(active[k]));
        const Eigen::VectorXd a = x.transpose() * u;
        double gamma = cmax / aa;
        std::optional<std::size_t> next;
        for (Eigen::Index j = 0; j < p; ++j) {
            if (in_active[static_cast<std::size_t>(j)] || !usable[static_cast<std::size_t>(j)]) continue;
            for (double cand : {(cmax - c(j)) / (aa - a(j)), (cmax + c(j)) / (aa + a(j))})
                if (cand > 1e-15 && cand < gamma) {
                    gamma = cand;
                    next = static_cast<std::size_t>(j);
                }
        }
        mu += gamma * u;
        if (!next) break;
        c = x.transpose() * (yc - mu);
        add(*next);
        score();
    }
    return best;
}

}  // namespace

PceModel pce_fit(const Matrix& z, std::span<const double> y, const PceOptions& options) {
    const Eigen::Index n = z.rows();
    const auto m = static_cast<std::size_t>(z.cols());
    if (static_cast<std::size_t>(n) != y.size()) throw DomainError("pce_fit: design and response sizes differ");
    if (n < 3) throw DomainError("pce_fit: need at least three design points");
    if (m == 0) throw DomainError("pce_fit: zero-dimensional design");
    if (options.degree_max < options.degree_min || options.degree_min < 1)
        throw ConfigError("pce_fit: invalid degree range");
    Eigen::VectorXd yv(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        yv(i) = y[static_cast<std::size_t>(i)];
        if (!std::isfinite(yv(i))) throw NumericalError("pce_fit: non-finite response at row " + std::to_string(i + 1));
    }
    const double mean = yv.mean();
    const double var_y = (yv.array() - mean).square().sum() / static_cast<double>(n - 1);

    PceModel model;
    model.dimension = m;
    model.q = options.q;
    model.sparse = options.sparse;
    if (var_y == 0.0) {
        model.indices = {MultiIndex(m, 0)};
        model.coefficients = {mean};
        model.degree = 0;
        model.loo_error = 0.0;
        return model;
    }

    std::optional<Candidate> best;
    std::vector<MultiIndex> best_basis;
    int worse = 0;
    for (unsigned d = options.degree_min; d <= options.degree_max; ++d) {
        auto basis = hyperbolic_basis(m, d, options.q);
        if (!options.sparse && static_cast<Eigen::Index>(basis.size()) >= n) break;
        const Matrix psi = pce_design_matrix(basis, z);
        Candidate c = options.sparse ? fit_hybrid_lars(psi, yv, var_y) : fit_full_ols(psi, yv, var_y);
        if (!std::isfinite(c.loo)) {
            if (!best) continue;
            break;
        }
        if (!best || c.loo < best->loo) {
            best = std::move(c);
            best_basis = std::move(basis);
            model.degree = d;
            worse = 0;
        } else if (++worse >= options.early_stop) {
            break;
        }
    }
    if (!best)
        throw NumericalError("pce_fit: rank-deficient design (" + std::to_string(n) +
                             " points); increase the design size or lower the degree");
    for (std::size_t k = 0; k < best->columns.size(); ++k) {
        model.indices.push_back(best_basis[best->columns[k]]);
        model.coefficients.push_back(best->coef(static_cast<Eigen::Index>(k)));
    }
    model.loo_error = best->loo;
    return model;
}

Matrix standard_normal_design(std::size_t n, std::size_t dim, std::uint64_t seed, bool sobol) {
    auto source = make_source(sobol, dim, seed, Stream::Design);
    Matrix z(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
    std::vector<double> u(dim);
    for (std::size_t r = 0; r < n; ++r) {
        source->fill(r, u);
        for (std::size_t i = 0; i < dim; ++i)
            z(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) = norm_quantile(u[i]);
    }
    return z;
}

}  // namespace vuq
