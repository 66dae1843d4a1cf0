#include "vineuq/numerics.hpp"

#include "vineuq/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace vuq {

double norm_pdf(double x) {
    static const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * kPi);
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

namespace {

template <std::size_t N>
double horner(const std::array<double, N>& c, double x) {
    double acc = c[N - 1];
    for (std::size_t i = N - 1; i-- > 0;) acc = acc * x + c[i];
    return acc;
}

// AS241 (PPND16) coefficients, lowest order first.
constexpr std::array<double, 8> kA{3.3871328727963666080e0,  1.3314166789178437745e+2,
                                   1.9715909503065514427e+3, 1.3731693765509461125e+4,
                                   4.5921953931549871457e+4, 6.7265770927008700853e+4,
                                   3.3430575583588128105e+4, 2.5090809287301226727e+3};
constexpr std::array<double, 8> kB{1.0,
                                   4.2313330701600911252e+1,
                                   6.8718700749205790830e+2,
                                   5.3941960214247511077e+3,
                                   2.1213794301586595867e+4,
                                   3.9307895800092710610e+4,
                                   2.8729085735721942674e+4,
                                   5.2264952788528545610e+3};
constexpr std::array<double, 8> kC{1.42343711074968357734e0,  4.63033784615654529590e0,
                                   5.76949722146069140550e0,  3.64784832476320460504e0,
                                   1.27045825245236838258e0,  2.41780725177450611770e-1,
                                   2.27238449892691845833e-2, 7.74545014278341407640e-4};
constexpr std::array<double, 8> kD{1.0,
                                   2.05319162663775882187e0,
                                   1.67638483018380384940e0,
                                   6.89767334985100004550e-1,
                                   1.48103976427480074590e-1,
                                   1.51986665636164571966e-2,
                                   5.47593808499534494600e-4,
                                   1.05075007164441684324e-9};
constexpr std::array<double, 8> kE{6.65790464350110377720e0,  5.46378491116411436990e0,
                                   1.78482653991729133580e0,  2.96560571828504891230e-1,
                                   2.65321895265761230930e-2, 1.24266094738807843860e-3,
                                   2.71155556874348757815e-5, 2.01033439929228813265e-7};
constexpr std::array<double, 8> kF{1.0,
                                   5.99832206555887937690e-1,
                                   1.36929880922735805310e-1,
                                   1.48753612908506148525e-2,
                                   7.86869131145613259100e-4,
                                   1.84631831751005468180e-5,
                                   1.42151175831644588870e-7,
                                   2.04426310338993978564e-15};

}  // namespace

double norm_quantile(double p) {
    if (std::isnan(p)) throw DomainError("norm_quantile: NaN probability");
    p = std::clamp(p, kProbEps, 1.0 - kProbEps);
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q * horner(kA, r) / horner(kB, r);
    }
    double r = std::sqrt(-std::log(q < 0.0 ? p : 1.0 - p));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        val = horner(kC, r) / horner(kD, r);
    } else {
        r -= 5.0;
        val = horner(kE, r) / horner(kF, r);
    }
    return q < 0.0 ? -val : val;
}

namespace {

// P(X > h, Y > k) for standard bivariate normal (Genz, BVNU).
double bvn_upper(double h, double k, double r) {
    static const QuadratureRule g6 = gauss_legendre(6);
    static const QuadratureRule g12 = gauss_legendre(12);
    static const QuadratureRule g20 = gauss_legendre(20);
    const QuadratureRule& g = std::abs(r) < 0.3 ? g6 : (std::abs(r) < 0.75 ? g12 : g20);
    const double two_pi = 2.0 * kPi;

    double hk = h * k;
    double bvn = 0.0;
    if (std::abs(r) < 0.925) {
        const double hs = (h * h + k * k) / 2.0;
        const double asr = std::asin(r);
        for (std::size_t i = 0; i < g.nodes.size(); ++i) {
            const double sn = std::sin(asr * (1.0 + g.nodes[i]) / 2.0);
            bvn += g.weights[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
        }
        return bvn * asr / (2.0 * two_pi) + norm_cdf(-h) * norm_cdf(-k);
    }
    if (r < 0.0) {
        k = -k;
        hk = -hk;
    }
    if (std::abs(r) < 1.0) {
        const double as = (1.0 - r) * (1.0 + r);
        double a = std::sqrt(as);
        const double bs = (h - k) * (h - k);
        const double c = (4.0 - hk) / 8.0;
        const double d = (12.0 - hk) / 16.0;
        bvn = a * std::exp(-(bs / as + hk) / 2.0) *
              (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
        if (hk > -160.0) {
            const double b = std::sqrt(bs);
            bvn -= std::exp(-hk / 2.0) * std::sqrt(two_pi) * norm_cdf(-b / a) * b *
                   (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
        }
        a /= 2.0;
        for (std::size_t i = 0; i < g.nodes.size(); ++i) {
            const double xs = (a * (g.nodes[i] + 1.0)) * (a * (g.nodes[i] + 1.0));
            const double rs = std::sqrt(1.0 - xs);
            bvn += a * g.weights[i] *
                   (std::exp(-bs / (2.0 * xs) - hk / (1.0 + rs)) / rs -
                    std::exp(-(bs / xs + hk) / 2.0) * (1.0 + c * xs * (1.0 + d * xs)));
        }
        bvn = -bvn / two_pi;
    }
    if (r > 0.0) return bvn + norm_cdf(-std::max(h, k));
    bvn = -bvn;
    if (k > h) bvn += norm_cdf(k) - norm_cdf(h);
    return bvn;
}

}  // namespace

double bvn_cdf(double x, double y, double rho) {
    if (!(rho >= -1.0 && rho <= 1.0)) throw DomainError("bvn_cdf: correlation outside [-1, 1]");
    if (std::isinf(x) || std::isinf(y)) {
        if (x == -INFINITY || y == -INFINITY) return 0.0;
        if (x == INFINITY) return norm_cdf(y);
        return norm_cdf(x);
    }
    return std::clamp(bvn_upper(-x, -y, rho), 0.0, 1.0);
}

QuadratureRule gauss_legendre(std::size_t n, double a, double b) {
    if (n == 0) throw DomainError("gauss_legendre: n must be positive");
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const std::size_t m = (n + 1) / 2;
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (std::size_t i = 0; i < m; ++i) {
        double z = std::cos(kPi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (std::size_t j = 1; j <= n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / static_cast<double>(j);
            }
            dp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        rule.nodes[i] = mid - half * z;
        rule.nodes[n - 1 - i] = mid + half * z;
        rule.weights[i] = half * w;
        rule.weights[n - 1 - i] = half * w;
    }
    return rule;
}

double golden_section_max(const std::function<double(double)>& f, double lo, double hi, double tol,
                          int max_iter) {
    static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < max_iter && (b - a) > tol; ++it) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    // Boundary optima: golden section never probes the endpoints themselves.
    double best = fc >= fd ? c : d;
    double fbest = std::max(fc, fd);
    if (const double flo = f(lo); flo > fbest) {
        best = lo;
        fbest = flo;
    }
    if (const double fhi = f(hi); fhi > fbest) best = hi;
    return best;
}

double bracketed_max(const std::function<double(double)>& f, double x0, double lo, double hi,
                     double tol) {
    x0 = std::clamp(x0, lo, hi);
    double step = std::max(1e-3, 0.05 * (hi - lo));
    double f0 = f(x0);
    // Walk uphill with growing steps until the function decreases on both sides.
    double left = std::max(lo, x0 - step), right = std::min(hi, x0 + step);
    double fl = f(left), fr = f(right);
    int guard = 0;
    while ((fl > f0 || fr > f0) && guard++ < 60) {
        if (fr > f0 && fr >= fl) {
            left = x0;
            fl = f0;
            x0 = right;
            f0 = fr;
            step *= 1.618;
            right = std::min(hi, x0 + step);
            fr = f(right);
            if (right == x0) break;
        } else {
            right = x0;
            fr = f0;
            x0 = left;
            f0 = fl;
            step *= 1.618;
            left = std::max(lo, x0 - step);
            fl = f(left);
            if (left == x0) break;
        }
    }
    return golden_section_max(f, left, right, tol);
}

double pairwise_sum(std::span<const double> values) {
    constexpr std::size_t kBlock = 128;
    if (values.size() <= kBlock) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace vuq
