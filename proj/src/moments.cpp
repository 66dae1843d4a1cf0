#include "vineuq/moments.hpp"

#include "vineuq/error.hpp"
#include "vineuq/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace vuq {

std::string_view to_string(MomentMethod m) { return m == MomentMethod::MCS ? "mcs" : "pce"; }

MomentResult mc_moments(std::span<const double> samples) {
    const std::size_t n = samples.size();
    if (n < 2) throw DomainError("mc_moments: need at least two samples");
    std::vector<double> y(samples.begin(), samples.end());
    for (double v : y)
        if (!std::isfinite(v)) throw NumericalError("mc_moments: non-finite sample");
    std::sort(y.begin(), y.end());
    const double nd = static_cast<double>(n);
    const double mean = pairwise_sum(y) / nd;
    for (double& v : y) v = (v - mean) * (v - mean);
    const double var = pairwise_sum(y) / (nd - 1.0);

    MomentResult r;
    r.mean = mean;
    r.std = std::sqrt(var);
    r.cov_mean = mean == 0.0 ? kUndefined : std::abs(r.std / mean) / std::sqrt(nd);
    r.cov_std = 1.0 / std::sqrt(2.0 * nd);
    r.n_evals = n;
    r.method = MomentMethod::MCS;
    return r;
}

FailureEstimate mc_failure_probability(std::span<const double> samples, double y_star, Direction dir) {
    if (samples.empty()) throw DomainError("mc_failure_probability: no samples");
    FailureEstimate f;
    f.n = samples.size();
    for (double y : samples) {
        if (std::isnan(y)) throw NumericalError("mc_failure_probability: NaN sample");
        if (dir == Direction::GE ? y >= y_star : y <= y_star) ++f.n_fail;
    }
    const double n = static_cast<double>(f.n);
    f.pf = static_cast<double>(f.n_fail) / n;
    f.cov = f.n_fail == 0 ? kUndefined : std::sqrt((1.0 - f.pf) / (n * f.pf));
    return f;
}

}  // namespace vuq
