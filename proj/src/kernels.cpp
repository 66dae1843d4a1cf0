#include "vineuq/kernels.hpp"

#include "vineuq/error.hpp"
#include "vineuq/model.hpp"
#include "vineuq/rng.hpp"
#include "vineuq/vine.hpp"

#include <cstdlib>
#include <string>

namespace vuq::kernels {

namespace {

Matrix sample_impl(const Copula& c, std::size_t n, const UniformSource& source, bool parallel) {
    const std::size_t m = c.dimension();
    Matrix u(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    for_each_row(
        n,
        [&](std::size_t r) {
            std::vector<double> w(m);
            source.fill(r, w);
            c.inverse_rosenblatt(w, row_span(u, static_cast<Eigen::Index>(r)));
        },
        parallel);
    return u;
}

template <bool Forward>
Matrix transform_impl(const Copula& c, const Matrix& in, bool parallel) {
    if (static_cast<std::size_t>(in.cols()) != c.dimension())
        throw DomainError("rosenblatt: column count does not match copula dimension");
    Matrix out(in.rows(), in.cols());
    for_each_row(
        static_cast<std::size_t>(in.rows()),
        [&](std::size_t r) {
            const auto row = static_cast<Eigen::Index>(r);
            if constexpr (Forward)
                c.rosenblatt(row_span(in, row), row_span(out, row));
            else
                c.inverse_rosenblatt(row_span(in, row), row_span(out, row));
        },
        parallel);
    return out;
}

std::vector<double> evaluate_impl(const ComputationalModel& model, const Matrix& x, bool parallel) {
    if (static_cast<std::size_t>(x.cols()) != model.dimension())
        throw DomainError("evaluate_rows: column count " + std::to_string(x.cols()) +
                          " does not match model dimension " +
                          std::to_string(model.dimension()));
    std::vector<double> y(static_cast<std::size_t>(x.rows()));
    for_each_row(
        y.size(),
        [&](std::size_t r) { y[r] = model.evaluate(row_span(x, static_cast<Eigen::Index>(r))); },
        parallel && model.thread_safe());
    return y;
}

std::vector<double> simulate_impl(const InputModel& input, const ComputationalModel& model,
                                 std::size_t n, const UniformSource& source, bool parallel) {
    const std::size_t m = input.dimension();
    if (model.dimension() != m)
        throw DomainError("simulate_responses: model dimension does not match input model");
    std::vector<double> y(n);
    for_each_row(
        n,
        [&](std::size_t r) {
            std::vector<double> w(m), u(m), x(m);
            source.fill(r, w);
            input.copula().inverse_rosenblatt(w, u);
            input.to_physical(u, x);
            y[r] = model.evaluate(x);
        },
        parallel && model.thread_safe());
    return y;
}

}  // namespace

std::vector<double> simulate_responses(const InputModel& input, const ComputationalModel& model,
                                       std::size_t n, const UniformSource& source) {
    return simulate_impl(input, model, n, source, true);
}

Matrix sample_copula(const Copula& c, std::size_t n, const UniformSource& source) {
    return sample_impl(c, n, source, true);
}
Matrix rosenblatt_rows(const Copula& c, const Matrix& u) { return transform_impl<true>(c, u, true); }
Matrix inverse_rosenblatt_rows(const Copula& c, const Matrix& w) {
    return transform_impl<false>(c, w, true);
}
std::vector<double> evaluate_rows(const ComputationalModel& model, const Matrix& x) {
    return evaluate_impl(model, x, true);
}

void configure_threads_from_env() {
#ifdef _OPENMP
    if (const char* env = std::getenv("VINEUQ_NUM_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) omp_set_num_threads(n);
    }
#endif
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

namespace serial {

Matrix sample_copula(const Copula& c, std::size_t n, const UniformSource& source) {
    return sample_impl(c, n, source, false);
}
Matrix rosenblatt_rows(const Copula& c, const Matrix& u) { return transform_impl<true>(c, u, false); }
Matrix inverse_rosenblatt_rows(const Copula& c, const Matrix& w) {
    return transform_impl<false>(c, w, false);
}
std::vector<double> evaluate_rows(const ComputationalModel& model, const Matrix& x) {
    return evaluate_impl(model, x, false);
}
std::vector<double> simulate_responses(const InputModel& input, const ComputationalModel& model,
                                       std::size_t n, const UniformSource& source) {
    return simulate_impl(input, model, n, source, false);
}

}  // namespace serial

}  // namespace vuq::kernels
