#pragma once

// Row-parallel batch kernels. Every row is computed by a pure function of its
// index, so the OpenMP path and the serial reference produce bit-identical
// output regardless of thread count.

#include "vineuq/types.hpp"

#include <cstddef>
#include <exception>
#include <mutex>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace vuq {

class Copula;
class InputModel;
class UniformSource;
class ComputationalModel;

namespace kernels {

/// Runs fn(r) for r in [0, n) across OpenMP threads. The first exception
/// thrown by any row is rethrown after the loop.
template <class Fn>
void for_each_row(std::size_t n, Fn&& fn, bool parallel = true) {
    if (!parallel) {
        for (std::size_t r = 0; r < n; ++r) fn(r);
        return;
    }
    std::exception_ptr first_error;
    std::mutex error_mutex;
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
    for (long long r = 0; r < count; ++r) {
        try {
            fn(static_cast<std::size_t>(r));
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    }
    if (first_error) std::rethrow_exception(first_error);
}

Matrix sample_copula(const Copula& c, std::size_t n, const UniformSource& source);
Matrix rosenblatt_rows(const Copula& c, const Matrix& u);
Matrix inverse_rosenblatt_rows(const Copula& c, const Matrix& w);
/// Respects ComputationalModel::thread_safe().
std::vector<double> evaluate_rows(const ComputationalModel& model, const Matrix& x);

/// Streams n realisations of the input through the model without storing the
/// input sample: row r uses source.fill(r), inverse Rosenblatt, marginal
/// inverse CDFs, then model evaluation.
std::vector<double> simulate_responses(const InputModel& input, const ComputationalModel& model,
                                       std::size_t n, const UniformSource& source);

/// Thread count from VINEUQ_NUM_THREADS (if set), applied to OpenMP.
void configure_threads_from_env();
int max_threads();

namespace serial {

Matrix sample_copula(const Copula& c, std::size_t n, const UniformSource& source);
Matrix rosenblatt_rows(const Copula& c, const Matrix& u);
Matrix inverse_rosenblatt_rows(const Copula& c, const Matrix& w);
std::vector<double> evaluate_rows(const ComputationalModel& model, const Matrix& x);
std::vector<double> simulate_responses(const InputModel& input, const ComputationalModel& model,
                                       std::size_t n, const UniformSource& source);

}  // namespace serial

}  // namespace kernels
}  // namespace vuq
