// Serial reference vs OpenMP kernels on the truss workload.

#include "vineuq/kernels.hpp"
#include "vineuq/models.hpp"
#include "vineuq/rng.hpp"
#include "vineuq/transform.hpp"
#include "vineuq/vine.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

using namespace vuq;

namespace {

double best_of(int reps, const std::function<void()>& fn) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

void row(const char* name, std::size_t n, double serial, double parallel, bool same) {
    std::printf("%-22s %9zu %10.4f %10.4f %8.2fx  %s\n", name, n, serial, parallel, serial / parallel,
                same ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"serial vs parallel kernel timings"};
    std::size_t n = 200000;
    int reps = 3;
    app.add_option("--n", n, "rows per kernel");
    app.add_option("--reps", reps, "repetitions (best time is reported)");
    CLI11_PARSE(app, argc, argv);

    kernels::configure_threads_from_env();
    std::printf("threads: %d\n", kernels::max_threads());
    std::printf("%-22s %9s %10s %10s %9s\n", "kernel", "rows", "serial s", "omp s", "speedup");

    const Copula c(truss_vine());
    const PseudoRandomSource src(1, Stream::Sampling);
    const InputModel input = make_truss_input(TrussCopula::Vine);
    const TrussModel truss;

    Matrix us, up;
    const double ts = best_of(reps, [&] { us = kernels::serial::sample_copula(c, n, src); });
    const double tp = best_of(reps, [&] { up = kernels::sample_copula(c, n, src); });
    row("sample_copula", n, ts, tp, us == up);

    Matrix ws, wp;
    const double rs = best_of(reps, [&] { ws = kernels::serial::rosenblatt_rows(c, us); });
    const double rp = best_of(reps, [&] { wp = kernels::rosenblatt_rows(c, us); });
    row("rosenblatt_rows", n, rs, rp, ws == wp);

    std::vector<double> ys, yp;
    const std::size_t nm = n / 4;
    const double ms = best_of(reps, [&] { ys = kernels::serial::simulate_responses(input, truss, nm, src); });
    const double mp = best_of(reps, [&] { yp = kernels::simulate_responses(input, truss, nm, src); });
    row("simulate_responses", nm, ms, mp, ys == yp);
    return 0;
}
