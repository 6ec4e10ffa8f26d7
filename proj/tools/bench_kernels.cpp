// Timings of the OpenMP kernels against their serial references.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "qpc/kernels.hpp"

namespace {

using qpc::kernels::cdouble;
using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::vector<cdouble> random_vec(size_t n, std::mt19937& rng) {
    std::normal_distribution<double> dist;
    std::vector<cdouble> v(n);
    for (cdouble& x : v) x = {dist(rng), dist(rng)};
    return v;
}

template <typename F>
double time_best_of(int reps, F&& f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        auto t0 = clock_type::now();
        f();
        best = std::min(best, seconds_since(t0));
    }
    return best;
}

}  // namespace

int main() {
    std::mt19937 rng(7);

    std::printf("%-14s %8s %12s %12s %8s\n", "kernel", "size", "serial[s]",
                "parallel[s]", "speedup");

    for (int N : {128, 512, 2048}) {
        auto u = random_vec(2 * N + 1, rng);
        auto v = random_vec(2 * N + 1, rng);
        std::vector<cdouble> out(2 * N + 1);
        double ts = time_best_of(3, [&] {
            qpc::kernels::convolve_serial(u.data(), v.data(), out.data(), N);
        });
        double tp = time_best_of(3, [&] {
            qpc::kernels::convolve_omp(u.data(), v.data(), out.data(), N);
        });
        std::printf("%-14s %8d %12.3e %12.3e %8.2f\n", "convolve", N, ts, tp, ts / tp);
    }

    for (int n : {128, 256, 512}) {
        auto A = random_vec(static_cast<size_t>(n) * n, rng);
        auto B = random_vec(static_cast<size_t>(n) * n, rng);
        std::vector<cdouble> C(static_cast<size_t>(n) * n);
        double ts = time_best_of(3, [&] {
            qpc::kernels::gemm_serial(A.data(), B.data(), C.data(), n, n, n);
        });
        double tp = time_best_of(3, [&] {
            qpc::kernels::gemm_omp(A.data(), B.data(), C.data(), n, n, n);
        });
        std::printf("%-14s %8d %12.3e %12.3e %8.2f\n", "gemm", n, ts, tp, ts / tp);
    }

    for (int n : {128, 256, 512}) {
        auto A0 = random_vec(static_cast<size_t>(n) * n, rng);
        auto b0 = random_vec(n, rng);
        double ts = time_best_of(3, [&] {
            auto A = A0;
            auto b = b0;
            qpc::kernels::lu_solve_serial(A.data(), b.data(), n, 1);
        });
        double tp = time_best_of(3, [&] {
            auto A = A0;
            auto b = b0;
            qpc::kernels::lu_solve_omp(A.data(), b.data(), n, 1);
        });
        std::printf("%-14s %8d %12.3e %12.3e %8.2f\n", "lu_solve", n, ts, tp, ts / tp);
    }
    return 0;
}
