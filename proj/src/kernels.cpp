#include "qpc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace qpc {
namespace kernels {

void convolve_serial(const cdouble* u, const cdouble* v, cdouble* out, int N) {
    int n1 = 2 * N + 1;
    for (int i = 0; i < n1; ++i) {
        int n = i - N;
        int lo = std::max(-N, n - N), hi = std::min(N, n + N);
        cdouble acc = 0.0;
        for (int k = lo; k <= hi; ++k) acc += u[n - k + N] * v[k + N];
        out[i] = acc;
    }
}

void convolve_omp(const cdouble* u, const cdouble* v, cdouble* out, int N) {
    int n1 = 2 * N + 1;
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n1; ++i) {
        int n = i - N;
        int lo = std::max(-N, n - N), hi = std::min(N, n + N);
        cdouble acc = 0.0;
        for (int k = lo; k <= hi; ++k) acc += u[n - k + N] * v[k + N];
        out[i] = acc;
    }
}

namespace {

inline void gemm_rows(const cdouble* A, const cdouble* B, cdouble* C, int i0,
                      int i1, int k, int n) {
    for (int i = i0; i < i1; ++i) {
        cdouble* Ci = C + static_cast<size_t>(i) * n;
        std::memset(Ci, 0, sizeof(cdouble) * n);
        const cdouble* Ai = A + static_cast<size_t>(i) * k;
        for (int p = 0; p < k; ++p) {
            cdouble a = Ai[p];
            if (a == cdouble{}) continue;
            const cdouble* Bp = B + static_cast<size_t>(p) * n;
            for (int j = 0; j < n; ++j) Ci[j] += a * Bp[j];
        }
    }
}

}  // namespace

void gemm_serial(const cdouble* A, const cdouble* B, cdouble* C, int m, int k, int n) {
    gemm_rows(A, B, C, 0, m, k, n);
}

void gemm_omp(const cdouble* A, const cdouble* B, cdouble* C, int m, int k, int n) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < m; ++i) gemm_rows(A, B, C, i, i + 1, k, n);
}

namespace {

template <bool Parallel>
void lu_solve_impl(cdouble* A, cdouble* B, int n, int nrhs) {
    std::vector<int> piv(n);
    for (int k = 0; k < n; ++k) {
        int p = k;
        double best = std::abs(A[static_cast<size_t>(k) * n + k]);
        for (int i = k + 1; i < n; ++i) {
            double v = std::abs(A[static_cast<size_t>(i) * n + k]);
            if (v > best) {
                best = v;
                p = i;
            }
        }
        if (!(best > 0.0) || !std::isfinite(best))
            throw linear_solve_error("lu_solve: negligible pivot");
        piv[k] = p;
        if (p != k) {
            for (int j = 0; j < n; ++j)
                std::swap(A[static_cast<size_t>(k) * n + j], A[static_cast<size_t>(p) * n + j]);
            for (int j = 0; j < nrhs; ++j)
                std::swap(B[static_cast<size_t>(k) * nrhs + j], B[static_cast<size_t>(p) * nrhs + j]);
        }
        cdouble pivval = A[static_cast<size_t>(k) * n + k];
        const cdouble* Ak = A + static_cast<size_t>(k) * n;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (Parallel && n - k > 64)
#endif
        for (int i = k + 1; i < n; ++i) {
            cdouble* Ai = A + static_cast<size_t>(i) * n;
            cdouble l = Ai[k] / pivval;
            Ai[k] = l;
            if (l == cdouble{}) continue;
            for (int j = k + 1; j < n; ++j) Ai[j] -= l * Ak[j];
        }
    }
    // forward substitution (L has unit diagonal)
    for (int k = 0; k < n; ++k) {
        const cdouble* Ak = A + static_cast<size_t>(k) * n;
        for (int i = k + 1; i < n; ++i) {
            cdouble l = A[static_cast<size_t>(i) * n + k];
            if (l == cdouble{}) continue;
            for (int j = 0; j < nrhs; ++j)
                B[static_cast<size_t>(i) * nrhs + j] -= l * B[static_cast<size_t>(k) * nrhs + j];
        }
        (void)Ak;
    }
    // back substitution
    for (int k = n - 1; k >= 0; --k) {
        cdouble d = A[static_cast<size_t>(k) * n + k];
        for (int j = 0; j < nrhs; ++j) B[static_cast<size_t>(k) * nrhs + j] /= d;
        for (int i = 0; i < k; ++i) {
            cdouble u = A[static_cast<size_t>(i) * n + k];
            if (u == cdouble{}) continue;
            for (int j = 0; j < nrhs; ++j)
                B[static_cast<size_t>(i) * nrhs + j] -= u * B[static_cast<size_t>(k) * nrhs + j];
        }
    }
}

}  // namespace

void lu_solve_serial(cdouble* A, cdouble* B, int n, int nrhs) {
    lu_solve_impl<false>(A, B, n, nrhs);
}

void lu_solve_omp(cdouble* A, cdouble* B, int n, int nrhs) {
    lu_solve_impl<true>(A, B, n, nrhs);
}

void convolve(const cdouble* u, const cdouble* v, cdouble* out, int N) {
#ifdef _OPENMP
    convolve_omp(u, v, out, N);
#else
    convolve_serial(u, v, out, N);
#endif
}

void gemm(const cdouble* A, const cdouble* B, cdouble* C, int m, int k, int n) {
#ifdef _OPENMP
    gemm_omp(A, B, C, m, k, n);
#else
    gemm_serial(A, B, C, m, k, n);
#endif
}

void lu_solve(cdouble* A, cdouble* B, int n, int nrhs) {
#ifdef _OPENMP
    lu_solve_omp(A, B, n, nrhs);
#else
    lu_solve_serial(A, B, n, nrhs);
#endif
}

}  // namespace kernels
}  // namespace qpc
