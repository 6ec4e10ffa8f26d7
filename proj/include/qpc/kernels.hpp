#ifndef QPC_KERNELS_HPP
#define QPC_KERNELS_HPP

#include <complex>
#include <stdexcept>
#include <vector>

namespace qpc {
namespace kernels {

using cdouble = std::complex<double>;

struct linear_solve_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Truncated convolution of sequences indexed -N..N (arrays of length 2N+1):
// out_n = sum_{k1+k2=n, |k1|,|k2|<=N} u_{k1} v_{k2}, modes beyond N dropped.
void convolve_serial(const cdouble* u, const cdouble* v, cdouble* out, int N);
void convolve_omp(const cdouble* u, const cdouble* v, cdouble* out, int N);

// C = A*B, row-major dense, A is m x k, B is k x n.
void gemm_serial(const cdouble* A, const cdouble* B, cdouble* C, int m, int k, int n);
void gemm_omp(const cdouble* A, const cdouble* B, cdouble* C, int m, int k, int n);

// Solve A X = B in place: A (n x n, destroyed), B (n x nrhs, overwritten by X).
// Partial-pivoted LU. Throws linear_solve_error on a negligible pivot.
void lu_solve_serial(cdouble* A, cdouble* B, int n, int nrhs);
void lu_solve_omp(cdouble* A, cdouble* B, int n, int nrhs);

// Default entry points used by the solver; pick the OpenMP kernels when
// compiled with OpenMP, the serial reference otherwise.
void convolve(const cdouble* u, const cdouble* v, cdouble* out, int N);
void gemm(const cdouble* A, const cdouble* B, cdouble* C, int m, int k, int n);
void lu_solve(cdouble* A, cdouble* B, int n, int nrhs);

}  // namespace kernels
}  // namespace qpc

#endif
