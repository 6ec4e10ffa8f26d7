#ifndef QPC_BIRKHOFF_HPP
#define QPC_BIRKHOFF_HPP

#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qpc/maps.hpp"
#include "qpc/projection.hpp"

namespace qpc {

using cdouble = std::complex<double>;

// Exponential bump weights w(t) = exp(-1/(t(1-t))), normalized.
struct WeightVector {
    long N = 0;
    std::vector<double> weights;  // w_hat_{0,N} .. w_hat_{N-1,N}
};

struct RotationEstimate {
    double rho = 0.0;  // estimate at the largest checkpoint
    long M = 0;
    std::vector<std::pair<long, double>> history;
    double spread = 0.0;  // max pairwise circle distance, last min(3,K) entries
};

enum class OrbitClass { Quasiperiodic, NonConvergent };

struct Classification {
    OrbitClass cls = OrbitClass::Quasiperiodic;
    RotationEstimate estimate;
};

struct CoefficientEstimate {
    int n = 0;
    cdouble a;  // first component
    cdouble b;  // second component
    long M = 0;
};

struct decay_fit_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// distance on the circle R/Z
double circle_distance(double a, double b);

WeightVector make_weights(long N);

double weighted_average(const std::vector<double>& values, const WeightVector& w);
cdouble weighted_average(const std::vector<cdouble>& values, const WeightVector& w);

RotationEstimate rotation_number(const AngleSequence& angles,
                                 const std::vector<long>& checkpoints);

Classification classify_orbit(const AngleSequence& angles,
                              const std::vector<long>& checkpoints,
                              double tol = 1e-9);

CoefficientEstimate fourier_coefficient(const OrbitSegment& orbit, double rho,
                                        int n, double theta0 = 0.0);

std::vector<std::pair<int, double>> sample_decay(const OrbitSegment& orbit,
                                                 double rho,
                                                 const std::vector<int>& modes);

// Least-squares fit of log(norm) = c - lambda*n; returns smallest power of two
// >= (c - log eps)/lambda.
int estimate_truncation(const std::vector<std::pair<int, double>>& decay,
                        double eps);

}  // namespace qpc

#endif
