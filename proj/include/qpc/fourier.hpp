#ifndef QPC_FOURIER_HPP
#define QPC_FOURIER_HPP

#include <complex>
#include <functional>
#include <vector>

#include "qpc/birkhoff.hpp"
#include "qpc/maps.hpp"

namespace qpc {

// Complex coefficient sequence indexed n = -N..N, stored densely.
struct CoeffSeq {
    int N = 0;
    std::vector<cdouble> c;  // c[n+N] holds coefficient n

    CoeffSeq() = default;
    explicit CoeffSeq(int order) : N(order), c(2 * order + 1) {}

    cdouble& at(int n) { return c[n + N]; }
    const cdouble& at(int n) const { return c[n + N]; }
    int size() const { return 2 * N + 1; }
};

// Truncated Fourier series of a closed plane curve K(theta) = sum k_n e^{2pi i n theta}.
struct FourierCircle {
    int N = 0;
    CoeffSeq a;  // x component
    CoeffSeq b;  // y component

    FourierCircle() = default;
    explicit FourierCircle(int order) : N(order), a(order), b(order) {}
};

struct CircleSystem {
    int d = 1;
    double rho = 0.0;
    std::vector<FourierCircle> circles;  // d entries, common N

    int order() const { return circles.empty() ? 0 : circles[0].N; }
};

Point2 eval(const FourierCircle& K, double theta);
cdouble eval(const CoeffSeq& c, double theta);

CoeffSeq rotate(const CoeffSeq& c, double rho);
FourierCircle rotate(const FourierCircle& K, double rho);
CoeffSeq differentiate(const CoeffSeq& c);
CoeffSeq convolve(const CoeffSeq& u, const CoeffSeq& v);
CoeffSeq symmetrize(const CoeffSeq& c);
void symmetrize_inplace(FourierCircle& K);

// Max deviation from conjugate symmetry, relative to max coefficient.
double symmetry_residual(const FourierCircle& K);

CoeffSeq resize(const CoeffSeq& c, int N);
FourierCircle resize(const FourierCircle& K, int N);

int defect_grid_size(int N);

// Sup over a uniform grid of the pointwise conjugacy residual
// |F(K_j(theta)) - K_{j+1}(theta + rho)| taken over all links.
double defect(const FourierCircle& K, const MapSpec& spec, double rho);
double defect(const CircleSystem& sys, const MapSpec& spec);
double defect(const CircleSystem& sys, const std::function<Point2(Point2)>& F);

double weighted_l1_norm(const CoeffSeq& a, const CoeffSeq& b, double nu);
double sobolev_norm(const FourierCircle& K, double d);
double enclosed_area(const FourierCircle& K);

CoeffSeq dft_from_samples(const std::vector<cdouble>& samples, int N);

}  // namespace qpc

#endif
