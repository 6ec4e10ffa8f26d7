#include "qpc/fourier.hpp"

#include <algorithm>
#include <cmath>

#include "qpc/kernels.hpp"
#include "qpc/projection.hpp"

namespace qpc {

namespace {
const double kTwoPi = 2.0 * std::acos(-1.0);
}

cdouble eval(const CoeffSeq& c, double theta) {
    // incremental phasor, renormalized periodically to kill drift
    cdouble e = std::polar(1.0, kTwoPi * frac(theta));
    cdouble acc = c.at(0);
    cdouble ep = 1.0;
    for (int n = 1; n <= c.N; ++n) {
        ep = (n % 64 == 0) ? std::polar(1.0, kTwoPi * frac(n * frac(theta))) : ep * e;
        acc += c.at(n) * ep + c.at(-n) * std::conj(ep);
    }
    return acc;
}

Point2 eval(const FourierCircle& K, double theta) {
    return {eval(K.a, theta).real(), eval(K.b, theta).real()};
}

CoeffSeq rotate(const CoeffSeq& c, double rho) {
    CoeffSeq out(c.N);
    for (int n = -c.N; n <= c.N; ++n)
        out.at(n) = c.at(n) * std::polar(1.0, kTwoPi * frac(n * rho));
    return out;
}

FourierCircle rotate(const FourierCircle& K, double rho) {
    FourierCircle out(K.N);
    out.a = rotate(K.a, rho);
    out.b = rotate(K.b, rho);
    return out;
}

CoeffSeq differentiate(const CoeffSeq& c) {
    CoeffSeq out(c.N);
    for (int n = -c.N; n <= c.N; ++n)
        out.at(n) = cdouble{0.0, kTwoPi * n} * c.at(n);
    return out;
}

CoeffSeq convolve(const CoeffSeq& u, const CoeffSeq& v) {
    if (u.N != v.N) throw std::invalid_argument("convolve: order mismatch");
    CoeffSeq out(u.N);
    kernels::convolve(u.c.data(), v.c.data(), out.c.data(), u.N);
    return out;
}

CoeffSeq symmetrize(const CoeffSeq& c) {
    CoeffSeq out(c.N);
    for (int n = -c.N; n <= c.N; ++n)
        out.at(n) = 0.5 * (c.at(n) + std::conj(c.at(-n)));
    return out;
}

void symmetrize_inplace(FourierCircle& K) {
    K.a = symmetrize(K.a);
    K.b = symmetrize(K.b);
}

double symmetry_residual(const FourierCircle& K) {
    double scale = 0.0, res = 0.0;
    for (int n = -K.N; n <= K.N; ++n) {
        scale = std::max({scale, std::abs(K.a.at(n)), std::abs(K.b.at(n))});
        res = std::max({res, std::abs(K.a.at(n) - std::conj(K.a.at(-n))),
                        std::abs(K.b.at(n) - std::conj(K.b.at(-n)))});
    }
    return scale > 0 ? res / scale : 0.0;
}

CoeffSeq resize(const CoeffSeq& c, int N) {
    CoeffSeq out(N);
    int keep = std::min(N, c.N);
    for (int n = -keep; n <= keep; ++n) out.at(n) = c.at(n);
    return out;
}

FourierCircle resize(const FourierCircle& K, int N) {
    FourierCircle out(N);
    out.a = resize(K.a, N);
    out.b = resize(K.b, N);
    return out;
}

int defect_grid_size(int N) { return std::max(1024, 8 * (2 * N + 1)); }

double defect(const CircleSystem& sys, const std::function<Point2(Point2)>& F) {
    int d = sys.d;
    int G = defect_grid_size(sys.order());
    double rho = sys.rho;
    double worst = 0.0;
    for (int j = 0; j < d; ++j) {
        const FourierCircle& K = sys.circles[j];
        const FourierCircle& Kn = sys.circles[(j + 1) % d];
        double local = 0.0;
#ifdef _OPENMP
#pragma omp parallel for reduction(max : local) schedule(static)
#endif
        for (int g = 0; g < G; ++g) {
            double theta = static_cast<double>(g) / G;
            Point2 fk = F(eval(K, theta));
            Point2 next = eval(Kn, theta + rho);
            local = std::max(local, std::max(std::fabs(fk.x - next.x),
                                             std::fabs(fk.y - next.y)));
        }
        worst = std::max(worst, local);
    }
    return worst;
}

double defect(const CircleSystem& sys, const MapSpec& spec) {
    return defect(sys, [&spec](Point2 p) { return eval_map(spec, p); });
}

double defect(const FourierCircle& K, const MapSpec& spec, double rho) {
    CircleSystem sys;
    sys.d = 1;
    sys.rho = rho;
    sys.circles = {K};
    return defect(sys, spec);
}

double weighted_l1_norm(const CoeffSeq& a, const CoeffSeq& b, double nu) {
    if (a.N != b.N) throw std::invalid_argument("weighted_l1_norm: order mismatch");
    if (nu < 1.0) throw std::invalid_argument("weighted_l1_norm: nu >= 1 required");
    double sum = 0.0;
    for (int n = -a.N; n <= a.N; ++n)
        sum += std::max(std::abs(a.at(n)), std::abs(b.at(n))) * std::pow(nu, std::abs(n));
    return sum;
}

double sobolev_norm(const FourierCircle& K, double d) {
    if (d < 0) throw std::invalid_argument("sobolev_norm: d >= 0 required");
    double base = 1.0 + d * d;
    double sum = 0.0;
    for (int n = -K.N; n <= K.N; ++n) {
        double m = std::max(std::abs(K.a.at(n)), std::abs(K.b.at(n)));
        sum += std::pow(base, std::abs(n)) * m * m;
    }
    return std::sqrt(sum);
}

double enclosed_area(const FourierCircle& K) {
    cdouble sum = 0.0;
    for (int n = -K.N; n <= K.N; ++n) {
        cdouble in = cdouble{0.0, kTwoPi * n};
        sum += in * (K.a.at(-n) * K.b.at(n) - K.b.at(-n) * K.a.at(n));
    }
    return 0.5 * sum.real();
}

CoeffSeq dft_from_samples(const std::vector<cdouble>& samples, int N) {
    int G = static_cast<int>(samples.size());
    if (G < 2 * (2 * N + 1))
        throw std::invalid_argument("dft_from_samples: need >= 2(2N+1) samples");
    CoeffSeq out(N);
    for (int n = -N; n <= N; ++n) {
        cdouble e = std::polar(1.0, -kTwoPi * n / G);
        cdouble ph = 1.0, acc = 0.0;
        for (int g = 0; g < G; ++g) {
            if (g % 256 == 0)
                ph = std::polar(1.0, -kTwoPi * frac(static_cast<double>(n) * g / G));
            acc += samples[g] * ph;
            ph *= e;
        }
        out.at(n) = acc / static_cast<double>(G);
    }
    return out;
}

}  // namespace qpc
