#include "qpc/birkhoff.hpp"

#include <algorithm>
#include <cmath>

namespace qpc {

namespace {

// Compensated accumulator (Kahan-Neumaier).
struct Kahan {
    double sum = 0.0, comp = 0.0;
    void add(double v) {
        double t = sum + v;
        if (std::fabs(sum) >= std::fabs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    double total() const { return sum + comp; }
};

const double kTwoPi = 2.0 * std::acos(-1.0);

}  // namespace

double circle_distance(double a, double b) {
    double d = std::fabs(frac(a) - frac(b));
    return std::min(d, 1.0 - d);
}

WeightVector make_weights(long N) {
    if (N < 2) throw std::invalid_argument("make_weights: N >= 2 required");
    WeightVector wv;
    wv.N = N;
    wv.weights.resize(N);
    Kahan z;
    for (long n = 1; n < N; ++n) {
        double t = static_cast<double>(n) / static_cast<double>(N);
        double w = std::exp(-1.0 / (t * (1.0 - t)));
        wv.weights[n] = w;
        z.add(w);
    }
    wv.weights[0] = 0.0;  // w(0) = w(1) = 0 by continuous extension
    double Z = z.total();
    for (double& w : wv.weights) w /= Z;
    return wv;
}

double weighted_average(const std::vector<double>& values, const WeightVector& w) {
    if (static_cast<long>(values.size()) != w.N)
        throw std::invalid_argument("weighted_average: length mismatch");
    Kahan acc;
    for (long n = 0; n < w.N; ++n) acc.add(w.weights[n] * values[n]);
    return acc.total();
}

cdouble weighted_average(const std::vector<cdouble>& values, const WeightVector& w) {
    if (static_cast<long>(values.size()) != w.N)
        throw std::invalid_argument("weighted_average: length mismatch");
    Kahan re, im;
    for (long n = 0; n < w.N; ++n) {
        re.add(w.weights[n] * values[n].real());
        im.add(w.weights[n] * values[n].imag());
    }
    return {re.total(), im.total()};
}

RotationEstimate rotation_number(const AngleSequence& angles,
                                 const std::vector<long>& checkpoints) {
    if (checkpoints.empty())
        throw std::invalid_argument("rotation_number: no checkpoints");
    long maxM = checkpoints.back();
    if (maxM > static_cast<long>(angles.thetas.size()) - 1)
        throw std::invalid_argument("rotation_number: checkpoint exceeds data");
    std::vector<double> diffs = diff_sequence(angles);

    RotationEstimate est;
    for (long M : checkpoints) {
        WeightVector w = make_weights(M);
        Kahan acc;
        for (long n = 0; n < M; ++n) acc.add(w.weights[n] * diffs[n]);
        est.history.emplace_back(M, frac(acc.total()));
    }
    est.M = maxM;
    est.rho = est.history.back().second;

    size_t k = std::min<size_t>(3, est.history.size());
    double spread = 0.0;
    for (size_t i = est.history.size() - k; i < est.history.size(); ++i)
        for (size_t j = i + 1; j < est.history.size(); ++j)
            spread = std::max(spread, circle_distance(est.history[i].second,
                                                      est.history[j].second));
    est.spread = spread;
    return est;
}

Classification classify_orbit(const AngleSequence& angles,
                              const std::vector<long>& checkpoints, double tol) {
    if (checkpoints.size() < 3)
        throw std::invalid_argument("classify_orbit: need >= 3 checkpoints");
    Classification cls;
    cls.estimate = rotation_number(angles, checkpoints);
    cls.cls = cls.estimate.spread <= tol ? OrbitClass::Quasiperiodic
                                         : OrbitClass::NonConvergent;
    return cls;
}

CoefficientEstimate fourier_coefficient(const OrbitSegment& orbit, double rho,
                                        int n, double theta0) {
    long M = static_cast<long>(orbit.points.size()) - 1;
    if (M < 1) throw std::invalid_argument("fourier_coefficient: orbit too short");
    WeightVector w = make_weights(M);
    Kahan are, aim, bre, bim;
    double u = 0.0;  // frac(k * rho), accumulated to avoid large arguments
    for (long k = 0; k < M; ++k) {
        double ang = -kTwoPi * n * u;
        double cs = std::cos(ang), sn = std::sin(ang);
        double wk = w.weights[k];
        const Point2& p = orbit.points[k];
        are.add(wk * p.x * cs);
        aim.add(wk * p.x * sn);
        bre.add(wk * p.y * cs);
        bim.add(wk * p.y * sn);
        u = frac(u + rho);
    }
    CoefficientEstimate est;
    est.n = n;
    est.M = M;
    cdouble phase = std::polar(1.0, -kTwoPi * n * theta0);
    est.a = phase * cdouble{are.total(), aim.total()};
    est.b = phase * cdouble{bre.total(), bim.total()};
    return est;
}

std::vector<std::pair<int, double>> sample_decay(const OrbitSegment& orbit,
                                                 double rho,
                                                 const std::vector<int>& modes) {
    std::vector<std::pair<int, double>> out;
    out.reserve(modes.size());
    for (int n : modes) {
        CoefficientEstimate est = fourier_coefficient(orbit, rho, n);
        out.emplace_back(n, std::max(std::abs(est.a), std::abs(est.b)));
    }
    return out;
}

int estimate_truncation(const std::vector<std::pair<int, double>>& decay,
                        double eps) {
    // least-squares fit log(norm) = c - lambda * n over samples above eps
    double sn = 0, sl = 0, snn = 0, snl = 0;
    long cnt = 0;
    for (auto [n, norm] : decay) {
        if (norm <= eps) continue;
        double l = std::log(norm);
        sn += n;
        sl += l;
        snn += double(n) * n;
        snl += double(n) * l;
        ++cnt;
    }
    if (cnt < 2)
        throw decay_fit_error("estimate_truncation: fewer than 2 usable samples");
    double denom = cnt * snn - sn * sn;
    double slope = (cnt * snl - sn * sl) / denom;
    double c = (sl - slope * sn) / cnt;
    double lambda = -slope;
    if (lambda <= 0)
        throw decay_fit_error("estimate_truncation: coefficients do not decay");
    double nstar = (c - std::log(eps)) / lambda;
    int N = 2;
    while (N < nstar) N *= 2;
    return N;
}

}  // namespace qpc
