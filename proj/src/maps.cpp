#include "qpc/maps.hpp"

#include <cmath>

namespace qpc {

double norm(Point2 p) { return std::hypot(p.x, p.y); }

Mat2 matmul(const Mat2& a, const Mat2& b) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            r.m[i][j] = a.m[i][0] * b.m[0][j] + a.m[i][1] * b.m[1][j];
    return r;
}

Point2 eval_map(const MapSpec& spec, Point2 p) {
    Point2 out;
    switch (spec.family) {
        case MapFamily::HenonAP: {
            double ca = std::cos(spec.alpha), sa = std::sin(spec.alpha);
            double q = p.y - p.x * p.x;
            out = {p.x * ca - q * sa, p.x * sa + q * ca};
            break;
        }
        case MapFamily::Standard: {
            // Not reduced mod 2pi; the plane is the phase space here.
            double yn = p.y + spec.alpha * std::sin(p.x);
            out = {p.x + yn, yn};
            break;
        }
    }
    if (!std::isfinite(out.x) || !std::isfinite(out.y))
        throw overflow_error("eval_map: non-finite result");
    return out;
}

Mat2 jacobian(const MapSpec& spec, Point2 p) {
    Mat2 J;
    switch (spec.family) {
        case MapFamily::HenonAP: {
            double ca = std::cos(spec.alpha), sa = std::sin(spec.alpha);
            J.m[0][0] = ca + 2.0 * p.x * sa;
            J.m[0][1] = -sa;
            J.m[1][0] = sa - 2.0 * p.x * ca;
            J.m[1][1] = ca;
            break;
        }
        case MapFamily::Standard: {
            double c = spec.alpha * std::cos(p.x);
            J.m[0][0] = 1.0 + c;
            J.m[0][1] = 1.0;
            J.m[1][0] = c;
            J.m[1][1] = 1.0;
            break;
        }
    }
    return J;
}

OrbitSegment iterate_orbit(const MapSpec& spec, Point2 seed, long M, int stride) {
    if (M < 1 || stride < 1)
        throw std::invalid_argument("iterate_orbit: M and stride must be >= 1");
    OrbitSegment orbit;
    orbit.spec = spec;
    orbit.seed = seed;
    orbit.stride = stride;
    orbit.points.reserve(static_cast<size_t>(M) + 1);
    orbit.points.push_back(seed);
    Point2 p = seed;
    for (long j = 0; j < M; ++j) {
        for (int s = 0; s < stride; ++s) {
            p = eval_map(spec, p);
            if (std::fabs(p.x) > 1e8 || std::fabs(p.y) > 1e8)
                throw overflow_error("iterate_orbit: orbit escaped |x|,|y| > 1e8");
        }
        orbit.points.push_back(p);
    }
    return orbit;
}

PeriodicOrbit find_periodic_orbit(const MapSpec& spec, Point2 guess, int period,
                                  double tol, int max_iter) {
    if (period < 1 || tol <= 0)
        throw std::invalid_argument("find_periodic_orbit: bad period or tol");
    Point2 p = guess;
    for (int it = 0; it < max_iter; ++it) {
        // G(p) = F^period(p) - p, DG = prod DF - I
        Point2 q = p;
        Mat2 DG{{ {1, 0}, {0, 1} }};
        for (int k = 0; k < period; ++k) {
            DG = matmul(jacobian(spec, q), DG);
            q = eval_map(spec, q);
        }
        Point2 g = q - p;
        double res = norm(g);
        if (res <= tol) {
            PeriodicOrbit orbit;
            orbit.spec = spec;
            orbit.period = period;
            orbit.points.reserve(period);
            Point2 r = p;
            for (int k = 0; k < period; ++k) {
                orbit.points.push_back(r);
                r = eval_map(spec, r);
            }
            orbit.residual = res;
            return orbit;
        }
        DG.m[0][0] -= 1.0;
        DG.m[1][1] -= 1.0;
        double det = DG.det();
        if (std::fabs(det) < 1e-14)
            throw singular_jacobian_error("find_periodic_orbit: I - DF^period is singular");
        double dx = (DG.m[0][1] * g.y - DG.m[1][1] * g.x) / det;
        double dy = (DG.m[1][0] * g.x - DG.m[0][0] * g.y) / det;
        // cap the step: near-parabolic points make the first steps wild
        double len = std::sqrt(dx * dx + dy * dy);
        const double cap = 0.25;
        if (len > cap) {
            dx *= cap / len;
            dy *= cap / len;
        }
        p = {p.x + dx, p.y + dy};
    }
    throw no_convergence_error("find_periodic_orbit: no convergence");
}

StabilityType stability_type(const PeriodicOrbit& orbit) {
    Mat2 mono{{ {1, 0}, {0, 1} }};
    for (const Point2& p : orbit.points)
        mono = matmul(jacobian(orbit.spec, p), mono);
    StabilityType st;
    st.trace = mono.trace();
    double t = st.trace;
    if (std::fabs(t - 2.0) <= 1e-10 || std::fabs(t + 2.0) <= 1e-10) {
        st.cls = StabilityClass::Parabolic;
    } else if (std::fabs(t) < 2.0) {
        st.cls = StabilityClass::Elliptic;
        st.angle = std::acos(t / 2.0);
    } else {
        st.cls = StabilityClass::Hyperbolic;
    }
    return st;
}

Point2 default_center(const MapSpec& spec) {
    switch (spec.family) {
        case MapFamily::HenonAP:
            return {0.0, 0.0};
        case MapFamily::Standard:
            return {std::acos(-1.0), 0.0};
    }
    return {0.0, 0.0};
}

std::string family_name(MapFamily f) {
    return f == MapFamily::HenonAP ? "henon" : "standard";
}

MapFamily family_from_name(const std::string& s) {
    if (s == "henon") return MapFamily::HenonAP;
    if (s == "standard") return MapFamily::Standard;
    throw std::invalid_argument("unknown map family: " + s);
}

}  // namespace qpc
