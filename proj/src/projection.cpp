#include "qpc/projection.hpp"

#include <cmath>

namespace qpc {

double frac(double x) {
    double f = x - std::floor(x);
    if (f >= 1.0) f = 0.0;  // guard against rounding at the seam
    return f;
}

AngleSequence project_angles(const OrbitSegment& orbit, Point2 center) {
    AngleSequence seq;
    seq.center = center;
    seq.thetas.reserve(orbit.points.size());
    const double twopi = 2.0 * std::acos(-1.0);
    for (const Point2& p : orbit.points) {
        double dx = p.x - center.x, dy = p.y - center.y;
        if (std::hypot(dx, dy) < 1e-12)
            throw degenerate_projection_error("project_angles: orbit point at the center");
        seq.thetas.push_back(frac(std::atan2(dy, dx) / twopi));
    }
    return seq;
}

double forward_diff(double theta_next, double theta_prev) {
    return frac(theta_next - theta_prev);
}

std::vector<double> diff_sequence(const AngleSequence& angles) {
    if (angles.thetas.size() < 2)
        throw std::invalid_argument("diff_sequence: need at least 2 angles");
    std::vector<double> d(angles.thetas.size() - 1);
    for (size_t n = 0; n + 1 < angles.thetas.size(); ++n)
        d[n] = forward_diff(angles.thetas[n + 1], angles.thetas[n]);
    return d;
}

}  // namespace qpc
