#ifndef QPC_PROJECTION_HPP
#define QPC_PROJECTION_HPP

#include <stdexcept>
#include <vector>

#include "qpc/maps.hpp"

namespace qpc {

struct AngleSequence {
    Point2 center;
    std::vector<double> thetas;  // each in [0,1)
};

struct degenerate_projection_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// frac(x) in [0,1)
double frac(double x);

AngleSequence project_angles(const OrbitSegment& orbit, Point2 center);

// Forward angular increment frac(theta_next - theta_prev) in [0,1).
double forward_diff(double theta_next, double theta_prev);

std::vector<double> diff_sequence(const AngleSequence& angles);

}  // namespace qpc

#endif
