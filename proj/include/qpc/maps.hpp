#ifndef QPC_MAPS_HPP
#define QPC_MAPS_HPP

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace qpc {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
double norm(Point2 p);

// Row-major 2x2 real matrix.
struct Mat2 {
    double m[2][2] = {{0, 0}, {0, 0}};
    double det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }
    double trace() const { return m[0][0] + m[1][1]; }
};

Mat2 matmul(const Mat2& a, const Mat2& b);

enum class MapFamily { HenonAP, Standard };

struct MapSpec {
    MapFamily family = MapFamily::HenonAP;
    double alpha = 0.0;
};

struct OrbitSegment {
    MapSpec spec;
    Point2 seed;
    std::vector<Point2> points;  // length M+1, points[0] == seed
    int stride = 1;
};

struct PeriodicOrbit {
    MapSpec spec;
    int period = 1;
    std::vector<Point2> points;  // length == period
    double residual = 0.0;
};

enum class StabilityClass { Elliptic, Hyperbolic, Parabolic };

struct StabilityType {
    StabilityClass cls = StabilityClass::Elliptic;
    double trace = 0.0;
    double angle = 0.0;  // rotation angle acos(trace/2), elliptic only
};

struct overflow_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct singular_jacobian_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct no_convergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Point2 eval_map(const MapSpec& spec, Point2 p);
Mat2 jacobian(const MapSpec& spec, Point2 p);
OrbitSegment iterate_orbit(const MapSpec& spec, Point2 seed, long M, int stride = 1);
PeriodicOrbit find_periodic_orbit(const MapSpec& spec, Point2 guess, int period,
                                  double tol = 1e-12, int max_iter = 50);
StabilityType stability_type(const PeriodicOrbit& orbit);

// Canonical interior point for angle projection: the elliptic fixed point of
// each family.
Point2 default_center(const MapSpec& spec);

std::string family_name(MapFamily f);
MapFamily family_from_name(const std::string& s);

}  // namespace qpc

#endif
