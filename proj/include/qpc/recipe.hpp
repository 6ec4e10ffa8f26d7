#ifndef QPC_RECIPE_HPP
#define QPC_RECIPE_HPP

#include <optional>

#include "qpc/birkhoff.hpp"
#include "qpc/fourier.hpp"
#include "qpc/solver.hpp"

namespace qpc {

struct RecipeConfig {
    MapSpec spec;
    Point2 seed;
    int period = 1;
    long M_classify = 20000;
    long M_rho = 200000;
    long M_coeff = 10000;
    double N0_fraction = 0.15;
    double initial_defect_tol = 0.05;
    double classify_tol = 1e-9;
    int N_override = 0;  // > 0: skip the decay fit and use this truncation
    int N_max = 512;
    NewtonOpts newton;
    std::optional<Point2> center;  // default: family fixed point / centroid
};

enum class RecipeStage { Classified, RhoEstimated, TruncationChosen, Guessed, Solved };

struct RecipeResult {
    RecipeStage stage = RecipeStage::Classified;
    Classification classification;
    RotationEstimate rho;       // rotation number of F (rho_d / d)
    double rho_stride = 0.0;    // rotation number of F^d on the stride orbit
    int N = 0;
    CircleSystem system;
    SolveReport report;
    PhaseCondition phase;
    Point2 center;
};

struct recipe_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct not_quasiperiodic_error : recipe_error {
    using recipe_error::recipe_error;
};

RecipeResult run_recipe(const RecipeConfig& cfg);

// Component j coefficients from the j-th phase-shifted stride-d subsequence,
// modes |n| <= N0, zero-padded to N.
CircleSystem initial_guess(const OrbitSegment& orbit, double rho, int N0, int N, int d);

}  // namespace qpc

#endif
