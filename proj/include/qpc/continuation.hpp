#ifndef QPC_CONTINUATION_HPP
#define QPC_CONTINUATION_HPP

#include <functional>
#include <utility>
#include <vector>

#include "qpc/recipe.hpp"
#include "qpc/solver.hpp"

namespace qpc {

struct ContinuationConfig {
    double initial_step = 1e-3;
    double min_step = 1e-13;
    long max_steps = 100000;
    std::vector<double> sobolev_orders = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    double blowup_factor = 1e6;
    int N_max = 512;
    NewtonOpts newton;
};

struct ContinuationRecord {
    double rho = 0.0;
    CircleSystem system;
    double defect = 0.0;
    std::vector<std::pair<double, double>> sobolev;  // (order, norm)
};

enum class StopReason { SobolevBlowup, StepUnderflow, MaxSteps, SolverHardFailure };

struct FamilyResult {
    std::vector<ContinuationRecord> records;
    StopReason stop_reason = StopReason::MaxSteps;
};

// Factory building the conjugacy problem for a candidate system; lets tests
// continue maps outside the built-in registry.
using ProblemFactory = std::function<std::unique_ptr<ConjugacyProblem>(
    const CircleSystem&, const PhaseCondition&)>;

FamilyResult continue_family(const ContinuationRecord& start,
                             const ContinuationConfig& cfg, int direction,
                             const ProblemFactory& factory,
                             std::function<void(const ContinuationRecord&)> on_record = {});

FamilyResult continue_family(const ContinuationRecord& start,
                             const ContinuationConfig& cfg, int direction,
                             const MapSpec& spec,
                             std::function<void(const ContinuationRecord&)> on_record = {});

struct restart_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Locate a periodic orbit near the last circle of a broken-down family, check
// elliptic stability, and emit a recipe configuration seeded just off the
// orbit toward the last circle.
RecipeConfig restart_next_family(const FamilyResult& last, const MapSpec& spec,
                                 Point2 guess, int period,
                                 double offset_fraction = 0.1);

}  // namespace qpc

#endif
