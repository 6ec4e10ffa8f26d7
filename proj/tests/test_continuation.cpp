#include <cmath>

#include "doctest.h"
#include "qpc/continuation.hpp"
#include "rigid.hpp"

using namespace qpc;
using qpc_tests::RigidProblem;
using qpc_tests::unit_circle;

namespace {

const double kAlphaHenon = std::acos(0.24);

ContinuationRecord rigid_start(double rho, int N) {
    ContinuationRecord start;
    start.rho = rho;
    start.system.d = 1;
    start.system.rho = rho;
    start.system.circles = {unit_circle(N)};
    return start;
}

ProblemFactory rigid_factory() {
    return [](const CircleSystem& sys, const PhaseCondition& phase) {
        return std::unique_ptr<ConjugacyProblem>(new RigidProblem(sys, phase));
    };
}

}  // namespace

TEST_CASE("rigid rotation continues for every step") {
    ContinuationConfig cfg;
    cfg.initial_step = 1e-2;
    cfg.max_steps = 40;
    FamilyResult fam =
        continue_family(rigid_start(std::sqrt(2.0) - 1.0, 6), cfg, 1, rigid_factory());
    CHECK(fam.stop_reason == StopReason::MaxSteps);
    CHECK(fam.records.size() == 41);
    for (size_t k = 1; k < fam.records.size(); ++k) {
        CHECK(fam.records[k].defect < 1e-12);
        CHECK(std::fabs(fam.records[k].rho -
                        (fam.records[0].rho + k * cfg.initial_step)) < 1e-12);
    }
}

TEST_CASE("step below min_step stops immediately") {
    ContinuationConfig cfg;
    cfg.initial_step = 1e-14;
    cfg.min_step = 1e-13;
    FamilyResult fam =
        continue_family(rigid_start(std::sqrt(2.0) - 1.0, 4), cfg, 1, rigid_factory());
    CHECK(fam.stop_reason == StopReason::StepUnderflow);
    CHECK(fam.records.size() == 1);
}

TEST_CASE("direction must be a sign") {
    ContinuationConfig cfg;
    CHECK_THROWS_AS(
        continue_family(rigid_start(0.4, 4), cfg, 2, rigid_factory()),
        std::invalid_argument);
}

TEST_CASE("records carry sobolev norms for every configured order") {
    ContinuationConfig cfg;
    cfg.initial_step = 1e-2;
    cfg.max_steps = 3;
    cfg.sobolev_orders = {1, 3, 5};
    FamilyResult fam =
        continue_family(rigid_start(std::sqrt(2.0) - 1.0, 4), cfg, -1, rigid_factory());
    for (const ContinuationRecord& rec : fam.records) {
        REQUIRE(rec.sobolev.size() == 3);
        CHECK(rec.sobolev[0].first == 1);
        CHECK(rec.sobolev[1].first == 3);
        CHECK(rec.sobolev[2].first == 5);
        for (auto& [order, norm] : rec.sobolev) CHECK(norm > 0.0);
    }
}

TEST_CASE("restart_next_family refuses a hyperbolic orbit") {
    FamilyResult fam;
    ContinuationRecord rec;
    rec.system.d = 1;
    rec.system.rho = 0.4;
    rec.system.circles = {unit_circle(4)};
    fam.records.push_back(rec);
    // (0,0) is hyperbolic for the standard map
    MapSpec std_map{MapFamily::Standard, std::acos(-1.0) / 4};
    CHECK_THROWS_AS(restart_next_family(fam, std_map, {0.01, 0.01}, 1),
                    restart_error);
}

TEST_CASE("restart_next_family emits a quasiperiodic seed near an elliptic orbit") {
    // family around the henon origin; restart targets the period-5 island chain
    FamilyResult fam;
    ContinuationRecord rec;
    rec.system.d = 1;
    rec.system.rho = 0.2;
    FourierCircle K = unit_circle(4);
    for (int n = -4; n <= 4; ++n) {
        K.a.at(n) *= 0.5;  // circle of radius 0.5 about the origin
        K.b.at(n) *= 0.5;
    }
    rec.system.circles = {K};
    fam.records.push_back(rec);

    MapSpec henon{MapFamily::HenonAP, kAlphaHenon};
    RecipeConfig cfg = restart_next_family(fam, henon, {0.6, -0.12}, 5, 0.1);
    CHECK(cfg.period == 5);

    OrbitSegment strided = iterate_orbit(henon, cfg.seed, 20000, 5);
    double sx = 0, sy = 0;
    for (const Point2& p : strided.points) {
        sx += p.x;
        sy += p.y;
    }
    Point2 center{sx / strided.points.size(), sy / strided.points.size()};
    Classification cls = classify_orbit(project_angles(strided, center),
                                        {5000, 10000, 20000}, 1e-9);
    CHECK(cls.cls == OrbitClass::Quasiperiodic);
}

TEST_CASE("henon family from the reference seed grows its sobolev norms") {
    // short run: few records suffice to observe monotone growth and a stop
    RecipeConfig rcfg;
    rcfg.spec = {MapFamily::HenonAP, std::acos(-0.95)};
    rcfg.seed = {0.0, 0.1};
    RecipeResult start = run_recipe(rcfg);
    REQUIRE(start.report.converged);
    CHECK(std::fabs((1.0 - start.rho.rho) - 0.550640092644521) < 1e-9);

    ContinuationRecord rec;
    rec.rho = start.system.rho;
    rec.system = start.system;
    rec.defect = start.report.final_defect;

    ContinuationConfig cfg;
    cfg.max_steps = 25;
    FamilyResult fam = continue_family(rec, cfg, -1, rcfg.spec);
    REQUIRE(fam.records.size() >= 10);
    const std::vector<ContinuationRecord>& r = fam.records;
    for (size_t k = 0; k < r.size(); ++k) {
        CHECK(r[k].defect < 1e-9);
    }
    // order-1 norm grows along the family
    CHECK(r.back().sobolev[0].second > r.front().sobolev[0].second);
}
