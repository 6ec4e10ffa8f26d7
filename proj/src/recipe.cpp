#include "qpc/recipe.hpp"

#include <algorithm>
#include <cmath>

namespace qpc {

namespace {

std::vector<long> quarter_checkpoints(long M) {
    return {M / 4, M / 2, 3 * M / 4, M};
}

Point2 centroid(const std::vector<Point2>& pts, size_t count) {
    double sx = 0, sy = 0;
    size_t n = std::min(count, pts.size());
    for (size_t i = 0; i < n; ++i) {
        sx += pts[i].x;
        sy += pts[i].y;
    }
    return {sx / n, sy / n};
}

void extend_orbit(OrbitSegment& orbit, long targetM) {
    const MapSpec& spec = orbit.spec;
    Point2 p = orbit.points.back();
    long have = static_cast<long>(orbit.points.size()) - 1;
    orbit.points.reserve(targetM + 1);
    for (long j = have; j < targetM; ++j) {
        for (int s = 0; s < orbit.stride; ++s) {
            p = eval_map(spec, p);
            if (std::fabs(p.x) > 1e8 || std::fabs(p.y) > 1e8)
                throw overflow_error("extend_orbit: orbit escaped");
        }
        orbit.points.push_back(p);
    }
}

}  // namespace

CircleSystem initial_guess(const OrbitSegment& orbit, double rho, int N0, int N, int d) {
    if (orbit.stride != 1)
        throw std::invalid_argument("initial_guess: stride-1 orbit required");
    long total = static_cast<long>(orbit.points.size()) - 1;
    long Mc = total / d - 1;
    if (Mc < 2) throw std::invalid_argument("initial_guess: orbit too short");
    double rho_d = d * rho;

    CircleSystem sys;
    sys.d = d;
    sys.rho = rho;
    sys.circles.assign(d, FourierCircle(N));
    for (int j = 0; j < d; ++j) {
        OrbitSegment sub;
        sub.spec = orbit.spec;
        sub.stride = d;
        sub.points.reserve(Mc + 1);
        for (long k = 0; k <= Mc; ++k) sub.points.push_back(orbit.points[j + k * d]);
        sub.seed = sub.points[0];
        FourierCircle& K = sys.circles[j];
        for (int n = -N0; n <= N0; ++n) {
            CoefficientEstimate est = fourier_coefficient(sub, rho_d, n, j * rho);
            K.a.at(n) = est.a;
            K.b.at(n) = est.b;
        }
        symmetrize_inplace(K);
    }
    return sys;
}

RecipeResult run_recipe(const RecipeConfig& cfg) {
    RecipeResult result;
    int d = cfg.period;
    if (d < 1) throw std::invalid_argument("run_recipe: period >= 1 required");

    // Step 0: classify the stride-d orbit
    OrbitSegment strided = iterate_orbit(cfg.spec, cfg.seed, cfg.M_classify, d);
    Point2 center;
    if (cfg.center) {
        center = *cfg.center;
    } else if (d == 1) {
        center = default_center(cfg.spec);
    } else {
        center = centroid(strided.points, strided.points.size());
    }
    result.center = center;
    AngleSequence angles = project_angles(strided, center);
    result.classification =
        classify_orbit(angles, quarter_checkpoints(cfg.M_classify), cfg.classify_tol);
    result.stage = RecipeStage::Classified;
    if (result.classification.cls != OrbitClass::Quasiperiodic) return result;

    // Step 1: rotation number, extending M until successive estimates agree
    long M = cfg.M_classify;
    RotationEstimate est = result.classification.estimate;
    while (M < cfg.M_rho) {
        long Mnext = std::min(cfg.M_rho, static_cast<long>(std::ceil(M * 1.15)));
        extend_orbit(strided, Mnext);
        AngleSequence ext = project_angles(strided, center);
        RotationEstimate enew = rotation_number(ext, {Mnext});
        double agree = circle_distance(est.rho, enew.rho);
        enew.history.insert(enew.history.begin(), est.history.begin(), est.history.end());
        enew.spread = est.spread;
        est = enew;
        M = Mnext;
        if (agree <= 1e-12) break;
    }
    result.rho_stride = est.rho;
    est.rho = est.rho / d;
    result.rho = est;
    double rho = est.rho;
    result.stage = RecipeStage::RhoEstimated;

    // Step 2: truncation from coefficient decay on a short orbit
    int N;
    if (cfg.N_override > 0) {
        N = cfg.N_override;
    } else {
        OrbitSegment shortOrbit = strided;
        shortOrbit.points.resize(1001);
        std::vector<std::pair<int, double>> decay =
            sample_decay(shortOrbit, result.rho_stride, {2, 4, 6, 8, 10, 15, 20, 30});
        N = estimate_truncation(decay, 2.2e-16);
        N = std::clamp(N, 8, cfg.N_max);
    }
    result.N = N;
    result.stage = RecipeStage::TruncationChosen;

    // Step 3: initial guess, enlarging N0 until the defect is acceptable
    OrbitSegment full = iterate_orbit(cfg.spec, cfg.seed, d * cfg.M_coeff, 1);
    int N0 = std::max(2, static_cast<int>(std::ceil(cfg.N0_fraction * N)));
    CircleSystem guess;
    double gdefect = 0.0;
    bool ok = false;
    for (int attempt = 0; attempt <= 3; ++attempt) {
        guess = initial_guess(full, rho, std::min(N0, N), N, d);
        gdefect = defect(guess, cfg.spec);
        if (gdefect <= cfg.initial_defect_tol) {
            ok = true;
            break;
        }
        N0 *= 2;
    }
    if (!ok)
        throw recipe_error("run_recipe: initial guess defect " +
                           std::to_string(gdefect) + " above tolerance");
    result.system = guess;
    result.stage = RecipeStage::Guessed;

    // Step 4: Newton, one retry from a richer initial guess
    result.phase = radial_phase(cfg.seed, center);
    for (int attempt = 0; attempt < 2; ++attempt) {
        std::unique_ptr<ConjugacyProblem> problem =
            make_problem(cfg.spec, result.system, result.phase);
        result.report = newton_solve(*problem, cfg.newton);
        if (result.report.converged) {
            result.system = problem->system();
            result.stage = RecipeStage::Solved;
            return result;
        }
        if (attempt == 0) {
            N0 = std::min(2 * N0, N);
            result.system = initial_guess(full, rho, N0, N, d);
        }
    }
    throw recipe_error("run_recipe: Newton failed after retry");
}

}  // namespace qpc
