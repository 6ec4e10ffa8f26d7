#include "qpc/continuation.hpp"

#include <algorithm>
#include <cmath>

namespace qpc {

namespace {

// Coefficients at the machine-noise floor carry no information about the
// circle but get amplified astronomically by the (1+d^2)^|n| weight, so the
// monitor drops them before measuring.
FourierCircle denoise(const FourierCircle& K, double rel_floor) {
    double scale = 0.0;
    int N = K.N;
    for (int n = -N; n <= N; ++n)
        scale = std::max({scale, std::abs(K.a.at(n)), std::abs(K.b.at(n))});
    double floor = rel_floor * scale;
    FourierCircle out = K;
    for (int n = -N; n <= N; ++n) {
        if (std::max(std::abs(K.a.at(n)), std::abs(K.b.at(n))) < floor) {
            out.a.at(n) = 0.0;
            out.b.at(n) = 0.0;
        }
    }
    return out;
}

struct SobolevMeasurement {
    std::vector<std::pair<double, double>> norms;  // (order, norm)
    // A norm is trusted for the stop decision only when it barely moves as the
    // noise floor varies; otherwise it is dominated by coefficients at the
    // floor and the (1+d^2)^|n| weight turns measurement noise into blowup.
    std::vector<bool> reliable;
};

SobolevMeasurement measure_sobolev(const CircleSystem& sys,
                                   const std::vector<double>& orders) {
    std::vector<FourierCircle> lo, hi;
    lo.reserve(sys.circles.size());
    hi.reserve(sys.circles.size());
    for (const FourierCircle& K : sys.circles) {
        lo.push_back(denoise(K, 1e-13));
        hi.push_back(denoise(K, 1e-11));
    }
    SobolevMeasurement out;
    for (double d : orders) {
        double worst_lo = 0.0, worst_hi = 0.0;
        for (size_t j = 0; j < lo.size(); ++j) {
            worst_lo = std::max(worst_lo, sobolev_norm(lo[j], d));
            worst_hi = std::max(worst_hi, sobolev_norm(hi[j], d));
        }
        out.norms.emplace_back(d, worst_lo);
        out.reliable.push_back(std::isfinite(worst_lo) && worst_lo <= 2.0 * worst_hi);
    }
    return out;
}

PhaseCondition anchor_phase(const CircleSystem& sys) {
    const FourierCircle& K = sys.circles[0];
    Point2 k0 = eval(K, 0.0);
    Point2 center{K.a.at(0).real(), K.b.at(0).real()};
    return radial_phase(k0, center);
}

CircleSystem resize_system(const CircleSystem& sys, int N) {
    CircleSystem out = sys;
    for (FourierCircle& K : out.circles) K = resize(K, N);
    return out;
}

}  // namespace

FamilyResult continue_family(const ContinuationRecord& start,
                             const ContinuationConfig& cfg, int direction,
                             const ProblemFactory& factory,
                             std::function<void(const ContinuationRecord&)> on_record) {
    if (direction != 1 && direction != -1)
        throw std::invalid_argument("continue_family: direction must be +-1");
    FamilyResult fam;
    ContinuationRecord first = start;
    SobolevMeasurement base = measure_sobolev(first.system, cfg.sobolev_orders);
    if (first.sobolev.empty()) first.sobolev = base.norms;
    fam.records.push_back(first);
    if (on_record) on_record(fam.records.back());

    double step = cfg.initial_step;
    if (step < cfg.min_step) {
        fam.stop_reason = StopReason::StepUnderflow;
        return fam;
    }
    CircleSystem current = first.system;
    int N = current.order();
    int consecutive_failures = 0;

    while (static_cast<long>(fam.records.size()) <= cfg.max_steps) {
        double rho_next = current.rho + direction * step;
        CircleSystem guess = resize_system(current, N);
        guess.rho = rho_next;
        PhaseCondition phase = anchor_phase(current);

        bool success = false;
        ContinuationRecord rec;
        SobolevMeasurement meas;
        try {
            std::unique_ptr<ConjugacyProblem> problem = factory(guess, phase);
            SolveReport report = newton_solve(*problem, cfg.newton);
            if (report.converged) {
                rec.rho = rho_next;
                rec.system = problem->system();
                rec.defect = report.final_defect;
                meas = measure_sobolev(rec.system, cfg.sobolev_orders);
                rec.sobolev = meas.norms;
                success = true;
            }
        } catch (const std::exception&) {
            success = false;
        }

        if (success) {
            consecutive_failures = 0;
            current = rec.system;
            fam.records.push_back(rec);
            if (on_record) on_record(fam.records.back());
            for (size_t i = 0; i < meas.norms.size(); ++i) {
                if (base.reliable[i] && meas.reliable[i] &&
                    base.norms[i].second > 0 &&
                    meas.norms[i].second >
                        cfg.blowup_factor * base.norms[i].second) {
                    fam.stop_reason = StopReason::SobolevBlowup;
                    return fam;
                }
            }
        } else {
            ++consecutive_failures;
            step *= 0.5;
            if (consecutive_failures % 2 == 0 && N < cfg.N_max)
                N = std::min(2 * N, cfg.N_max);
            if (step < cfg.min_step) {
                fam.stop_reason = StopReason::StepUnderflow;
                return fam;
            }
        }
    }
    fam.stop_reason = StopReason::MaxSteps;
    return fam;
}

FamilyResult continue_family(const ContinuationRecord& start,
                             const ContinuationConfig& cfg, int direction,
                             const MapSpec& spec,
                             std::function<void(const ContinuationRecord&)> on_record) {
    ProblemFactory factory = [spec](const CircleSystem& sys,
                                    const PhaseCondition& phase) {
        return make_problem(spec, sys, phase);
    };
    return continue_family(start, cfg, direction, factory, std::move(on_record));
}

RecipeConfig restart_next_family(const FamilyResult& last, const MapSpec& spec,
                                 Point2 guess, int period, double offset_fraction) {
    if (last.records.empty())
        throw restart_error("restart_next_family: empty family");
    PeriodicOrbit orbit = find_periodic_orbit(spec, guess, period, 1e-12);
    StabilityType st = stability_type(orbit);
    if (st.cls != StabilityClass::Elliptic)
        throw restart_error("restart_next_family: periodic orbit is not elliptic");

    // nearest point of the last circle to the periodic point
    const FourierCircle& K = last.records.back().system.circles[0];
    Point2 p0 = orbit.points[0];
    Point2 nearest = eval(K, 0.0);
    double best = norm(nearest - p0);
    for (int g = 1; g < 1024; ++g) {
        Point2 q = eval(K, g / 1024.0);
        double dist = norm(q - p0);
        if (dist < best) {
            best = dist;
            nearest = q;
        }
    }
    RecipeConfig cfg;
    cfg.spec = spec;
    cfg.period = period;
    cfg.seed = p0 + offset_fraction * (nearest - p0);
    return cfg;
}

}  // namespace qpc
