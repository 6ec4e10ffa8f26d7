#ifndef QPC_SOLVER_HPP
#define QPC_SOLVER_HPP

#include <memory>
#include <vector>

#include "qpc/fourier.hpp"
#include "qpc/maps.hpp"

namespace qpc {

// <pbar - K(0), eta> = 0, a line transverse to the circle pinning the phase.
struct PhaseCondition {
    Point2 pbar;
    Point2 eta;  // unit vector
};

struct UnfoldingState {
    double beta = 0.0;
    std::vector<double> gamma;  // recast solves: one per component
    std::vector<double> omega;
    double max_gamma() const;
    double max_omega() const;
};

struct SolveReport {
    bool converged = false;
    int iterations = 0;
    std::vector<double> defect_history;  // length iterations + 1
    UnfoldingState unfolding;
    double final_defect = 0.0;
    bool condition_warning = false;
};

struct NewtonOpts {
    double tol = 0.0;  // <= 0: auto, 5e-15 * (1 + coefficient scale)
    int max_iter = 20;
    double stagnation_factor = 0.5;
};

// A truncated unfolded conjugacy system in Fourier coefficient space; holds
// the current iterate. Maps register themselves by providing an
// implementation (see make_problem).
class ConjugacyProblem {
  public:
    virtual ~ConjugacyProblem() = default;

    virtual int dim() const = 0;  // complex unknowns
    virtual std::vector<cdouble> pack_state() const = 0;
    virtual void set_state(const std::vector<cdouble>& v) = 0;
    virtual std::vector<cdouble> residual() const = 0;
    // Dense row-major dim x dim matrix.
    virtual std::vector<cdouble> assemble_jacobian() const = 0;
    // Full Newton update delta with residual(state + delta) ~ 0 to first
    // order. Default: dense pivoted elimination on assemble_jacobian().
    virtual std::vector<cdouble> newton_delta() const;
    virtual void apply_delta(const std::vector<cdouble>& delta) = 0;
    // Conjugate-symmetrize sequences, drop imaginary parts of scalars.
    virtual void symmetrize_state() = 0;
    virtual double defect() const = 0;
    virtual const CircleSystem& system() const = 0;
    virtual UnfoldingState unfolding() const = 0;
};

// Hénon-type single/multiple-shooting system: unknowns (beta, a_j, b_j),
// rotation by rho on every link, (1+beta) only on the closing link.
class HenonProblem : public ConjugacyProblem {
  public:
    HenonProblem(double alpha, const CircleSystem& init, const PhaseCondition& phase);
    ~HenonProblem() override;

    int dim() const override;
    std::vector<cdouble> pack_state() const override;
    void set_state(const std::vector<cdouble>& v) override;
    std::vector<cdouble> residual() const override;
    std::vector<cdouble> assemble_jacobian() const override;
    std::vector<cdouble> newton_delta() const override;
    void apply_delta(const std::vector<cdouble>& delta) override;
    void symmetrize_state() override;
    double defect() const override;
    const CircleSystem& system() const override;
    UnfoldingState unfolding() const override;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Standard-map quadratic recast: unknowns (beta, gamma_j, omega_j, a_j, b_j,
// s_j, c_j) with S_j ~ sin(K_j1), C_j ~ cos(K_j1) as auxiliary sequences.
class RecastProblem : public ConjugacyProblem {
  public:
    RecastProblem(double alpha, const CircleSystem& init, const PhaseCondition& phase);
    ~RecastProblem() override;

    int dim() const override;
    std::vector<cdouble> pack_state() const override;
    void set_state(const std::vector<cdouble>& v) override;
    std::vector<cdouble> residual() const override;
    std::vector<cdouble> assemble_jacobian() const override;
    std::vector<cdouble> newton_delta() const override;
    void apply_delta(const std::vector<cdouble>& delta) override;
    void symmetrize_state() override;
    double defect() const override;
    const CircleSystem& system() const override;
    UnfoldingState unfolding() const override;

    const CoeffSeq& aux_s(int j) const;
    const CoeffSeq& aux_c(int j) const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

std::unique_ptr<ConjugacyProblem> make_problem(const MapSpec& spec,
                                               const CircleSystem& init,
                                               const PhaseCondition& phase);

SolveReport newton_solve(ConjugacyProblem& problem, const NewtonOpts& opts = {});

// Free-function residuals matching the problem classes.
std::vector<cdouble> residual_henon(const CircleSystem& sys, double alpha,
                                    double beta, const PhaseCondition& phase);

struct AreaDiagnostics {
    double A1 = 0.0;  // enclosed area of K
    double A2 = 0.0;  // area of rotate(K, rho)
    double A3 = 0.0;  // area of the pushforward F(K) re-fit at 2N modes
};

AreaDiagnostics unfolding_diagnostics(const FourierCircle& K, const MapSpec& spec,
                                      double rho);

// Default phase line: radial line through pbar about the given center.
PhaseCondition radial_phase(Point2 pbar, Point2 center);

}  // namespace qpc

#endif
