#ifndef QPC_TESTS_RIGID_HPP
#define QPC_TESTS_RIGID_HPP

// Rigid rotation by 2*pi*rho about the origin: every centered circle is
// invariant, which makes closed-form answers available for the solver and
// continuation tests.

#include <cmath>

#include "qpc/continuation.hpp"
#include "qpc/fourier.hpp"
#include "qpc/solver.hpp"

namespace qpc_tests {

inline qpc::Point2 rigid_rotation(qpc::Point2 p, double rho) {
    double c = std::cos(2.0 * M_PI * rho), s = std::sin(2.0 * M_PI * rho);
    return {c * p.x - s * p.y, s * p.x + c * p.y};
}

// Unit circle K(theta) = (cos 2 pi theta, sin 2 pi theta).
inline qpc::FourierCircle unit_circle(int N) {
    qpc::FourierCircle K(N);
    K.a.at(1) = 0.5;
    K.a.at(-1) = 0.5;
    K.b.at(1) = qpc::cdouble(0.0, -0.5);
    K.b.at(-1) = qpc::cdouble(0.0, 0.5);
    return K;
}

// Conjugacy problem for the rigid rotation: residual in coefficient space is
// linear, so Newton converges in one step from any circle-like guess.
class RigidProblem : public qpc::ConjugacyProblem {
  public:
    RigidProblem(const qpc::CircleSystem& init, const qpc::PhaseCondition& phase)
        : sys_(init), phase_(phase) {
        if (sys_.d != 1) throw std::invalid_argument("RigidProblem: d == 1 only");
    }

    int dim() const override { return 2 * sys_.order() * 2 + 2 + 1; }

    std::vector<qpc::cdouble> pack_state() const override {
        const qpc::FourierCircle& K = sys_.circles[0];
        std::vector<qpc::cdouble> v;
        v.push_back(beta_);
        for (int n = -K.N; n <= K.N; ++n) v.push_back(K.a.at(n));
        for (int n = -K.N; n <= K.N; ++n) v.push_back(K.b.at(n));
        return v;
    }

    void set_state(const std::vector<qpc::cdouble>& v) override {
        qpc::FourierCircle& K = sys_.circles[0];
        size_t i = 0;
        beta_ = v[i++].real();
        for (int n = -K.N; n <= K.N; ++n) K.a.at(n) = v[i++];
        for (int n = -K.N; n <= K.N; ++n) K.b.at(n) = v[i++];
    }

    std::vector<qpc::cdouble> residual() const override {
        const qpc::FourierCircle& K = sys_.circles[0];
        double c = std::cos(2.0 * M_PI * sys_.rho), s = std::sin(2.0 * M_PI * sys_.rho);
        qpc::CoeffSeq ra = qpc::rotate(K.a, sys_.rho);
        qpc::CoeffSeq rb = qpc::rotate(K.b, sys_.rho);
        std::vector<qpc::cdouble> r;
        double fac = 1.0 + beta_;
        for (int n = -K.N; n <= K.N; ++n)
            r.push_back(c * K.a.at(n) - s * K.b.at(n) - fac * ra.at(n));
        for (int n = -K.N; n <= K.N; ++n)
            r.push_back(s * K.a.at(n) + c * K.b.at(n) - fac * rb.at(n));
        qpc::Point2 k0 = qpc::eval(K, 0.0);
        r.push_back((phase_.pbar.x - k0.x) * phase_.eta.x +
                    (phase_.pbar.y - k0.y) * phase_.eta.y);
        return r;
    }

    std::vector<qpc::cdouble> assemble_jacobian() const override {
        // Columns ordered as pack_state: beta, a coefficients, b coefficients.
        int n1 = 2 * sys_.order() + 1;
        int D = 2 * n1 + 1;
        std::vector<qpc::cdouble> J(static_cast<size_t>(D) * D);
        const qpc::FourierCircle& K = sys_.circles[0];
        double c = std::cos(2.0 * M_PI * sys_.rho), s = std::sin(2.0 * M_PI * sys_.rho);
        double fac = 1.0 + beta_;
        qpc::CoeffSeq ra = qpc::rotate(K.a, sys_.rho);
        qpc::CoeffSeq rb = qpc::rotate(K.b, sys_.rho);
        auto at = [&](int r, int col) -> qpc::cdouble& {
            return J[static_cast<size_t>(r) * D + col];
        };
        for (int i = 0; i < n1; ++i) {
            int n = i - sys_.order();
            qpc::cdouble rot = std::exp(qpc::cdouble(0.0, 2.0 * M_PI * n * sys_.rho));
            at(i, 0) = -ra.at(n);
            at(i, 1 + i) = c - fac * rot;
            at(i, 1 + n1 + i) = -s;
            at(n1 + i, 0) = -rb.at(n);
            at(n1 + i, 1 + i) = s;
            at(n1 + i, 1 + n1 + i) = c - fac * rot;
        }
        for (int i = 0; i < n1; ++i) {
            at(2 * n1, 1 + i) = -phase_.eta.x;
            at(2 * n1, 1 + n1 + i) = -phase_.eta.y;
        }
        return J;
    }

    void apply_delta(const std::vector<qpc::cdouble>& delta) override {
        std::vector<qpc::cdouble> st = pack_state();
        for (size_t i = 0; i < st.size(); ++i) st[i] += delta[i];
        set_state(st);
    }

    void symmetrize_state() override { qpc::symmetrize_inplace(sys_.circles[0]); }

    double defect() const override {
        double rho = sys_.rho;
        return qpc::defect(sys_, [rho](qpc::Point2 p) { return rigid_rotation(p, rho); });
    }

    const qpc::CircleSystem& system() const override { return sys_; }

    qpc::UnfoldingState unfolding() const override {
        qpc::UnfoldingState u;
        u.beta = beta_;
        return u;
    }

  private:
    qpc::CircleSystem sys_;
    qpc::PhaseCondition phase_;
    double beta_ = 0.0;
};

}  // namespace qpc_tests

#endif
