#include "qpc/solver.hpp"

#include <algorithm>
#include <cmath>

#include "qpc/kernels.hpp"
#include "qpc/projection.hpp"

namespace qpc {

namespace {

const double kTwoPi = 2.0 * std::acos(-1.0);

using Vec = std::vector<cdouble>;

// dense row-major square/rect helper
struct Dense {
    int rows = 0, cols = 0;
    Vec v;
    Dense() = default;
    Dense(int r, int c) : rows(r), cols(c), v(static_cast<size_t>(r) * c) {}
    cdouble& at(int r, int c) { return v[static_cast<size_t>(r) * cols + c]; }
    const cdouble& at(int r, int c) const { return v[static_cast<size_t>(r) * cols + c]; }
};

Vec rotation_diag(int N, double rho) {
    Vec r(2 * N + 1);
    for (int n = -N; n <= N; ++n)
        r[n + N] = std::polar(1.0, kTwoPi * frac(n * rho));
    return r;
}

// Toeplitz operator of u acting as truncated convolution: T(u)[n,k] = u_{n-k}.
void fill_toeplitz(Dense& J, int r0, int c0, const CoeffSeq& u, cdouble scale) {
    int N = u.N;
    for (int n = -N; n <= N; ++n) {
        int lo = std::max(-N, n - N), hi = std::min(N, n + N);
        for (int k = lo; k <= hi; ++k)
            J.at(r0 + n + N, c0 + k + N) += scale * u.at(n - k);
    }
}

cdouble coeff_sum(const CoeffSeq& c) {
    cdouble s = 0.0;
    for (const cdouble& x : c.c) s += x;
    return s;
}

double max_coeff(const CircleSystem& sys) {
    double m = 0.0;
    for (const FourierCircle& K : sys.circles)
        for (int n = -K.N; n <= K.N; ++n)
            m = std::max({m, std::abs(K.a.at(n)), std::abs(K.b.at(n))});
    return m;
}

Vec solve_dense(Dense A, Vec b) {
    kernels::lu_solve(A.v.data(), b.data(), A.rows, 1);
    return b;
}

}  // namespace

double UnfoldingState::max_gamma() const {
    double m = 0.0;
    for (double g : gamma) m = std::max(m, std::fabs(g));
    return m;
}

double UnfoldingState::max_omega() const {
    double m = 0.0;
    for (double w : omega) m = std::max(m, std::fabs(w));
    return m;
}

PhaseCondition radial_phase(Point2 pbar, Point2 center) {
    Point2 r = pbar - center;
    double n = norm(r);
    if (n < 1e-12) throw std::invalid_argument("radial_phase: pbar at center");
    return {pbar, {-r.y / n, r.x / n}};
}

std::vector<cdouble> ConjugacyProblem::newton_delta() const {
    Vec r = residual();
    Vec J = assemble_jacobian();
    for (cdouble& x : r) x = -x;
    kernels::lu_solve(J.data(), r.data(), dim(), 1);
    return r;
}

// ---------------------------------------------------------------------------
// Hénon-type problem: F_x = ca*x - sa*(y - x^2), F_y = sa*x + ca*(y - x^2)

struct HenonProblem::Impl {
    double alpha, ca, sa;
    MapSpec spec;
    CircleSystem sys;
    PhaseCondition phase;
    double beta = 0.0;
    int N, n1, d;
    Vec Rr;

    Impl(double alpha_, const CircleSystem& init, const PhaseCondition& ph)
        : alpha(alpha_), ca(std::cos(alpha_)), sa(std::sin(alpha_)),
          spec{MapFamily::HenonAP, alpha_}, sys(init), phase(ph) {
        N = sys.order();
        n1 = 2 * N + 1;
        d = sys.d;
        Rr = rotation_diag(N, sys.rho);
    }

    int dim() const { return 1 + 2 * d * n1; }
    int oa(int j) const { return 1 + 2 * j * n1; }
    int ob(int j) const { return 1 + 2 * j * n1 + n1; }

    // coefficient-space image of F on component j: (fx, fy)
    void map_rows(int j, CoeffSeq& fx, CoeffSeq& fy) const {
        const FourierCircle& K = sys.circles[j];
        CoeffSeq aa = convolve(K.a, K.a);
        fx = CoeffSeq(N);
        fy = CoeffSeq(N);
        for (int i = 0; i < n1; ++i) {
            fx.c[i] = ca * K.a.c[i] - sa * K.b.c[i] + sa * aa.c[i];
            fy.c[i] = sa * K.a.c[i] + ca * K.b.c[i] - ca * aa.c[i];
        }
    }

    cdouble phase_residual() const {
        cdouble kx = coeff_sum(sys.circles[0].a), ky = coeff_sum(sys.circles[0].b);
        return phase.eta.x * (phase.pbar.x - kx) + phase.eta.y * (phase.pbar.y - ky);
    }

    Vec residual() const {
        Vec r(dim());
        r[0] = phase_residual();
        for (int j = 0; j < d; ++j) {
            int jn = (j + 1) % d;
            double fac = (j == d - 1) ? 1.0 + beta : 1.0;
            CoeffSeq fx, fy;
            map_rows(j, fx, fy);
            const FourierCircle& Kn = sys.circles[jn];
            for (int i = 0; i < n1; ++i) {
                r[oa(j) + i] = fx.c[i] - fac * Rr[i] * Kn.a.c[i];
                r[ob(j) + i] = fy.c[i] - fac * Rr[i] * Kn.b.c[i];
            }
        }
        return r;
    }

    // d(link j residual)/d(X_j), the m x m block with m = 2*n1
    Dense link_block(int j) const {
        Dense B(2 * n1, 2 * n1);
        const CoeffSeq& a = sys.circles[j].a;
        for (int i = 0; i < n1; ++i) {
            B.at(i, i) += ca;
            B.at(i, n1 + i) += -sa;
            B.at(n1 + i, i) += sa;
            B.at(n1 + i, n1 + i) += ca;
        }
        fill_toeplitz(B, 0, 0, a, 2.0 * sa);
        fill_toeplitz(B, n1, 0, a, -2.0 * ca);
        return B;
    }

    Vec link_residual(int j) const {
        int jn = (j + 1) % d;
        double fac = (j == d - 1) ? 1.0 + beta : 1.0;
        CoeffSeq fx, fy;
        map_rows(j, fx, fy);
        const FourierCircle& Kn = sys.circles[jn];
        Vec r(2 * n1);
        for (int i = 0; i < n1; ++i) {
            r[i] = fx.c[i] - fac * Rr[i] * Kn.a.c[i];
            r[n1 + i] = fy.c[i] - fac * Rr[i] * Kn.b.c[i];
        }
        return r;
    }

    Dense jacobian() const {
        int D = dim();
        Dense J(D, D);
        for (int i = 0; i < n1; ++i) {
            J.at(0, oa(0) + i) = -phase.eta.x;
            J.at(0, ob(0) + i) = -phase.eta.y;
        }
        for (int j = 0; j < d; ++j) {
            int jn = (j + 1) % d;
            double fac = (j == d - 1) ? 1.0 + beta : 1.0;
            const FourierCircle& Kn = sys.circles[jn];
            int rx = oa(j), ry = ob(j);
            for (int i = 0; i < n1; ++i) {
                J.at(rx + i, oa(j) + i) += ca;
                J.at(rx + i, ob(j) + i) += -sa;
                J.at(ry + i, oa(j) + i) += sa;
                J.at(ry + i, ob(j) + i) += ca;
                J.at(rx + i, oa(jn) + i) += -fac * Rr[i];
                J.at(ry + i, ob(jn) + i) += -fac * Rr[i];
                if (j == d - 1) {
                    J.at(rx + i, 0) = -Rr[i] * Kn.a.c[i];
                    J.at(ry + i, 0) = -Rr[i] * Kn.b.c[i];
                }
            }
            fill_toeplitz(J, rx, oa(j), sys.circles[j].a, 2.0 * sa);
            fill_toeplitz(J, ry, oa(j), sys.circles[j].a, -2.0 * ca);
        }
        return J;
    }

    // Block-cyclic elimination: propagate deltaX_{j+1} = Rinv (B_j deltaX_j + r_j),
    // close with the (m+1) system in (dbeta, deltaX_0).
    Vec structured_delta() const {
        int m = 2 * n1;
        Vec Rm(m);
        for (int i = 0; i < n1; ++i) {
            Rm[i] = Rr[i];
            Rm[n1 + i] = Rr[i];
        }
        Dense U(m, m);
        for (int i = 0; i < m; ++i) U.at(i, i) = 1.0;
        Vec u(m, 0.0);
        Dense tmp(m, m);
        for (int j = 0; j < d - 1; ++j) {
            Dense Bj = link_block(j);
            Vec rj = link_residual(j);
            kernels::gemm(Bj.v.data(), U.v.data(), tmp.v.data(), m, m, m);
            for (int i = 0; i < m; ++i) {
                cdouble inv = 1.0 / Rm[i];
                for (int c = 0; c < m; ++c) tmp.at(i, c) *= inv;
            }
            std::swap(U.v, tmp.v);
            Vec bu(m, 0.0);
            for (int i = 0; i < m; ++i) {
                cdouble acc = 0.0;
                for (int c = 0; c < m; ++c) acc += Bj.at(i, c) * u[c];
                bu[i] = (acc + rj[i]) / Rm[i];
            }
            u = bu;
        }
        Dense Bd = link_block(d - 1);
        Vec rd = link_residual(d - 1);
        Dense Sys(m + 1, m + 1);
        Vec rhs(m + 1);
        for (int i = 0; i < n1; ++i) {
            Sys.at(0, 1 + i) = -phase.eta.x;
            Sys.at(0, 1 + n1 + i) = -phase.eta.y;
        }
        rhs[0] = -phase_residual();
        // closing rows: (Bd U - (1+beta) R) dX0 + dbeta*(-R X0) = -(rd + Bd u)
        kernels::gemm(Bd.v.data(), U.v.data(), tmp.v.data(), m, m, m);
        const FourierCircle& K0 = sys.circles[0];
        for (int i = 0; i < m; ++i) {
            for (int c = 0; c < m; ++c) Sys.at(1 + i, 1 + c) = tmp.at(i, c);
            Sys.at(1 + i, 1 + i) -= (1.0 + beta) * Rm[i];
            cdouble x0 = i < n1 ? K0.a.c[i] : K0.b.c[i - n1];
            Sys.at(1 + i, 0) = -Rm[i] * x0;
            cdouble acc = 0.0;
            for (int c = 0; c < m; ++c) acc += Bd.at(i, c) * u[c];
            rhs[1 + i] = -(rd[i] + acc);
        }
        Vec sol = solve_dense(std::move(Sys), std::move(rhs));

        Vec delta(dim());
        delta[0] = sol[0];
        Vec dX(sol.begin() + 1, sol.end());
        for (int j = 0; j < d; ++j) {
            for (int i = 0; i < n1; ++i) {
                delta[oa(j) + i] = dX[i];
                delta[ob(j) + i] = dX[n1 + i];
            }
            if (j + 1 < d) {
                Dense Bj = link_block(j);
                Vec rj = link_residual(j);
                Vec nx(m);
                for (int i = 0; i < m; ++i) {
                    cdouble acc = 0.0;
                    for (int c = 0; c < m; ++c) acc += Bj.at(i, c) * dX[c];
                    nx[i] = (acc + rj[i]) / Rm[i];
                }
                dX = nx;
            }
        }
        return delta;
    }
};

HenonProblem::HenonProblem(double alpha, const CircleSystem& init,
                           const PhaseCondition& phase)
    : impl_(std::make_unique<Impl>(alpha, init, phase)) {}
HenonProblem::~HenonProblem() = default;

int HenonProblem::dim() const { return impl_->dim(); }

std::vector<cdouble> HenonProblem::pack_state() const {
    Vec v(impl_->dim());
    v[0] = impl_->beta;
    for (int j = 0; j < impl_->d; ++j)
        for (int i = 0; i < impl_->n1; ++i) {
            v[impl_->oa(j) + i] = impl_->sys.circles[j].a.c[i];
            v[impl_->ob(j) + i] = impl_->sys.circles[j].b.c[i];
        }
    return v;
}

void HenonProblem::set_state(const std::vector<cdouble>& v) {
    impl_->beta = v[0].real();
    for (int j = 0; j < impl_->d; ++j)
        for (int i = 0; i < impl_->n1; ++i) {
            impl_->sys.circles[j].a.c[i] = v[impl_->oa(j) + i];
            impl_->sys.circles[j].b.c[i] = v[impl_->ob(j) + i];
        }
}

std::vector<cdouble> HenonProblem::residual() const { return impl_->residual(); }

std::vector<cdouble> HenonProblem::assemble_jacobian() const {
    return impl_->jacobian().v;
}

std::vector<cdouble> HenonProblem::newton_delta() const {
    if (impl_->d > 1) return impl_->structured_delta();
    return ConjugacyProblem::newton_delta();
}

void HenonProblem::apply_delta(const std::vector<cdouble>& delta) {
    Vec v = pack_state();
    for (size_t i = 0; i < v.size(); ++i) v[i] += delta[i];
    set_state(v);
}

void HenonProblem::symmetrize_state() {
    for (FourierCircle& K : impl_->sys.circles) symmetrize_inplace(K);
}

double HenonProblem::defect() const { return qpc::defect(impl_->sys, impl_->spec); }

const CircleSystem& HenonProblem::system() const { return impl_->sys; }

UnfoldingState HenonProblem::unfolding() const {
    UnfoldingState u;
    u.beta = impl_->beta;
    return u;
}

// ---------------------------------------------------------------------------
// Standard-map quadratic recast. Unknowns per component: a, b, s ~ sin(K1),
// c ~ cos(K1), unfolding scalars gamma_j, omega_j; shared beta.

struct RecastProblem::Impl {
    double alpha;
    MapSpec spec;
    CircleSystem sys;
    PhaseCondition phase;
    double beta = 0.0;
    std::vector<double> gamma, omega;
    std::vector<CoeffSeq> S, C;
    int N, n1, d;
    Vec Rr, Dn;

    Impl(double alpha_, const CircleSystem& init, const PhaseCondition& ph)
        : alpha(alpha_), spec{MapFamily::Standard, alpha_}, sys(init), phase(ph) {
        N = sys.order();
        n1 = 2 * N + 1;
        d = sys.d;
        gamma.assign(d, 0.0);
        omega.assign(d, 0.0);
        Rr = rotation_diag(N, sys.rho);
        Dn.resize(n1);
        for (int n = -N; n <= N; ++n) Dn[n + N] = cdouble{0.0, kTwoPi * n};
        init_aux();
    }

    void init_aux() {
        S.assign(d, CoeffSeq(N));
        C.assign(d, CoeffSeq(N));
        int G = 4 * n1;
        std::vector<cdouble> ss(G), cs(G);
        for (int j = 0; j < d; ++j) {
            for (int g = 0; g < G; ++g) {
                double x1 = eval(sys.circles[j].a, static_cast<double>(g) / G).real();
                ss[g] = std::sin(x1);
                cs[g] = std::cos(x1);
            }
            S[j] = symmetrize(dft_from_samples(ss, N));
            C[j] = symmetrize(dft_from_samples(cs, N));
        }
    }

    int dim() const { return 1 + 2 * d + 4 * d * n1; }
    int base() const { return 1 + 2 * d; }
    int oa(int j) const { return base() + 4 * j * n1; }
    int ob(int j) const { return oa(j) + n1; }
    int os(int j) const { return oa(j) + 2 * n1; }
    int oc(int j) const { return oa(j) + 3 * n1; }
    // equation row offsets
    int r_anchor_s(int j) const { return 1 + 2 * j; }
    int r_anchor_c(int j) const { return 2 + 2 * j; }
    int r_link(int j) const { return base() + 2 * j * n1; }
    int r_ode(int j) const { return base() + 2 * d * n1 + 2 * j * n1; }

    cdouble phase_residual() const {
        cdouble kx = coeff_sum(sys.circles[0].a), ky = coeff_sum(sys.circles[0].b);
        return phase.eta.x * (phase.pbar.x - kx) + phase.eta.y * (phase.pbar.y - ky);
    }

    Vec residual() const {
        Vec r(dim());
        r[0] = phase_residual();
        for (int j = 0; j < d; ++j) {
            cdouble suma = coeff_sum(sys.circles[j].a);
            r[r_anchor_s(j)] = coeff_sum(S[j]) - std::sin(suma);
            r[r_anchor_c(j)] = coeff_sum(C[j]) - std::cos(suma);
        }
        for (int j = 0; j < d; ++j) {
            int jn = (j + 1) % d;
            double fac = (j == d - 1) ? 1.0 + beta : 1.0;
            const FourierCircle& K = sys.circles[j];
            const FourierCircle& Kn = sys.circles[jn];
            int rl = r_link(j);
            for (int i = 0; i < n1; ++i) {
                cdouble as = K.a.c[i] + K.b.c[i] + alpha * S[j].c[i];
                cdouble bs = K.b.c[i] + alpha * S[j].c[i];
                r[rl + i] = as - fac * Rr[i] * Kn.a.c[i];
                r[rl + n1 + i] = bs - fac * Rr[i] * Kn.b.c[i];
            }
        }
        for (int j = 0; j < d; ++j) {
            CoeffSeq Da = differentiate(sys.circles[j].a);
            CoeffSeq cDa = convolve(C[j], Da);
            CoeffSeq sDa = convolve(S[j], Da);
            int ro = r_ode(j);
            for (int i = 0; i < n1; ++i) {
                r[ro + i] = Dn[i] * S[j].c[i] - cDa.c[i] - gamma[j] * S[j].c[i] +
                            omega[j] * C[j].c[i];
                r[ro + n1 + i] = Dn[i] * C[j].c[i] + sDa.c[i] - gamma[j] * C[j].c[i] -
                                 omega[j] * S[j].c[i];
            }
        }
        return r;
    }

    Dense jacobian() const {
        int D = dim();
        Dense J(D, D);
        for (int i = 0; i < n1; ++i) {
            J.at(0, oa(0) + i) = -phase.eta.x;
            J.at(0, ob(0) + i) = -phase.eta.y;
        }
        for (int j = 0; j < d; ++j) {
            cdouble suma = coeff_sum(sys.circles[j].a);
            cdouble cosa = std::cos(suma), sina = std::sin(suma);
            for (int i = 0; i < n1; ++i) {
                J.at(r_anchor_s(j), os(j) + i) = 1.0;
                J.at(r_anchor_s(j), oa(j) + i) = -cosa;
                J.at(r_anchor_c(j), oc(j) + i) = 1.0;
                J.at(r_anchor_c(j), oa(j) + i) = sina;
            }
        }
        for (int j = 0; j < d; ++j) {
            int jn = (j + 1) % d;
            double fac = (j == d - 1) ? 1.0 + beta : 1.0;
            const FourierCircle& Kn = sys.circles[jn];
            int rl = r_link(j);
            for (int i = 0; i < n1; ++i) {
                J.at(rl + i, oa(j) + i) += 1.0;
                J.at(rl + i, ob(j) + i) += 1.0;
                J.at(rl + i, os(j) + i) += alpha;
                J.at(rl + i, oa(jn) + i) += -fac * Rr[i];
                J.at(rl + n1 + i, ob(j) + i) += 1.0;
                J.at(rl + n1 + i, os(j) + i) += alpha;
                J.at(rl + n1 + i, ob(jn) + i) += -fac * Rr[i];
                if (j == d - 1) {
                    J.at(rl + i, 0) = -Rr[i] * Kn.a.c[i];
                    J.at(rl + n1 + i, 0) = -Rr[i] * Kn.b.c[i];
                }
            }
        }
        for (int j = 0; j < d; ++j) {
            CoeffSeq Da = differentiate(sys.circles[j].a);
            int ro = r_ode(j);
            for (int i = 0; i < n1; ++i) {
                J.at(ro + i, os(j) + i) += Dn[i] - gamma[j];
                J.at(ro + i, oc(j) + i) += omega[j];
                J.at(ro + i, 1 + 2 * j) = -S[j].c[i];
                J.at(ro + i, 2 + 2 * j) = C[j].c[i];
                J.at(ro + n1 + i, oc(j) + i) += Dn[i] - gamma[j];
                J.at(ro + n1 + i, os(j) + i) += -omega[j];
                J.at(ro + n1 + i, 1 + 2 * j) = -C[j].c[i];
                J.at(ro + n1 + i, 2 + 2 * j) = -S[j].c[i];
            }
            fill_toeplitz(J, ro, oc(j), Da, -1.0);
            fill_toeplitz(J, ro + n1, os(j), Da, 1.0);
            // d/da of the convolutions: -T(c) D and +T(s) D
            Dense TD(n1, n1);
            fill_toeplitz(TD, 0, 0, C[j], -1.0);
            for (int rr = 0; rr < n1; ++rr)
                for (int cc = 0; cc < n1; ++cc)
                    J.at(ro + rr, oa(j) + cc) += TD.at(rr, cc) * Dn[cc];
            Dense TS(n1, n1);
            fill_toeplitz(TS, 0, 0, S[j], 1.0);
            for (int rr = 0; rr < n1; ++rr)
                for (int cc = 0; cc < n1; ++cc)
                    J.at(ro + n1 + rr, oa(j) + cc) += TS.at(rr, cc) * Dn[cc];
        }
        return J;
    }

    // Per-component elimination of (ds, dc, dgamma, domega), then the same
    // block-cyclic propagation as the Hénon case on (da, db).
    Vec structured_delta() const {
        int m = 2 * n1;
        int nl = 2 * n1 + 2;  // local system size
        Vec Rm(m);
        for (int i = 0; i < n1; ++i) {
            Rm[i] = Rr[i];
            Rm[n1 + i] = Rr[i];
        }
        // local solves: [ds; dc; dgamma; domega] = Sol_j * da + sol0_j
        std::vector<Dense> Sol(d);
        std::vector<Vec> sol0(d);
        Vec full_res = residual();
        for (int j = 0; j < d; ++j) {
            CoeffSeq Da = differentiate(sys.circles[j].a);
            Dense M(nl, nl);
            for (int i = 0; i < n1; ++i) {
                M.at(i, i) += Dn[i] - gamma[j];
                M.at(i, n1 + i) += omega[j];
                M.at(i, 2 * n1) = -S[j].c[i];
                M.at(i, 2 * n1 + 1) = C[j].c[i];
                M.at(n1 + i, n1 + i) += Dn[i] - gamma[j];
                M.at(n1 + i, i) += -omega[j];
                M.at(n1 + i, 2 * n1) = -C[j].c[i];
                M.at(n1 + i, 2 * n1 + 1) = -S[j].c[i];
                M.at(2 * n1, i) = 1.0;
                M.at(2 * n1 + 1, n1 + i) = 1.0;
            }
            fill_toeplitz(M, 0, n1, Da, -1.0);
            fill_toeplitz(M, n1, 0, Da, 1.0);
            // rhs matrix: columns [ -E_j | rhs0 ]
            Dense RHS(nl, n1 + 1);
            Dense E(nl, n1);
            Dense TC(n1, n1), TSd(n1, n1);
            fill_toeplitz(TC, 0, 0, C[j], -1.0);
            fill_toeplitz(TSd, 0, 0, S[j], 1.0);
            cdouble suma = coeff_sum(sys.circles[j].a);
            cdouble cosa = std::cos(suma), sina = std::sin(suma);
            for (int rr = 0; rr < n1; ++rr)
                for (int cc = 0; cc < n1; ++cc) {
                    E.at(rr, cc) = TC.at(rr, cc) * Dn[cc];
                    E.at(n1 + rr, cc) = TSd.at(rr, cc) * Dn[cc];
                }
            for (int cc = 0; cc < n1; ++cc) {
                E.at(2 * n1, cc) = -cosa;
                E.at(2 * n1 + 1, cc) = sina;
            }
            for (int rr = 0; rr < nl; ++rr)
                for (int cc = 0; cc < n1; ++cc) RHS.at(rr, cc) = -E.at(rr, cc);
            int ro = r_ode(j);
            for (int i = 0; i < n1; ++i) {
                RHS.at(i, n1) = -full_res[ro + i];
                RHS.at(n1 + i, n1) = -full_res[ro + n1 + i];
            }
            RHS.at(2 * n1, n1) = -full_res[r_anchor_s(j)];
            RHS.at(2 * n1 + 1, n1) = -full_res[r_anchor_c(j)];
            kernels::lu_solve(M.v.data(), RHS.v.data(), nl, n1 + 1);
            Sol[j] = Dense(nl, n1);
            sol0[j] = Vec(nl);
            for (int rr = 0; rr < nl; ++rr) {
                for (int cc = 0; cc < n1; ++cc) Sol[j].at(rr, cc) = RHS.at(rr, cc);
                sol0[j][rr] = RHS.at(rr, n1);
            }
        }
        auto link_block = [&](int j) {
            Dense B(m, m);
            for (int i = 0; i < n1; ++i) {
                B.at(i, i) += 1.0;
                B.at(i, n1 + i) += 1.0;
                B.at(n1 + i, n1 + i) += 1.0;
            }
            for (int rr = 0; rr < n1; ++rr)
                for (int cc = 0; cc < n1; ++cc) {
                    cdouble v = alpha * Sol[j].at(rr, cc);  // d(ds)/d(da)
                    B.at(rr, cc) += v;
                    B.at(n1 + rr, cc) += v;
                }
            return B;
        };
        auto link_rhs = [&](int j) {
            Vec r(m);
            int rl = r_link(j);
            for (int i = 0; i < n1; ++i) {
                cdouble s0 = alpha * sol0[j][i];  // ds response to current residual
                r[i] = full_res[rl + i] + s0;
                r[n1 + i] = full_res[rl + n1 + i] + s0;
            }
            return r;
        };
        Dense U(m, m);
        for (int i = 0; i < m; ++i) U.at(i, i) = 1.0;
        Vec u(m, 0.0);
        Dense tmp(m, m);
        std::vector<Dense> blocks(d);
        for (int j = 0; j < d; ++j) blocks[j] = link_block(j);
        for (int j = 0; j < d - 1; ++j) {
            Vec rj = link_rhs(j);
            kernels::gemm(blocks[j].v.data(), U.v.data(), tmp.v.data(), m, m, m);
            for (int i = 0; i < m; ++i) {
                cdouble inv = 1.0 / Rm[i];
                for (int c = 0; c < m; ++c) tmp.at(i, c) *= inv;
            }
            std::swap(U.v, tmp.v);
            Vec bu(m, 0.0);
            for (int i = 0; i < m; ++i) {
                cdouble acc = 0.0;
                for (int c = 0; c < m; ++c) acc += blocks[j].at(i, c) * u[c];
                bu[i] = (acc + rj[i]) / Rm[i];
            }
            u = bu;
        }
        Vec rd = link_rhs(d - 1);
        Dense Sys(m + 1, m + 1);
        Vec rhs(m + 1);
        for (int i = 0; i < n1; ++i) {
            Sys.at(0, 1 + i) = -phase.eta.x;
            Sys.at(0, 1 + n1 + i) = -phase.eta.y;
        }
        rhs[0] = -phase_residual();
        kernels::gemm(blocks[d - 1].v.data(), U.v.data(), tmp.v.data(), m, m, m);
        const FourierCircle& K0 = sys.circles[0];
        for (int i = 0; i < m; ++i) {
            for (int c = 0; c < m; ++c) Sys.at(1 + i, 1 + c) = tmp.at(i, c);
            Sys.at(1 + i, 1 + i) -= (1.0 + beta) * Rm[i];
            cdouble x0 = i < n1 ? K0.a.c[i] : K0.b.c[i - n1];
            Sys.at(1 + i, 0) = -Rm[i] * x0;
            cdouble acc = 0.0;
            for (int c = 0; c < m; ++c) acc += blocks[d - 1].at(i, c) * u[c];
            rhs[1 + i] = -(rd[i] + acc);
        }
        Vec sol = solve_dense(std::move(Sys), std::move(rhs));

        Vec delta(dim());
        delta[0] = sol[0];
        Vec dX(sol.begin() + 1, sol.end());
        for (int j = 0; j < d; ++j) {
            Vec aux(nl);
            for (int rr = 0; rr < nl; ++rr) {
                cdouble acc = sol0[j][rr];
                for (int cc = 0; cc < n1; ++cc) acc += Sol[j].at(rr, cc) * dX[cc];
                aux[rr] = acc;
            }
            for (int i = 0; i < n1; ++i) {
                delta[oa(j) + i] = dX[i];
                delta[ob(j) + i] = dX[n1 + i];
                delta[os(j) + i] = aux[i];
                delta[oc(j) + i] = aux[n1 + i];
            }
            delta[1 + 2 * j] = aux[2 * n1];
            delta[2 + 2 * j] = aux[2 * n1 + 1];
            if (j + 1 < d) {
                Vec rj = link_rhs(j);
                Vec nx(m);
                for (int i = 0; i < m; ++i) {
                    cdouble acc = 0.0;
                    for (int c = 0; c < m; ++c) acc += blocks[j].at(i, c) * dX[c];
                    nx[i] = (acc + rj[i]) / Rm[i];
                }
                dX = nx;
            }
        }
        return delta;
    }
};

RecastProblem::RecastProblem(double alpha, const CircleSystem& init,
                             const PhaseCondition& phase)
    : impl_(std::make_unique<Impl>(alpha, init, phase)) {}
RecastProblem::~RecastProblem() = default;

int RecastProblem::dim() const { return impl_->dim(); }

std::vector<cdouble> RecastProblem::pack_state() const {
    Vec v(impl_->dim());
    v[0] = impl_->beta;
    for (int j = 0; j < impl_->d; ++j) {
        v[1 + 2 * j] = impl_->gamma[j];
        v[2 + 2 * j] = impl_->omega[j];
        for (int i = 0; i < impl_->n1; ++i) {
            v[impl_->oa(j) + i] = impl_->sys.circles[j].a.c[i];
            v[impl_->ob(j) + i] = impl_->sys.circles[j].b.c[i];
            v[impl_->os(j) + i] = impl_->S[j].c[i];
            v[impl_->oc(j) + i] = impl_->C[j].c[i];
        }
    }
    return v;
}

void RecastProblem::set_state(const std::vector<cdouble>& v) {
    impl_->beta = v[0].real();
    for (int j = 0; j < impl_->d; ++j) {
        impl_->gamma[j] = v[1 + 2 * j].real();
        impl_->omega[j] = v[2 + 2 * j].real();
        for (int i = 0; i < impl_->n1; ++i) {
            impl_->sys.circles[j].a.c[i] = v[impl_->oa(j) + i];
            impl_->sys.circles[j].b.c[i] = v[impl_->ob(j) + i];
            impl_->S[j].c[i] = v[impl_->os(j) + i];
            impl_->C[j].c[i] = v[impl_->oc(j) + i];
        }
    }
}

std::vector<cdouble> RecastProblem::residual() const { return impl_->residual(); }

std::vector<cdouble> RecastProblem::assemble_jacobian() const {
    return impl_->jacobian().v;
}

std::vector<cdouble> RecastProblem::newton_delta() const {
    if (impl_->d > 1) return impl_->structured_delta();
    return ConjugacyProblem::newton_delta();
}

void RecastProblem::apply_delta(const std::vector<cdouble>& delta) {
    Vec v = pack_state();
    for (size_t i = 0; i < v.size(); ++i) v[i] += delta[i];
    set_state(v);
}

void RecastProblem::symmetrize_state() {
    for (FourierCircle& K : impl_->sys.circles) symmetrize_inplace(K);
    for (int j = 0; j < impl_->d; ++j) {
        impl_->S[j] = symmetrize(impl_->S[j]);
        impl_->C[j] = symmetrize(impl_->C[j]);
    }
}

double RecastProblem::defect() const { return qpc::defect(impl_->sys, impl_->spec); }

const CircleSystem& RecastProblem::system() const { return impl_->sys; }

UnfoldingState RecastProblem::unfolding() const {
    UnfoldingState u;
    u.beta = impl_->beta;
    u.gamma = impl_->gamma;
    u.omega = impl_->omega;
    return u;
}

const CoeffSeq& RecastProblem::aux_s(int j) const { return impl_->S[j]; }
const CoeffSeq& RecastProblem::aux_c(int j) const { return impl_->C[j]; }

// ---------------------------------------------------------------------------

std::unique_ptr<ConjugacyProblem> make_problem(const MapSpec& spec,
                                               const CircleSystem& init,
                                               const PhaseCondition& phase) {
    switch (spec.family) {
        case MapFamily::HenonAP:
            return std::make_unique<HenonProblem>(spec.alpha, init, phase);
        case MapFamily::Standard:
            return std::make_unique<RecastProblem>(spec.alpha, init, phase);
    }
    throw std::invalid_argument("make_problem: unknown family");
}

std::vector<cdouble> residual_henon(const CircleSystem& sys, double alpha,
                                    double beta, const PhaseCondition& phase) {
    HenonProblem p(alpha, sys, phase);
    Vec st = p.pack_state();
    st[0] = beta;
    p.set_state(st);
    return p.residual();
}

SolveReport newton_solve(ConjugacyProblem& problem, const NewtonOpts& opts) {
    SolveReport report;
    double scale = max_coeff(problem.system());
    double tol = opts.tol > 0 ? opts.tol : 5e-15 * (1.0 + scale);
    double df = problem.defect();
    report.defect_history.push_back(df);
    if (df <= tol) {
        report.converged = true;
    } else {
        int growth = 0;
        for (int it = 0; it < opts.max_iter; ++it) {
            Vec delta;
            try {
                delta = problem.newton_delta();
            } catch (const kernels::linear_solve_error&) {
                report.condition_warning = true;
                break;
            }
            problem.apply_delta(delta);
            problem.symmetrize_state();
            double prev = df;
            df = problem.defect();
            report.iterations = it + 1;
            report.defect_history.push_back(df);
            if (!std::isfinite(df) || df > 1e3 * prev) break;  // divergence
            growth = df > prev ? growth + 1 : 0;
            if (growth >= 3) break;  // repeated growth, not converging
            if (df <= tol) {
                report.converged = true;
                break;
            }
            if (prev < 1e-9 && df > opts.stagnation_factor * prev) {
                report.converged = true;  // defect saturated at the noise floor
                break;
            }
        }
    }
    report.final_defect = problem.defect();
    report.unfolding = problem.unfolding();
    if (report.converged) {
        const UnfoldingState& u = report.unfolding;
        if (std::fabs(u.beta) > 1e-10 || u.max_gamma() > 1e-10 ||
            u.max_omega() > 1e-10) {
            report.converged = false;
            report.condition_warning = true;
        }
    }
    return report;
}

AreaDiagnostics unfolding_diagnostics(const FourierCircle& K, const MapSpec& spec,
                                      double rho) {
    AreaDiagnostics d;
    d.A1 = enclosed_area(K);
    d.A2 = enclosed_area(rotate(K, rho));
    int G = defect_grid_size(K.N);
    std::vector<cdouble> xs(G), ys(G);
    for (int g = 0; g < G; ++g) {
        Point2 p = eval_map(spec, eval(K, static_cast<double>(g) / G));
        xs[g] = p.x;
        ys[g] = p.y;
    }
    FourierCircle push(2 * K.N);
    push.a = dft_from_samples(xs, 2 * K.N);
    push.b = dft_from_samples(ys, 2 * K.N);
    d.A3 = enclosed_area(push);
    return d;
}

}  // namespace qpc
