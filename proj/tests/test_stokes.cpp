#include "doctest.h"

#include "fsib/stokes.hpp"
#include "fsib/errors.hpp"

#include <cmath>
#include <random>

using namespace fsib;

namespace {

StokesSolver make_solver(bool graph, int nx, int nz, double nu = 0.05, double amp = 0.4) {
    BeamProfile prof = graph ? bump_profile(1.0, nx + 1, amp) : rect_profile(1.0, nx + 1);
    return StokesSolver(FluidGrid(prof, nx, nz), nu);
}

Vec random_vec(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    Vec v(n);
    for (int j = 0; j < n; ++j) v[j] = U(rng);
    return v;
}

} // namespace

TEST_CASE("lift_divfree: zero data gives zero, divergence and trace exact") {
    for (bool graph : {false, true}) {
        StokesSolver s = make_solver(graph, 16, 12);
        const FluidGrid& g = s.grid();

        FluidState w0 = s.lift_divfree(Vec::Zero(g.nx));
        CHECK(w0.u1.lpNorm<Eigen::Infinity>() == 0.0);
        CHECK(w0.u2.lpNorm<Eigen::Infinity>() == 0.0);

        Vec gt(g.nx);
        for (int i = 0; i < g.nx; ++i) {
            const double x = g.x_c(i);
            gt[i] = std::sin(M_PI * x / g.L) * std::sin(M_PI * x / g.L);
        }
        FluidState w = s.lift_divfree(gt);
        CHECK(s.max_divergence(w.u1, w.u2) < 1e-13);
        for (int i = 0; i < g.nx; ++i)
            CHECK(std::abs(w.u2[g.iu2(i, g.nz)] - gt[i]) < 1e-13);

        CHECK_THROWS_AS(s.lift_divfree(Vec::Ones(g.nx)), PreconditionError);
    }
}

TEST_CASE("leray projector: fixed points, gradients, idempotence, self-adjointness") {
    for (bool graph : {false, true}) {
        StokesSolver s = make_solver(graph, 16, 16);
        const FluidGrid& g = s.grid();
        const FluidOps& ops = s.ops();

        // a discretely divergence-free field with zero Gamma_d flux is fixed
        Vec gt = Vec::Zero(g.nx);
        Eigen::MatrixXd Phi(g.nx + 1, g.nz + 1);
        std::mt19937 rng(11);
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        for (int i = 0; i <= g.nx; ++i)
            for (int k = 0; k <= g.nz; ++k)
                Phi(i, k) = (k == 0 || k == g.nz) ? 0.0 : U(rng);
        Vec u1(g.n_u1()), q2(g.n_u2());
        for (int i = 0; i <= g.nx; ++i)
            for (int k = 0; k < g.nz; ++k)
                u1[g.iu1(i, k)] = -(Phi(i, k + 1) - Phi(i, k)) / g.hz / g.s_f[i];
        for (int i = 0; i < g.nx; ++i)
            for (int k = 0; k <= g.nz; ++k)
                q2[g.iu2(i, k)] = (Phi(i + 1, k) - Phi(i, k)) / g.hx;
        Vec corr = ops.avg_u1_to_u2 * u1;
        Vec u2(g.n_u2());
        for (int i = 0; i < g.nx; ++i)
            for (int k = 0; k <= g.nz; ++k)
                u2[g.iu2(i, k)] = q2[g.iu2(i, k)] + g.zeta_f(k) * g.sx_c[i] * corr[g.iu2(i, k)];

        ProjectionResult fix = s.leray_project(u1, u2);
        CHECK((fix.u1 - u1).lpNorm<Eigen::Infinity>() < 1e-9);
        CHECK((fix.u2 - u2).lpNorm<Eigen::Infinity>() < 1e-9);

        // a projector gradient field is annihilated
        Vec phi = random_vec(g.n_p(), 5);
        Vec g1 = ops.gproj_x * phi, g2 = ops.gproj_z * phi;
        ProjectionResult ann = s.leray_project(g1, g2);
        const double scale = std::max(g1.lpNorm<Eigen::Infinity>(), g2.lpNorm<Eigen::Infinity>());
        CHECK(ann.u1.lpNorm<Eigen::Infinity>() < 1e-9 * scale);
        CHECK(ann.u2.lpNorm<Eigen::Infinity>() < 1e-9 * scale);

        // idempotence, divergence, self-adjointness on random fields
        Vec a1 = random_vec(g.n_u1(), 17), a2 = random_vec(g.n_u2(), 18);
        Vec b1 = random_vec(g.n_u1(), 19), b2 = random_vec(g.n_u2(), 20);
        ProjectionResult Pa = s.leray_project(a1, a2);
        ProjectionResult Pb = s.leray_project(b1, b2);
        ProjectionResult PPa = s.leray_project(Pa.u1, Pa.u2);
        CHECK((PPa.u1 - Pa.u1).lpNorm<Eigen::Infinity>() < 1e-9);
        CHECK((PPa.u2 - Pa.u2).lpNorm<Eigen::Infinity>() < 1e-9);
        CHECK(s.max_divergence(Pa.u1, Pa.u2) < 1e-9);
        const double ip1 = dot_w(ops.w_u1, Pa.u1, b1) + dot_w(ops.w_u2, Pa.u2, b2);
        const double ip2 = dot_w(ops.w_u1, a1, Pb.u1) + dot_w(ops.w_u2, a2, Pb.u2);
        CHECK(std::abs(ip1 - ip2) < 1e-10);

        // both routes produce the same projection and the same total potential
        ProjectionResult two = s.leray_project(a1, a2, true);
        CHECK((two.u1 - Pa.u1).lpNorm<Eigen::Infinity>() < 1e-8);
        CHECK((two.u2 - Pa.u2).lpNorm<Eigen::Infinity>() < 1e-8);
        CHECK((two.potential - Pa.potential).lpNorm<Eigen::Infinity>() < 1e-8);
    }
}

TEST_CASE("steady Stokes: zero data, Poiseuille accuracy and order") {
    StokesSolver s0 = make_solver(false, 16, 16);
    SteadyResult z = s0.solve_steady(Vec::Zero(s0.grid().n_u1()), Vec::Zero(s0.grid().n_u2()),
                                     Vec::Zero(s0.grid().nx), ThetaData::zero(s0.grid()));
    CHECK(z.state.u1.lpNorm<Eigen::Infinity>() < 1e-12);
    CHECK(z.state.u2.lpNorm<Eigen::Infinity>() < 1e-12);
    CHECK(z.state.p.lpNorm<Eigen::Infinity>() < 1e-12);

    auto poiseuille_err = [](int n) {
        const double nu = 0.05, hi = 1.0, ho = 0.0, L = 1.0;
        StokesSolver s = make_solver(false, n, n, nu);
        const FluidGrid& g = s.grid();
        ThetaData th{Vec::Constant(g.nz, hi), Vec::Constant(g.nz, ho)};
        SteadyResult r = s.solve_steady(Vec::Zero(g.n_u1()), Vec::Zero(g.n_u2()),
                                        Vec::Zero(g.nx), th);
        double emax = 0.0, umax = 0.0;
        for (int i = 0; i <= g.nx; ++i)
            for (int k = 0; k < g.nz; ++k) {
                const double zc = g.zeta_c(k);
                const double exact = (hi - ho) / (2 * nu * L) * zc * (1.0 - zc);
                emax = std::max(emax, std::abs(r.state.u1[g.iu1(i, k)] - exact));
                umax = std::max(umax, std::abs(exact));
            }
        // u2 vanishes and p is linear in x
        CHECK(r.state.u2.lpNorm<Eigen::Infinity>() < 1e-9);
        for (int i = 0; i < g.nx; ++i) {
            const double pex = hi + (ho - hi) * g.x_c(i) / L;
            CHECK(std::abs(r.state.p[g.ip(i, n / 2)] - pex) < 1e-9);
        }
        return emax / umax;
    };
    const double e16 = poiseuille_err(16), e32 = poiseuille_err(32), e64 = poiseuille_err(64);
    CHECK(e32 < 0.02);
    CHECK(std::log2(e16 / e32) > 1.9);
    CHECK(std::log2(e32 / e64) > 1.9);
}

TEST_CASE("N_s is symmetric nonnegative, N_0 recovers a harmonic trace") {
    StokesSolver s = make_solver(false, 32, 32);
    Mat Ns = s.assemble_Ns();
    const double asym = (Ns - Ns.transpose()).cwiseAbs().maxCoeff() / Ns.cwiseAbs().maxCoeff();
    CHECK(asym < 1e-8);
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (Ns + Ns.transpose()));
    CHECK(es.eigenvalues().minCoeff() > -1e-10 * Ns.norm());
    CHECK((Ns * Vec::Zero(Ns.rows())).lpNorm<Eigen::Infinity>() == 0.0);

    // graph mode keeps the symmetry (same adjoint construction)
    StokesSolver sg = make_solver(true, 16, 16);
    Mat Ng = sg.assemble_Ns();
    CHECK((Ng - Ng.transpose()).cwiseAbs().maxCoeff() / Ng.cwiseAbs().maxCoeff() < 1e-8);

    // N_0: rho* = sin(pi x / L) sinh(pi z / L) is harmonic, vanishes on
    // Gamma_io; prescribe its Neumann data and recover the top trace
    auto n0_err = [](int n) {
        StokesSolver sv = make_solver(false, n, n);
        const FluidGrid& g = sv.grid();
        const double pl = M_PI / g.L;
        Vec vt(g.nx), vb(g.nx), exact(g.nx + 1);
        for (int i = 0; i < g.nx; ++i) {
            const double x = g.x_c(i);
            vt[i] = std::sin(pl * x) * pl * std::cosh(pl * 1.0);
            vb[i] = -std::sin(pl * x) * pl * std::cosh(0.0);
        }
        for (int j = 0; j <= g.nx; ++j)
            exact[j] = std::sin(pl * g.x_f(j)) * std::sinh(pl);
        Vec got = sv.apply_N0(vt, vb);
        return (got - exact).lpNorm<Eigen::Infinity>() / exact.lpNorm<Eigen::Infinity>();
    };
    const double e1 = n0_err(16), e2 = n0_err(32);
    CHECK(std::log2(e1 / e2) > 1.6);
    CHECK(e2 < 0.02);

    // linearity
    Vec va = random_vec(s.grid().nx, 3), vb2 = random_vec(s.grid().nx, 4);
    Vec z0 = Vec::Zero(s.grid().nx);
    Vec lin = s.apply_N0(va + vb2, z0) - s.apply_N0(va, z0) - s.apply_N0(vb2, z0);
    CHECK(lin.lpNorm<Eigen::Infinity>() < 1e-9);
}
