#include "doctest.h"

#include "fsib/operators.hpp"

#include <cmath>
#include <random>

using namespace fsib;

namespace {

FluidGrid make_grid(bool graph, int nx, int nz, double amp = 0.4) {
    BeamProfile prof = graph ? bump_profile(1.0, nx + 1, amp) : rect_profile(1.0, nx + 1);
    return FluidGrid(prof, nx, nz);
}

Vec divergence(const FluidOps& ops, const Vec& u1, const Vec& u2) {
    return ops.div1 * u1 + ops.div2 * u2;
}

// build (u1,u2) from a nodal stream function Phi (size (nx+1) x (nz+1)),
// mirroring the lifting construction: contravariant fluxes are pure
// differences of Phi, then physical components are recovered
void from_stream(const FluidOps& ops, const Eigen::MatrixXd& Phi, Vec& u1, Vec& u2) {
    const FluidGrid& g = ops.g;
    u1.resize(g.n_u1());
    for (int i = 0; i <= g.nx; ++i)
        for (int k = 0; k < g.nz; ++k)
            u1[g.iu1(i, k)] = -(Phi(i, k + 1) - Phi(i, k)) / g.hz / g.s_f[i];
    Vec q2(g.n_u2());
    for (int i = 0; i < g.nx; ++i)
        for (int k = 0; k <= g.nz; ++k)
            q2[g.iu2(i, k)] = (Phi(i + 1, k) - Phi(i, k)) / g.hx;
    Vec corr = ops.avg_u1_to_u2 * u1;
    u2.resize(g.n_u2());
    for (int i = 0; i < g.nx; ++i)
        for (int k = 0; k <= g.nz; ++k)
            u2[g.iu2(i, k)] = q2[g.iu2(i, k)] + g.zeta_f(k) * g.sx_c[i] * corr[g.iu2(i, k)];
}

} // namespace

TEST_CASE("discrete divergence of a stream function vanishes exactly") {
    for (bool graph : {false, true}) {
        FluidGrid g = make_grid(graph, 12, 10);
        FluidOps ops(g, 0.1);
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        Eigen::MatrixXd Phi(g.nx + 1, g.nz + 1);
        for (int i = 0; i <= g.nx; ++i)
            for (int k = 0; k <= g.nz; ++k) Phi(i, k) = U(rng);
        Vec u1, u2;
        from_stream(ops, Phi, u1, u2);
        Vec d = divergence(ops, u1, u2);
        CHECK(d.lpNorm<Eigen::Infinity>() < 1e-13);
    }
}

TEST_CASE("projector gradient is the negative vol-adjoint of div") {
    for (bool graph : {false, true}) {
        FluidGrid g = make_grid(graph, 10, 9);
        FluidOps ops(g, 1.0);
        std::mt19937 rng(3);
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        Vec phi(g.n_p()), u1(g.n_u1()), u2(g.n_u2());
        for (int j = 0; j < phi.size(); ++j) phi[j] = U(rng);
        for (int j = 0; j < u1.size(); ++j) u1[j] = U(rng);
        for (int j = 0; j < u2.size(); ++j) u2[j] = U(rng);
        // zero boundary u2 so the removed columns do not enter
        for (int i = 0; i < g.nx; ++i) { u2[g.iu2(i, 0)] = 0; u2[g.iu2(i, g.nz)] = 0; }

        double lhs = dot_w(ops.w_u1, ops.gproj_x * phi, u1) + dot_w(ops.w_u2, ops.gproj_z * phi, u2);
        double rhs = -dot_w(ops.w_p, phi, divergence(ops, u1, u2));
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("potential operator is symmetric positive definite (vol-weighted)") {
    for (bool graph : {false, true}) {
        FluidGrid g = make_grid(graph, 9, 8);
        FluidOps ops(g, 1.0);
        Eigen::MatrixXd A = Eigen::MatrixXd(ops.a_pot);
        Eigen::MatrixXd Av = ops.w_p.asDiagonal() * A;
        CHECK((Av - Av.transpose()).cwiseAbs().maxCoeff() < 1e-12 * Av.cwiseAbs().maxCoeff());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (Av + Av.transpose()));
        CHECK(es.eigenvalues().minCoeff() > 0.0);
    }
}

TEST_CASE("face Laplacians are second-order consistent in the interior") {
    auto run = [&](bool graph) {
        double e_prev = 0.0, order = 0.0;
        for (int lev = 0; lev < 2; ++lev) {
            const int nx = 16 << lev, nz = 14 << lev;
            FluidGrid g = make_grid(graph, nx, nz, 0.3);
            FluidOps ops(g, 1.0);
            auto f = [](double x, double z) { return std::sin(2 * x + 0.3) * std::cos(1.7 * z); };
            auto lapf = [](double x, double z) {
                return -(4.0 + 1.7 * 1.7) * std::sin(2 * x + 0.3) * std::cos(1.7 * z);
            };
            Vec u1(g.n_u1());
            for (int i = 0; i <= nx; ++i)
                for (int k = 0; k < nz; ++k)
                    u1[g.iu1(i, k)] = f(g.x_f(i), g.s_f[i] * g.zeta_c(k));
            Vec r = ops.lap_u1 * u1;
            double emax = 0.0;
            for (int i = 3; i <= nx - 3; ++i)
                for (int k = 3; k < nz - 3; ++k)
                    emax = std::max(emax, std::abs(r[g.iu1(i, k)] -
                                                   lapf(g.x_f(i), g.s_f[i] * g.zeta_c(k))));
            if (lev == 1) order = std::log2(e_prev / emax);
            e_prev = emax;
        }
        return order;
    };
    CHECK(run(false) > 1.8);
    CHECK(run(true) > 1.8);
}

TEST_CASE("evaluation derivatives converge at second order") {
    auto err = [](int nx, int nz) {
        FluidGrid g = make_grid(true, nx, nz, 0.35);
        FluidOps ops(g, 1.0);
        auto f = [](double x, double z) { return std::exp(0.4 * x) * std::sin(1.3 * z + 0.2); };
        auto fx = [](double x, double z) { return 0.4 * std::exp(0.4 * x) * std::sin(1.3 * z + 0.2); };
        auto fz = [](double x, double z) { return 1.3 * std::exp(0.4 * x) * std::cos(1.3 * z + 0.2); };
        Vec u1(g.n_u1());
        for (int i = 0; i <= g.nx; ++i)
            for (int k = 0; k < g.nz; ++k)
                u1[g.iu1(i, k)] = f(g.x_f(i), g.s_f[i] * g.zeta_c(k));
        Vec rx = ops.dx_u1 * u1, rz = ops.dz_u1 * u1;
        double ex = 0, ez = 0;
        for (int i = 0; i <= g.nx; ++i)
            for (int k = 0; k < g.nz; ++k) {
                const double x = g.x_f(i), z = g.s_f[i] * g.zeta_c(k);
                ex = std::max(ex, std::abs(rx[g.iu1(i, k)] - fx(x, z)));
                ez = std::max(ez, std::abs(rz[g.iu1(i, k)] - fz(x, z)));
            }
        return std::max(ex, ez);
    };
    const double e1 = err(16, 14), e2 = err(32, 28);
    CHECK(std::log2(e1 / e2) > 1.7);
}
