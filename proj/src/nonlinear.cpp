#include "fsib/nonlinear.hpp"
#include "fsib/errors.hpp"

namespace fsib {

namespace {

void check_gap(const GeometryMap& gm) {
    const double m = (1.0 + gm.etat.array()).minCoeff();
    if (m <= 0.0) throw CollisionError("nonlinear: 1 + etat <= 0", m);
}

} // namespace

VelocityPair eval_w(const FluidOps& ops, const GeometryMap& gm, const Vec& u1, const Vec& u2) {
    const FluidGrid& g = ops.g;
    (void)u2;
    VelocityPair w;
    w.u1.resize(g.n_u1());
    for (int i = 0; i <= g.nx; ++i)
        for (int k = 0; k < g.nz; ++k)
            w.u1[g.iu1(i, k)] = -gm.etat[i] * u1[g.iu1(i, k)];
    Vec u1_at_u2 = ops.avg_u1_to_u2_eval * u1;
    w.u2.resize(g.n_u2());
    for (int i = 0; i < g.nx; ++i)
        for (int k = 0; k <= g.nz; ++k) {
            const double z = g.s_c[i] * g.zeta_f(k);
            w.u2[g.iu2(i, k)] = z * gm.etat_x_c[i] * u1_at_u2[g.iu2(i, k)];
        }
    return w;
}

VelocityPair eval_N(const FluidOps& ops, const GeometryMap& gm, const Vec& u1, const Vec& u2) {
    check_gap(gm);
    const FluidGrid& g = ops.g;
    (void)u2;
    VelocityPair n;
    n.u1.resize(g.n_u1());
    for (int i = 0; i <= g.nx; ++i) {
        const double c = -gm.etat[i] / (1.0 + gm.etat[i]);
        for (int k = 0; k < g.nz; ++k) n.u1[g.iu1(i, k)] = c * u1[g.iu1(i, k)];
    }
    Vec u1_at_u2 = ops.avg_u1_to_u2_eval * u1;
    n.u2.resize(g.n_u2());
    for (int i = 0; i < g.nx; ++i) {
        const double c = gm.etat_x_c[i] / (1.0 + gm.etat_c[i]);
        for (int k = 0; k <= g.nz; ++k) {
            const double z = g.s_c[i] * g.zeta_f(k);
            n.u2[g.iu2(i, k)] = z * c * u1_at_u2[g.iu2(i, k)];
        }
    }
    return n;
}

VelocityPair eval_M(const FluidOps& ops, const GeometryMap& gm, const Vec& u1, const Vec& u2) {
    VelocityPair n = eval_N(ops, gm, u1, u2);
    return {u1 + n.u1, u2 + n.u2};
}

VelocityPair eval_G(const FluidOps& ops, const GeometryMap& gm, const Vec& u1, const Vec& u2,
                    const Vec& p, const Vec& u1_prev, const Vec& u2_prev, double dt) {
    check_gap(gm);
    const FluidGrid& g = ops.g;
    const double nu = ops.nu;

    // derivative fields
    Vec u1x = ops.dx_u1 * u1, u1z = ops.dz_u1 * u1;
    Vec u1xx = ops.dx_u1 * u1x, u1zz = ops.dz_u1 * u1z, u1xz = ops.dz_u1 * u1x;
    Vec u2x = ops.dx_u2 * u2, u2z = ops.dz_u2 * u2;
    Vec u2xx = ops.dx_u2 * u2x, u2zz = ops.dz_u2 * u2z, u2xz = ops.dz_u2 * u2x;
    Vec px = ops.dxp_at_u1 * p, pz = ops.dzp_at_u1 * p;
    Vec u2_at_u1 = ops.avg_u2_to_u1 * u2;
    Vec u1_at_u2 = ops.avg_u1_to_u2_eval * u1;

    VelocityPair G;
    G.u1.resize(g.n_u1());
    for (int i = 0; i <= g.nx; ++i) {
        const double et = gm.etat[i], ex = gm.etat_x[i], exx = gm.etat_xx[i], tt = gm.etat_t[i];
        for (int k = 0; k < g.nz; ++k) {
            const int j = g.iu1(i, k);
            const double z = g.s_f[i] * g.zeta_c(k);
            const double ut = (u1[j] - u1_prev[j]) / dt;
            double v = -et * ut;
            v += (z * tt + nu * z * (ex * ex / (1.0 + et) - exx)) * u1z[j];
            v += nu * (-2.0 * z * ex * u1xz[j] + et * u1xx[j] +
                       (z * z * ex * ex - et) / (1.0 + et) * u1zz[j]);
            v += z * (ex * pz[j] - et * px[j]);
            v += -(1.0 + et) * u1[j] * u1x[j] + (z * ex * u1[j] - u2_at_u1[j]) * u1z[j];
            G.u1[j] = v;
        }
    }
    G.u2.resize(g.n_u2());
    for (int i = 0; i < g.nx; ++i) {
        const double et = gm.etat_c[i], ex = gm.etat_x_c[i], exx = gm.etat_xx_c[i],
                     tt = gm.etat_t_c[i];
        for (int k = 0; k <= g.nz; ++k) {
            const int j = g.iu2(i, k);
            const double z = g.s_c[i] * g.zeta_f(k);
            const double ut = (u2[j] - u2_prev[j]) / dt;
            double v = -et * ut;
            v += (z * tt + nu * z * (ex * ex / (1.0 + et) - exx)) * u2z[j];
            v += nu * (-2.0 * z * ex * u2xz[j] + et * u2xx[j] +
                       (z * z * ex * ex - et) / (1.0 + et) * u2zz[j]);
            v += -(1.0 + et) * u1_at_u2[j] * u2x[j] + (z * ex * u1_at_u2[j] - u2[j]) * u2z[j];
            G.u2[j] = v;
        }
    }
    return G;
}

Vec eval_Psi(const FluidOps& ops, const GeometryMap& gm, const Vec& u1, const Vec& u2) {
    check_gap(gm);
    const FluidGrid& g = ops.g;
    const double nu = ops.nu;
    const int nx = g.nx, nz = g.nz;

    // top traces: u1_z extrapolated to zeta=1 at the x-face stations,
    // u2_x and u2_z directly on the top zeta-faces
    Vec u1z = ops.dz_u1 * u1;
    Vec u2x = ops.dx_u2 * u2, u2z = ops.dz_u2 * u2;
    Vec u1z_top(nx + 1);
    for (int i = 0; i <= nx; ++i)
        u1z_top[i] = 1.5 * u1z[g.iu1(i, nz - 1)] - 0.5 * u1z[g.iu1(i, nz - 2)];
    auto faces_to_nodes = [&](auto getter) {
        Vec out(nx + 1);
        Vec f(nx);
        for (int i = 0; i < nx; ++i) f[i] = getter(i);
        for (int j = 1; j < nx; ++j) out[j] = 0.5 * (f[j - 1] + f[j]);
        out[0] = 1.5 * f[0] - 0.5 * f[1];
        out[nx] = 1.5 * f[nx - 1] - 0.5 * f[nx - 2];
        return out;
    };
    Vec u2x_top = faces_to_nodes([&](int i) { return u2x[g.iu2(i, nz)]; });
    Vec u2z_top = faces_to_nodes([&](int i) { return u2z[g.iu2(i, nz)]; });

    Vec psi(nx + 1);
    for (int j = 0; j <= nx; ++j) {
        const double et = gm.etat[j], ex = gm.etat_x[j], hx = gm.eta_x[j];
        const double z = g.s_f[j];  // top: z = s(x)
        psi[j] = nu * (hx / (1.0 + et) * u1z_top[j] + hx * u2x_top[j] -
                       (z * ex * hx - 2.0) / (1.0 + et) * u2z_top[j]);
    }
    return transport_trace(gm.profile, psi);
}

ThetaData eval_Theta(const FluidOps& ops, const Vec& u1, const Vec& u2) {
    const FluidGrid& g = ops.g;
    Vec u2_at_u1 = ops.avg_u2_to_u1 * u2;
    ThetaData th = ThetaData::zero(g);
    for (int k = 0; k < g.nz; ++k) {
        const int jl = g.iu1(0, k), jr = g.iu1(g.nx, k);
        th.left[k] = -0.5 * (u1[jl] * u1[jl] + u2_at_u1[jl] * u2_at_u1[jl]);
        th.right[k] = -0.5 * (u1[jr] * u1[jr] + u2_at_u1[jr] * u2_at_u1[jr]);
    }
    return th;
}

VelocityPair eval_F(const FluidOps& ops, const GeometryMap& gm, const GeometryMap& gm_prev,
                    const Vec& u1, const Vec& u2, const Vec& p, const Vec& u1_prev,
                    const Vec& u2_prev, double dt) {
    VelocityPair uh = eval_M(ops, gm, u1, u2);
    VelocityPair uh_prev = eval_M(ops, gm_prev, u1_prev, u2_prev);
    VelocityPair G = eval_G(ops, gm, uh.u1, uh.u2, p, uh_prev.u1, uh_prev.u2, dt);

    VelocityPair N = eval_N(ops, gm, u1, u2);
    VelocityPair N_prev = eval_N(ops, gm_prev, u1_prev, u2_prev);
    Vec lap1 = ops.lap_eval_u1 * N.u1;
    Vec lap2 = ops.lap_eval_u2 * N.u2;

    VelocityPair F;
    F.u1 = G.u1 - (N.u1 - N_prev.u1) / dt + ops.nu * lap1;
    F.u2 = G.u2 - (N.u2 - N_prev.u2) / dt + ops.nu * lap2;
    return F;
}

Vec eval_H(const FluidOps& ops, const GeometryMap& gm, const Vec& u1, const Vec& u2) {
    VelocityPair uh = eval_M(ops, gm, u1, u2);
    return eval_Psi(ops, gm, uh.u1, uh.u2);
}

} // namespace fsib
