#include "fsib/norms.hpp"
#include "fsib/errors.hpp"

#include <cmath>

namespace fsib {

double fluid_l2(const FluidOps& ops, const Vec& u1, const Vec& u2) {
    return std::sqrt(dot_w(ops.w_u1, u1, u1) + dot_w(ops.w_u2, u2, u2));
}

double fluid_h1(const FluidOps& ops, const Vec& u1, const Vec& u2) {
    const double l2 = fluid_l2(ops, u1, u2);
    Vec d1x = ops.dx_u1 * u1, d1z = ops.dz_u1 * u1;
    Vec d2x = ops.dx_u2 * u2, d2z = ops.dz_u2 * u2;
    const double g2 = dot_w(ops.w_u1, d1x, d1x) + dot_w(ops.w_u1, d1z, d1z) +
                      dot_w(ops.w_u2, d2x, d2x) + dot_w(ops.w_u2, d2z, d2z);
    return std::sqrt(l2 * l2 + g2);
}

double fluid_h2(const FluidOps& ops, const Vec& u1, const Vec& u2) {
    const double h1 = fluid_h1(ops, u1, u2);
    Vec a = ops.dx_u1 * u1, b = ops.dz_u1 * u1;
    Vec c = ops.dx_u2 * u2, d = ops.dz_u2 * u2;
    Vec axx = ops.dx_u1 * a, azz = ops.dz_u1 * b, axz = ops.dz_u1 * a;
    Vec cxx = ops.dx_u2 * c, czz = ops.dz_u2 * d, cxz = ops.dz_u2 * c;
    const double s2 = dot_w(ops.w_u1, axx, axx) + dot_w(ops.w_u1, azz, azz) +
                      2 * dot_w(ops.w_u1, axz, axz) + dot_w(ops.w_u2, cxx, cxx) +
                      dot_w(ops.w_u2, czz, czz) + 2 * dot_w(ops.w_u2, cxz, cxz);
    return std::sqrt(h1 * h1 + s2);
}

double beam_sobolev(const BeamParams& p, const Vec& eta, int order) {
    const int n = p.nb;
    const double h = p.h();
    auto trapz2 = [&](const Vec& f) {
        double s = 0.0;
        for (int j = 0; j < f.size(); ++j) {
            const double w = (j == 0 || j == f.size() - 1) ? 0.5 * h : h;
            s += w * f[j] * f[j];
        }
        return s;
    };
    double total = trapz2(eta);
    Vec d = eta;
    for (int o = 1; o <= order; ++o) {
        d = fd_derivative(d, h, 1);
        total += trapz2(d);
    }
    (void)n;
    return std::sqrt(total);
}

double state_norm_sup(const FluidOps& ops, const BeamParams& p, const CoupledState& s,
                      const NormWeights& w) {
    return w.u_h1 * fluid_h1(ops, s.fluid.u1, s.fluid.u2) +
           w.eta_h2 * beam_sobolev(p, s.beam.eta, 2) +
           w.etat_l2 * beam_sobolev(p, s.beam.eta_t, 0);
}

double state_norm_l2t(const FluidOps& ops, const BeamParams& p, const CoupledState& s,
                      const NormWeights& w) {
    return w.u_h2 * fluid_h2(ops, s.fluid.u1, s.fluid.u2) +
           w.eta_h4 * beam_sobolev(p, s.beam.eta, 4);
}

double traj_norm(const FluidOps& ops, const BeamParams& p, const Trajectory& X,
                 const NormWeights& w) {
    double sup = 0.0, l2t = 0.0;
    for (const auto& s : X.levels) {
        sup = std::max(sup, state_norm_sup(ops, p, s, w));
        const double v = state_norm_l2t(ops, p, s, w);
        l2t += X.dt * v * v;
    }
    return sup + std::sqrt(l2t);
}

double traj_dist(const FluidOps& ops, const BeamParams& p, const Trajectory& A,
                 const Trajectory& B, const NormWeights& w) {
    if (A.levels.size() != B.levels.size())
        throw DimensionError("traj_dist: length mismatch");
    double sup = 0.0, l2t = 0.0;
    for (size_t n = 0; n < A.levels.size(); ++n) {
        CoupledState d;
        d.fluid = A.levels[n].fluid;
        d.fluid.u1 -= B.levels[n].fluid.u1;
        d.fluid.u2 -= B.levels[n].fluid.u2;
        d.fluid.p -= B.levels[n].fluid.p;
        d.beam = A.levels[n].beam;
        d.beam.eta -= B.levels[n].beam.eta;
        d.beam.eta_t -= B.levels[n].beam.eta_t;
        sup = std::max(sup, state_norm_sup(ops, p, d, w));
        const double v = state_norm_l2t(ops, p, d, w);
        l2t += A.dt * v * v;
    }
    return sup + std::sqrt(l2t);
}

} // namespace fsib
