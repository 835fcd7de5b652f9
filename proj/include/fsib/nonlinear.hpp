#pragma once

#include "fsib/geometry.hpp"
#include "fsib/operators.hpp"
#include "fsib/stokes.hpp"

namespace fsib {

// Right-hand-side data of the linear coupled system at one time level:
// body force on the staggered faces, pressure data on Gamma_io, scalar load
// on the beam nodes.
struct RhsBundle {
    Vec f1, f2;
    ThetaData theta;
    Vec h;

    static RhsBundle zero(const FluidGrid& g) {
        return {Vec::Zero(g.n_u1()), Vec::Zero(g.n_u2()), ThetaData::zero(g),
                Vec::Zero(g.nx + 1)};
    }
};

struct VelocityPair {
    Vec u1, u2;
};

// w[u,eta] = -etat*u1*e1 + z*etat_x*u1*e2 (vanishes on the whole boundary
// when u1 = 0 on Gamma_d and the ends are clamped)
VelocityPair eval_w(const FluidOps& ops, const GeometryMap& gm, const Vec& u1, const Vec& u2);

// uhat = M(ubar,eta) = ubar + N(ubar,eta) componentwise:
//   M = ( ubar1/(1+etat), z*etat_x*ubar1/(1+etat) + ubar2 )
VelocityPair eval_M(const FluidOps& ops, const GeometryMap& gm, const Vec& u1, const Vec& u2);
VelocityPair eval_N(const FluidOps& ops, const GeometryMap& gm, const Vec& u1, const Vec& u2);

// All terms of the transformed momentum right-hand side G(uhat, phat, eta);
// uhat_t by backward difference against the previous level.
VelocityPair eval_G(const FluidOps& ops, const GeometryMap& gm, const Vec& u1, const Vec& u2,
                    const Vec& p, const Vec& u1_prev, const Vec& u2_prev, double dt);

// interface stress correction Psi(uhat, eta) on the beam nodes
Vec eval_Psi(const FluidOps& ops, const GeometryMap& gm, const Vec& u1, const Vec& u2);

// Bernoulli boundary data: Theta(ubar) = -(1/2)|ubar|^2 on Gamma_io, so that
// p = Theta reproduces the total-pressure condition p + |ubar|^2/2 = 0
ThetaData eval_Theta(const FluidOps& ops, const Vec& u1, const Vec& u2);

// F(ubar,p,eta) = G(M(ubar,eta),p,eta) - dN/dt + nu*Lap N
VelocityPair eval_F(const FluidOps& ops, const GeometryMap& gm, const GeometryMap& gm_prev,
                    const Vec& u1, const Vec& u2, const Vec& p, const Vec& u1_prev,
                    const Vec& u2_prev, double dt);

// H(ubar,eta) = Psi(M(ubar,eta), eta)
Vec eval_H(const FluidOps& ops, const GeometryMap& gm, const Vec& u1, const Vec& u2);

} // namespace fsib
