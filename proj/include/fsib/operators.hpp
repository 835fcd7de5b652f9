#pragma once

#include "fsib/grid.hpp"

#include <Eigen/Sparse>

namespace fsib {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// Sparse operator set for one grid. Everything is assembled once and cached;
// rect mode is the identity metric and reproduces the classical MAC stencils.
//
// Conventions:
//  * div rows give the physical divergence per cell, computed in contravariant
//    flux form: div = (1/s_c)[ d/dx(s_f u1) + d/dz(u2 - zeta*s_x*avg4(u1)) ],
//    so a discrete stream function yields exactly zero divergence. The u1
//    trace entering the top/bottom flux is the homogeneous Dirichlet value of
//    the problem class (u1 = 0 on Gamma_b and Gamma_0).
//  * grad_px/grad_pz are the pressure-gradient blocks of the momentum rows.
//    Rows at Gamma_io x-faces are zero: the boundary momentum row is the
//    mirror reduction of the interior stencil (the natural condition
//    nu*u1_x = p1 = 0 of the lifted variational form). Rows at top/bottom
//    u2-faces are zero (those are boundary-condition rows).
//  * lap_u1/lap_u2 are the componentwise physical Laplacians in finite-volume
//    box form with homogeneous Dirichlet ghosts folded in (u1 = 0 on
//    Gamma_b/Gamma_0, even across Gamma_io; u2 = 0 on Gamma_io via odd
//    ghosts), metric reflected (s even, s_x odd) across boundaries.
//  * gproj_x/gproj_z form the negative vol-adjoint of div with the boundary
//    u2 columns removed; a_pot = -(div o gproj) is then symmetric positive
//    definite in the vol inner product and is the potential operator of the
//    projector (Dirichlet 0 on Gamma_io, zero-flux closure on Gamma_d).
struct FluidOps {
    FluidGrid g;
    double nu = 1.0;

    SpMat div1, div2;        // n_p x n_u1 / n_p x n_u2
    SpMat grad_px;           // n_u1 x n_p (left end do-nothing, right end ghost-p)
    SpMat grad_px_dd;        // variant with ghost-p rows at both ends (harness)
    SpMat grad_pz;           // n_u2 x n_p
    SpMat lap_u1;            // n_u1 x n_u1
    SpMat lap_u2;            // n_u2 x n_u2
    SpMat gproj_x, gproj_z;  // n_u1 x n_p / n_u2 x n_p
    SpMat a_pot;             // n_p x n_p, SPD (vol-weighted)

    SpMat avg_u1_to_u2;      // n_u2 x n_u1 (4-point; boundary rows use traces)
    SpMat avg_u2_to_u1;      // n_u1 x n_u2

    // one-sided/interior evaluation derivatives (no boundary conditions
    // assumed), used for right-hand-side evaluation: d/dx, d/dz physical
    SpMat dx_u1, dz_u1, dx_u2, dz_u2;   // same staggering in/out
    SpMat dxp_at_u1, dzp_at_u1;         // n_u1 x n_p (pressure derivatives)
    SpMat dzp_at_u2;                    // n_u2 x n_p (compact, interior rows)
    SpMat lap_eval_u1, lap_eval_u2;     // composed, BC-free

    SpMat avg_u1_to_u2_eval;  // like avg_u1_to_u2 but extrapolating at k=0,nz
    SpMat trace_top_p;        // nx x n_p: p extrapolated to the top boundary
    SpMat trace_io_p;         // 2*nz x n_p: p extrapolated to Gamma_i (first nz) and Gamma_o

    // inner-product weights (diagonal): physical volumes, trapezoid at the
    // staggered boundaries
    Vec w_u1, w_u2, w_p;

    explicit FluidOps(const FluidGrid& grid, double nu_);

    // boundary flux of a velocity field through Gamma_d (top: k=nz faces,
    // bottom: k=0), in contravariant form; for u1,u2 arrays these are just
    // the u2 values there
    Vec flux_top(const Vec& u2) const;
    Vec flux_bottom(const Vec& u2) const;
};

// trapezoid/midpoint quadrature inner products
double dot_w(const Vec& w, const Vec& a, const Vec& b);

} // namespace fsib
