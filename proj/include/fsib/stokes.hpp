#pragma once

#include "fsib/beam.hpp"
#include "fsib/elliptic.hpp"
#include "fsib/geometry.hpp"

#include <Eigen/SparseLU>
#include <map>
#include <memory>

namespace fsib {

// Pressure data on the inflow/outflow boundaries, one value per boundary face.
struct ThetaData {
    Vec left, right;  // size nz each
    static ThetaData zero(const FluidGrid& g) {
        return {Vec::Zero(g.nz), Vec::Zero(g.nz)};
    }
};

struct ProjectionResult {
    Vec u1, u2;     // projected field
    Vec potential;  // total potential phi with Pi u = u - grad phi (cells)
    Vec p_u, q_u;   // two-solve route components (filled when requested)
};

struct SteadyResult {
    FluidState state;  // velocity and final pressure p = p1 + R(theta)
    Vec p1;            // pressure of the lifted homogeneous problem
};

// Fluid core on one grid: divergence-free lifting, Leray projector,
// steady/unsteady Stokes with mixed Dirichlet/pressure boundary conditions,
// Neumann-to-Dirichlet operators, pressure decomposition.
//
// mirror_pair = true assembles the variant with ghost-pressure rows at both
// ends (used for the mirrored-doubled problem of the symmetry harness, whose
// operator must commute with the reflection).
class StokesSolver {
public:
    StokesSolver(const FluidGrid& grid, double nu, double tol = 1e-10,
                 bool mirror_pair = false);

    const FluidGrid& grid() const { return g_; }
    const FluidOps& ops() const { return ops_; }
    double nu() const { return nu_; }
    double tol() const { return tol_; }
    const PotentialSolver& potential() const { return potential_; }
    const DirichletPoisson& lifting() const { return lifting_; }

    // divergence-free extension of the top trace g (values at the nx top-face
    // stations): corner-based stream function phi = G(x)*S(zeta), exact zero
    // discrete divergence, exact top trace
    FluidState lift_divfree(const Vec& g_top) const;

    // Leray projector onto {div u = 0, u.n = 0 on Gamma_d}; two_solves
    // selects the split p_u/q_u route (the production path is the single
    // mixed solve; both give the same projection)
    ProjectionResult leray_project(const Vec& u1, const Vec& u2, bool two_solves = false) const;

    // steady Stokes: -nu Lap u + grad p = f, div u = 0, u = g e2 on Gamma_0,
    // u = 0 on Gamma_b, u2 = 0 and p = h on Gamma_io
    SteadyResult solve_steady(const Vec& f1, const Vec& f2, const Vec& g_top,
                              const ThetaData& h) const;

    // one implicit Euler step of the unsteady system with the same BCs
    FluidState unsteady_step(const FluidState& state, const Vec& f1, const Vec& f2,
                             const Vec& g_top, const ThetaData& theta, double dt) const;

    // Dirichlet lifting operator D (steady solve with f = 0, h = 0)
    SteadyResult dirichlet_lift(const Vec& g_top) const {
        return solve_steady(Vec::Zero(g_.n_u1()), Vec::Zero(g_.n_u2()), g_top,
                            ThetaData::zero(g_));
    }

    // added-mass operator N_s on beam nodes (nb x nb), symmetric nonnegative
    // by construction (flux injection paired with the adjacent-cell trace)
    Mat assemble_Ns() const;

    // N_0: harmonic extension of Neumann data on Gamma_d, transported top trace
    // (linear extrapolation) on beam nodes
    Vec apply_N0(const Vec& v_top, const Vec& v_bottom) const;

    // harmonic pressure lifting R(theta) as a cell field
    Vec lift_theta(const ThetaData& theta) const {
        return lifting_.harmonic_lift(theta.left, theta.right);
    }

    // pressure decomposition p1 = rho - q_t + p_F of one trajectory level;
    // q_prev is the potential of the previous level (empty on the first)
    struct PressureParts {
        Vec rho, q, p_F;     // cell fields
        double residual;     // ||p1 - (rho - q_t + p_F)||_w / sqrt(vol)
    };
    PressureParts decompose_pressure(const FluidState& state, const Vec& theta_lift,
                                     const Vec& g_top, const Vec& f1, const Vec& f2,
                                     const Vec& q_prev, double dt) const;

    // boundary-condition / divergence diagnostics
    double max_divergence(const Vec& u1, const Vec& u2) const;

private:
    struct Assembled {
        SpMat A;
        Eigen::SparseLU<SpMat> lu;
    };

    FluidGrid g_;
    FluidOps ops_;
    double nu_, tol_;
    bool mirror_pair_ = false;
    DirichletPoisson lifting_;
    PotentialSolver potential_;

    // full-Dirichlet potential operator (two-solve projector route)
    SpMat a_dir_;
    SpMat gdir_x_, gdir_z_;
    Eigen::SparseLU<SpMat> lu_dir_;

    std::shared_ptr<Assembled> steady_;
    mutable std::map<long long, std::shared_ptr<Assembled>> unsteady_;  // key: dt bits

    int n_total() const { return g_.n_u1() + g_.n_u2() + g_.n_p(); }
    SpMat assemble_fluid(double inv_dt) const;
    const Assembled& unsteady_for(double dt) const;
    Vec solve_fluid(const Assembled& sys, const Vec& rhs) const;
    Vec rhs_fluid(const Vec& f1, const Vec& f2, const Vec& g_top, const Vec& r_theta,
                  const FluidState* prev, double inv_dt) const;
};

// stream-function vertical cutoff: 0 below 1-delta, 1 above 1-delta/2,
// C^2 quintic ramp between
double lift_cutoff(double zeta, double delta);
double lift_cutoff_delta(const BeamProfile& profile);

} // namespace fsib
