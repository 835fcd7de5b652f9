#pragma once

#include "fsib/operators.hpp"

#include <Eigen/SparseLU>
#include <memory>

namespace fsib {

// Solves a_pot * phi = rhs (Dirichlet 0 on Gamma_io through the operator,
// Neumann data entering the right-hand side in flux form). Shared by the
// Leray projector, the Neumann-to-Dirichlet operators and the pressure
// decomposition. Factorized once per grid.
class PotentialSolver {
public:
    PotentialSolver(const FluidOps& ops, double tol);

    Vec solve(const Vec& rhs_cells) const;

    // right-hand side of the harmonic problem with prescribed contravariant
    // fluxes through Gamma_0 (top) and Gamma_b (bottom); both are fluxes in
    // the +zeta direction (outward on top, inward on the bottom)
    Vec flux_rhs(const Vec& flux_top, const Vec& flux_bottom) const;

    const FluidOps& ops() const { return *ops_; }

private:
    const FluidOps* ops_;
    double tol_;
    Eigen::SparseLU<SpMat> lu_;
};

// Finite-volume cell Poisson solve with Dirichlet data on Gamma_io (imposed
// at ghost centers via linear extrapolation through the boundary face) and
// prescribed fluxes on top/bottom. This is the lifting operator R for the
// boundary pressure data.
class DirichletPoisson {
public:
    DirichletPoisson(const FluidGrid& grid, double tol);

    // theta_left/theta_right: Dirichlet values per boundary face (size nz);
    // flux_top/flux_bottom: size nx (pass zero vectors for the harmonic lift)
    Vec solve(const Vec& theta_left, const Vec& theta_right,
              const Vec& flux_top, const Vec& flux_bottom) const;

    Vec harmonic_lift(const Vec& theta_left, const Vec& theta_right) const {
        return solve(theta_left, theta_right, Vec::Zero(g_.nx), Vec::Zero(g_.nx));
    }

private:
    FluidGrid g_;
    double tol_;
    SpMat A_;
    // Dirichlet data enters the RHS through these maps
    SpMat bleft_, bright_;  // n_p x nz
    Eigen::SparseLU<SpMat> lu_;
};

} // namespace fsib
