#pragma once

#include <Eigen/Dense>
#include <optional>

namespace fsib {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct BeamParams {
    double alpha = 1.0;   // bending stiffness, > 0
    double beta = 0.5;    // tension, >= 0
    double gamma = 0.1;   // damping, > 0 (0 allowed only in eigenvalue tests)
    double L = 1.0;
    int nb = 33;

    void validate() const;
    double h() const { return L / (nb - 1); }
};

// Displacement/velocity of the clamped beam. End nodes satisfy
// eta = eta_t = 0; the slope condition eta_x = 0 enters through the ghost
// convention of the stencils (reflection across the clamp).
struct BeamState {
    Vec eta, eta_t;
    double t = 0.0;

    static BeamState zero(int nb, double t = 0.0);
};

// A_{alpha,beta} eta = beta*eta_xx - alpha*eta_xxxx with centered stencils and
// reflected ghost values; endpoints return 0 (constrained nodes).
Vec beam_operator_apply(const BeamParams& p, const Vec& eta);

// Interior (clamped) matrices, size (nb-2) x (nb-2):
//   stiffness K = -A_{alpha,beta}  (symmetric positive definite)
//   second difference D2 (Dirichlet rows)
// K coincides with the Galerkin matrix of the quadrature energy below, so the
// implicit Euler step dissipates beam_energy exactly.
Mat beam_stiffness(const BeamParams& p);
Mat beam_d2(const BeamParams& p);

struct BeamEnergy {
    double kinetic = 0.0;
    double potential = 0.0;
    double total() const { return kinetic + potential; }
};

// kinetic  = 1/2 ||eta_t||^2          (trapezoid)
// potential = 1/2 (beta ||eta_x||^2 + alpha ||eta_xx||^2)
//   with eta_x at midpoints (compact differences, midpoint rule) and eta_xx by
//   the ghost-closure second difference (trapezoid weights). These are the
//   quadratic forms of the step matrices.
BeamEnergy beam_energy(const BeamParams& p, const BeamState& s);

// One implicit Euler step of eta' = xi, M_a xi' = A eta + gamma*D2 xi + load:
//   (M_a + dt*gamma*(-D2) + dt^2*K) xi_new = M_a xi_n + dt*(A eta_n + load)
//   eta_new = eta_n + dt*xi_new.
// mass, when present, is (I + N_s) on interior nodes (symmetric positive
// definite). load lives on beam nodes (end values ignored).
BeamState beam_step(const BeamParams& p, const BeamState& s, const Vec& load, double dt,
                    const std::optional<Mat>& mass = std::nullopt);

// Crank-Nicolson variant (accuracy studies; config switch).
BeamState beam_step_cn(const BeamParams& p, const BeamState& s, const Vec& load, double dt,
                       const std::optional<Mat>& mass = std::nullopt);

} // namespace fsib
