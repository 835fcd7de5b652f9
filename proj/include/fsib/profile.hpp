#pragma once

#include <Eigen/Dense>
#include <string>

namespace fsib {

using Vec = Eigen::VectorXd;

// Reference interface shape eta0 sampled on the beam grid (nodes x_j = j*L/(N-1)),
// together with its discrete derivatives. The reference channel is
//   Omega0 = { (x,z) : 0 < x < L, 0 < z < 1 + eta0(x) }.
// Clamped: eta0 = eta0_x = 0 at both ends; 1 + eta0 > 0 everywhere.
struct BeamProfile {
    double L = 1.0;
    Vec eta0;      // nodal values, size N
    Vec eta0_x;    // discrete d/dx
    Vec eta0_xx;
    Vec eta0_xxx;

    int nodes() const { return static_cast<int>(eta0.size()); }
    double h() const { return L / (nodes() - 1); }
    bool is_rect() const;               // eta0 identically zero
    double min_gap() const;             // min over nodes of 1 + eta0
    double node_x(int j) const { return L * j / (nodes() - 1); }
};

// Validates invariants and fills the derivative fields by finite differences
// (interior central stencils, one-sided at the ends, 4-point one-sided third
// derivative at the nodes adjacent to the clamps).
BeamProfile make_profile(double L, const Vec& eta0_nodes);

// eta0 == 0: the reference configuration is the unit-height rectangle.
BeamProfile rect_profile(double L, int nodes);

// eta0(x) = a * 16 x^2 (L-x)^2 / L^4  (clamped bump, max value a at x = L/2).
BeamProfile bump_profile(double L, int nodes, double amplitude);

// eta0(x) = sum_k c_k x^k, validated for clamping at both ends.
BeamProfile poly_profile(double L, int nodes, const Vec& coeffs);

// Derivative tables for finite-difference fields on a uniform grid.
// Central interior stencils; one-sided closures at the ends.
Vec fd_derivative(const Vec& f, double h, int order);

} // namespace fsib
