#pragma once

#include "fsib/profile.hpp"

namespace fsib {

// Change of variables between the moving channel and the reference channel:
//   T_eta(t) : (x,y) in Omega_eta  ->  (x,z),  z = (1+eta0(x))/(1+eta(x,t)) * y.
// Writing z = y/(1+etat) defines the relative displacement
//   etat = (eta - eta0)/(1 + eta0),
// which carries all the geometric nonlinearity: it vanishes identically when
// eta == eta0, and every metric coefficient below is polynomial/rational in
// etat and its derivatives.
struct GeometryMap {
    BeamProfile profile;  // reference shape (rect mode: eta0 == 0)
    bool rect_mode = true;

    // current interface state on beam nodes
    Vec eta, eta_t;
    Vec eta_x;  // d/dx of eta (used by the interface stress formula)

    // relative displacement and its discrete derivatives, on beam nodes
    Vec etat, etat_x, etat_xx, etat_xxx, etat_t;

    // the same fields interpolated to cell-center x positions (size N-1);
    // etat_x at centers uses the compact two-node difference
    Vec etat_c, etat_x_c, etat_xx_c, etat_t_c, eta_x_c;

    int nodes() const { return profile.nodes(); }
    double L() const { return profile.L; }
    // vertical stretching of the flattened grid: z = s(x) * zeta
    double s_node(int j) const { return 1.0 + profile.eta0[j]; }
    double min_gap() const { return (1.0 + eta.array()).minCoeff(); }
};

// Builds the map for a given interface state. Throws CollisionError when
// 1 + eta <= 0 anywhere, DimensionError on grid mismatch.
GeometryMap build_geometry(const BeamProfile& profile, const Vec& eta, const Vec& eta_t);

// Forward map (x,y) -> (x,z) and its inverse (x,z) -> (x,y); eta is evaluated
// between nodes by linear interpolation, so the two are exact inverses of each
// other to rounding. x must lie in [0,L].
std::pair<double, double> map_forward(const GeometryMap& gm, double x, double y);
std::pair<double, double> map_inverse(const GeometryMap& gm, double x, double z);

// Transport between the curved top boundary Gamma_0 and the flat beam line:
// (U g)(x) = g(x, 1+eta0(x)). On the discrete grid both boundaries carry the
// same x-nodes, so the operator is a nodewise relabeling and its inverse is
// itself.
Vec transport_trace(const BeamProfile& profile, const Vec& g_on_gamma0);
Vec transport_trace_inverse(const BeamProfile& profile, const Vec& g_on_gammas);

} // namespace fsib
