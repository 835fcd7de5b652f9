#include "fsib/geometry.hpp"
#include "fsib/errors.hpp"

#include <cmath>

namespace fsib {

namespace {

Vec to_centers(const Vec& nodal) {
    const int n = static_cast<int>(nodal.size());
    Vec c(n - 1);
    for (int i = 0; i < n - 1; ++i) c[i] = 0.5 * (nodal[i] + nodal[i + 1]);
    return c;
}

Vec compact_dx(const Vec& nodal, double h) {
    const int n = static_cast<int>(nodal.size());
    Vec c(n - 1);
    for (int i = 0; i < n - 1; ++i) c[i] = (nodal[i + 1] - nodal[i]) / h;
    return c;
}

// linear interpolation of a nodal field at x in [0,L]
double interp(const BeamProfile& p, const Vec& f, double x) {
    const int n = static_cast<int>(f.size());
    const double h = p.L / (n - 1);
    if (x < 0.0 || x > p.L) throw DomainError("geometry: x outside [0,L]");
    int j = static_cast<int>(std::floor(x / h));
    if (j >= n - 1) j = n - 2;
    const double w = x / h - j;
    return (1.0 - w) * f[j] + w * f[j + 1];
}

} // namespace

GeometryMap build_geometry(const BeamProfile& profile, const Vec& eta, const Vec& eta_t) {
    const int n = profile.nodes();
    if (eta.size() != n || eta_t.size() != n)
        throw DimensionError("build_geometry: eta/eta_t must live on the beam grid");
    for (int j = 0; j < n; ++j)
        if (1.0 + eta[j] <= 0.0)
            throw CollisionError("build_geometry: 1 + eta <= 0 at node " + std::to_string(j),
                                 1.0 + eta[j]);

    GeometryMap gm;
    gm.profile = profile;
    gm.rect_mode = profile.is_rect();
    gm.eta = eta;
    gm.eta_t = eta_t;
    const double h = profile.h();
    gm.eta_x = fd_derivative(eta, h, 1);
    // ends are clamped: the derivative vanishes there exactly
    gm.eta_x[0] = gm.eta_x[n - 1] = 0.0;

    // the closed-form quotient, then stencils applied to it
    gm.etat = (eta - profile.eta0).array() / (1.0 + profile.eta0.array());
    gm.etat_t = eta_t.array() / (1.0 + profile.eta0.array());
    if ((eta - profile.eta0).lpNorm<Eigen::Infinity>() == 0.0) {
        gm.etat.setZero();  // keep etat == 0 exact when eta == eta0
    }
    gm.etat_x = fd_derivative(gm.etat, h, 1);
    gm.etat_x[0] = gm.etat_x[n - 1] = 0.0;
    gm.etat_xx = fd_derivative(gm.etat, h, 2);
    gm.etat_xxx = fd_derivative(gm.etat, h, 3);

    gm.etat_c = to_centers(gm.etat);
    gm.etat_x_c = compact_dx(gm.etat, h);
    gm.etat_xx_c = to_centers(gm.etat_xx);
    gm.etat_t_c = to_centers(gm.etat_t);
    gm.eta_x_c = compact_dx(eta, h);
    return gm;
}

std::pair<double, double> map_forward(const GeometryMap& gm, double x, double y) {
    const double s0 = 1.0 + interp(gm.profile, gm.profile.eta0, x);
    const double s = 1.0 + interp(gm.profile, gm.eta, x);
    return {x, s0 / s * y};
}

std::pair<double, double> map_inverse(const GeometryMap& gm, double x, double z) {
    const double s0 = 1.0 + interp(gm.profile, gm.profile.eta0, x);
    const double s = 1.0 + interp(gm.profile, gm.eta, x);
    return {x, s / s0 * z};
}

Vec transport_trace(const BeamProfile& profile, const Vec& g) {
    if (g.size() != profile.nodes())
        throw DimensionError("transport_trace: field must live on the top-boundary nodes");
    return g;  // nodewise relabeling (x,1+eta0(x)) -> (x,1)
}

Vec transport_trace_inverse(const BeamProfile& profile, const Vec& g) {
    if (g.size() != profile.nodes())
        throw DimensionError("transport_trace_inverse: field must live on the beam nodes");
    return g;
}

} // namespace fsib
