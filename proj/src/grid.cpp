#include "fsib/grid.hpp"
#include "fsib/errors.hpp"

namespace fsib {

FluidGrid::FluidGrid(const BeamProfile& prof, int nx_, int nz_) {
    if (nx_ < 8 || nz_ < 8) throw DimensionError("grid: need nx, nz >= 8");
    if (prof.nodes() != nx_ + 1)
        throw DimensionError("grid: beam nodes must coincide with x-face stations (nb = nx+1)");
    nx = nx_;
    nz = nz_;
    L = prof.L;
    hx = L / nx;
    hz = 1.0 / nz;
    profile = prof;
    rect = prof.is_rect();

    s_f = (1.0 + prof.eta0.array()).matrix();
    sx_f = prof.eta0_x;
    s_c.resize(nx);
    sx_c.resize(nx);
    for (int i = 0; i < nx; ++i) {
        s_c[i] = 0.5 * (s_f[i] + s_f[i + 1]);
        sx_c[i] = (s_f[i + 1] - s_f[i]) / hx;
    }
}

double FluidGrid::sf(int i) const {
    if (i < 0) return s_f[-i];
    if (i > nx) return s_f[2 * nx - i];
    return s_f[i];
}
double FluidGrid::sxf(int i) const {
    if (i < 0) return -sx_f[-i];
    if (i > nx) return -sx_f[2 * nx - i];
    return sx_f[i];
}
double FluidGrid::sc(int i) const {
    if (i < 0) return s_c[-1 - i];
    if (i > nx - 1) return s_c[2 * nx - 1 - i];
    return s_c[i];
}
double FluidGrid::sxc(int i) const {
    if (i < 0) return -sx_c[-1 - i];
    if (i > nx - 1) return -sx_c[2 * nx - 1 - i];
    return sx_c[i];
}

FluidState FluidState::zero(const FluidGrid& g, double t) {
    FluidState s;
    s.u1 = Vec::Zero(g.n_u1());
    s.u2 = Vec::Zero(g.n_u2());
    s.p = Vec::Zero(g.n_p());
    s.t = t;
    return s;
}

} // namespace fsib
