#pragma once

#include "fsib/profile.hpp"

namespace fsib {

// MAC-staggered grid on the flattened reference channel. The reference domain
// Omega0 = {0<x<L, 0<z<1+eta0(x)} is mapped onto the unit-height rectangle by
// z = s(x)*zeta, s = 1+eta0, and gridded uniformly in (x,zeta):
//   u1 on x-faces (i, k+1/2), i=0..nx, k=0..nz-1   (physical x-velocity)
//   u2 on zeta-faces (i+1/2, k), i=0..nx-1, k=0..nz (physical z-velocity)
//   p  at centers (i+1/2, k+1/2)
// Boundary tags: left/right x-faces Gamma_i/Gamma_o, bottom zeta-faces
// Gamma_b, top zeta-faces Gamma_0. Beam nodes coincide with x-face stations,
// nb = nx+1. In rect mode s == 1 and everything reduces to the standard MAC
// scheme on (0,L)x(0,1).
struct FluidGrid {
    int nx = 0, nz = 0;
    double L = 1.0;
    double hx = 0.0, hz = 0.0;
    BeamProfile profile;
    bool rect = true;

    Vec s_f, sx_f;  // metric at x-face stations x_i (size nx+1)
    Vec s_c, sx_c;  // metric at center stations x_{i+1/2} (size nx)

    FluidGrid() = default;
    FluidGrid(const BeamProfile& prof, int nx_, int nz_);

    int n_u1() const { return (nx + 1) * nz; }
    int n_u2() const { return nx * (nz + 1); }
    int n_p() const { return nx * nz; }

    int iu1(int i, int k) const { return i * nz + k; }
    int iu2(int i, int k) const { return i * (nz + 1) + k; }
    int ip(int i, int k) const { return i * nz + k; }

    double x_f(int i) const { return i * hx; }
    double x_c(int i) const { return (i + 0.5) * hx; }
    double zeta_f(int k) const { return static_cast<double>(k) / nz; }
    double zeta_c(int k) const { return (k + 0.5) / nz; }

    // metric with mirror extension (s even, s_x odd) across all boundaries
    double sf(int i) const;
    double sxf(int i) const;
    double sc(int i) const;
    double sxc(int i) const;
};

// Staggered velocity/pressure arrays at one time level.
struct FluidState {
    Vec u1, u2, p;
    double t = 0.0;

    static FluidState zero(const FluidGrid& g, double t = 0.0);
};

} // namespace fsib
