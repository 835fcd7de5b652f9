#include "fsib/operators.hpp"
#include "fsib/errors.hpp"

#include <cassert>
#include <vector>

namespace fsib {

namespace {

using TripVec = std::vector<Triplet>;

// Stencil references outside the DOF range are resolved through the boundary
// conventions of the problem class:
//   u1: even across Gamma_io (natural condition u1_x = 0 of the lifted weak
//       form), Dirichlet-0 linear ghosts across Gamma_b/Gamma_0
//   u2: odd across Gamma_io (u2 = 0 there), linear reflection through the
//       boundary DOFs at k = 0, nz
void add_u1(TripVec& T, int row, const FluidGrid& g, int i, int k, double c) {
    if (c == 0.0) return;
    if (i < 0) { add_u1(T, row, g, -i, k, c); return; }
    if (i > g.nx) { add_u1(T, row, g, 2 * g.nx - i, k, c); return; }
    if (k < 0) { add_u1(T, row, g, i, -1 - k, -c); return; }
    if (k > g.nz - 1) { add_u1(T, row, g, i, 2 * g.nz - 1 - k, -c); return; }
    T.emplace_back(row, g.iu1(i, k), c);
}

void add_u2(TripVec& T, int row, const FluidGrid& g, int i, int k, double c) {
    if (c == 0.0) return;
    if (i < 0) { add_u2(T, row, g, -1 - i, k, -c); return; }
    if (i > g.nx - 1) { add_u2(T, row, g, 2 * g.nx - 1 - i, k, -c); return; }
    if (k < 0) {
        add_u2(T, row, g, i, 0, 2 * c);
        add_u2(T, row, g, i, -k, -c);
        return;
    }
    if (k > g.nz) {
        add_u2(T, row, g, i, g.nz, 2 * c);
        add_u2(T, row, g, i, 2 * g.nz - k, -c);
        return;
    }
    T.emplace_back(row, g.iu2(i, k), c);
}

void add_p(TripVec& T, int row, const FluidGrid& g, int i, int k, double c) {
    if (c == 0.0) return;
    assert(k >= 0 && k <= g.nz - 1);
    if (i < 0) { add_p(T, row, g, -1 - i, k, c); return; }
    if (i > g.nx - 1) { add_p(T, row, g, 2 * g.nx - 1 - i, k, c); return; }
    T.emplace_back(row, g.ip(i, k), c);
}

SpMat from_triplets(int rows, int cols, const TripVec& T) {
    SpMat m(rows, cols);
    m.setFromTriplets(T.begin(), T.end());
    m.makeCompressed();
    return m;
}

// derivative weights at evaluation point 0 from sample offsets (Vandermonde)
Eigen::VectorXd fd_weights(const Eigen::VectorXd& offsets, int order) {
    const int n = static_cast<int>(offsets.size());
    Eigen::MatrixXd V(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) V(r, c) = std::pow(offsets[c], r);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    double fact = 1.0;
    for (int j = 2; j <= order; ++j) fact *= j;
    rhs[order] = fact;
    return V.fullPivLu().solve(rhs);
}

} // namespace

double dot_w(const Vec& w, const Vec& a, const Vec& b) {
    return (w.array() * a.array() * b.array()).sum();
}

FluidOps::FluidOps(const FluidGrid& grid, double nu_) : g(grid), nu(nu_) {
    const int nx = g.nx, nz = g.nz;
    const double hx = g.hx, hz = g.hz;

    // ---- inner-product weights -------------------------------------------
    w_u1.resize(g.n_u1());
    for (int i = 0; i <= nx; ++i)
        for (int k = 0; k < nz; ++k)
            w_u1[g.iu1(i, k)] = g.s_f[i] * hx * hz * ((i == 0 || i == nx) ? 0.5 : 1.0);
    w_u2.resize(g.n_u2());
    for (int i = 0; i < nx; ++i)
        for (int k = 0; k <= nz; ++k)
            w_u2[g.iu2(i, k)] = g.s_c[i] * hx * hz * ((k == 0 || k == nz) ? 0.5 : 1.0);
    w_p.resize(g.n_p());
    for (int i = 0; i < nx; ++i)
        for (int k = 0; k < nz; ++k) w_p[g.ip(i, k)] = g.s_c[i] * hx * hz;

    // ---- divergence (contravariant flux form) ----------------------------
    {
        TripVec T1, T2;
        for (int i = 0; i < nx; ++i) {
            for (int k = 0; k < nz; ++k) {
                const int row = g.ip(i, k);
                const double inv = 1.0 / g.s_c[i];
                add_u1(T1, row, g, i + 1, k, g.s_f[i + 1] * inv / hx);
                add_u1(T1, row, g, i, k, -g.s_f[i] * inv / hx);
                // Q2 at zeta-faces k and k+1
                for (int kk : {k + 1, k}) {
                    const double sgn = (kk == k + 1) ? 1.0 : -1.0;
                    add_u2(T2, row, g, i, kk, sgn * inv / hz);
                    if (kk > 0 && kk < nz) {
                        const double cf = -g.zeta_f(kk) * g.sx_c[i] * 0.25;
                        for (int ii : {i, i + 1})
                            for (int dk : {kk - 1, kk})
                                add_u1(T1, row, g, ii, dk, sgn * cf * inv / hz);
                    }
                }
            }
        }
        div1 = from_triplets(g.n_p(), g.n_u1(), T1);
        div2 = from_triplets(g.n_p(), g.n_u2(), T2);
    }

    // ---- 4-point averages between the two face families ------------------
    {
        TripVec T;
        for (int i = 0; i < nx; ++i)
            for (int k = 1; k < nz; ++k) {
                const int row = g.iu2(i, k);
                for (int ii : {i, i + 1})
                    for (int dk : {k - 1, k}) add_u1(T, row, g, ii, dk, 0.25);
            }
        avg_u1_to_u2 = from_triplets(g.n_u2(), g.n_u1(), T);
    }
    {
        TripVec T;
        for (int i = 0; i <= nx; ++i)
            for (int k = 0; k < nz; ++k) {
                const int row = g.iu1(i, k);
                for (int ii : {i - 1, i})
                    for (int kk : {k, k + 1}) add_u2(T, row, g, ii, kk, 0.25);
            }
        avg_u2_to_u1 = from_triplets(g.n_u1(), g.n_u2(), T);
    }

    // ---- momentum pressure gradients --------------------------------------
    // Interior faces: compact difference + metric cross term. The boundary
    // rows realize the natural conditions of the lifted weak form: at Gamma_i
    // the do-nothing reduction has no pressure action (mirror of the interior
    // stencil), at Gamma_o the homogeneous Dirichlet value enters through the
    // ghost center, -2 p(nx-1,k)/hx, which is also the vol-adjoint row of the
    // flux divergence. grad_px_dd carries ghost-p rows at both ends (used for
    // the mirrored-doubled problem of the symmetry harness).
    {
        TripVec T, Tdd;
        for (int i = 1; i < nx; ++i) {
            for (int k = 0; k < nz; ++k) {
                const int row = g.iu1(i, k);
                add_p(T, row, g, i, k, 1.0 / hx);
                add_p(T, row, g, i - 1, k, -1.0 / hx);
                const double cf = -g.zeta_c(k) * g.sx_f[i] / g.s_f[i];
                if (cf != 0.0) {
                    for (int ii : {i - 1, i}) {
                        if (k >= 1 && k <= nz - 2) {
                            add_p(T, row, g, ii, k + 1, cf * 0.5 / (2 * hz));
                            add_p(T, row, g, ii, k - 1, -cf * 0.5 / (2 * hz));
                        } else if (k == 0) {
                            add_p(T, row, g, ii, 0, cf * 0.5 * (-3.0) / (2 * hz));
                            add_p(T, row, g, ii, 1, cf * 0.5 * (4.0) / (2 * hz));
                            add_p(T, row, g, ii, 2, cf * 0.5 * (-1.0) / (2 * hz));
                        } else {
                            add_p(T, row, g, ii, nz - 1, cf * 0.5 * (3.0) / (2 * hz));
                            add_p(T, row, g, ii, nz - 2, cf * 0.5 * (-4.0) / (2 * hz));
                            add_p(T, row, g, ii, nz - 3, cf * 0.5 * (1.0) / (2 * hz));
                        }
                    }
                }
            }
        }
        Tdd = T;
        for (int k = 0; k < nz; ++k) {
            add_p(T, g.iu1(nx, k), g, nx - 1, k, -2.0 / hx);
            add_p(Tdd, g.iu1(nx, k), g, nx - 1, k, -2.0 / hx);
            add_p(Tdd, g.iu1(0, k), g, 0, k, 2.0 / hx);
        }
        grad_px = from_triplets(g.n_u1(), g.n_p(), T);
        grad_px_dd = from_triplets(g.n_u1(), g.n_p(), Tdd);
    }
    {
        TripVec T;
        for (int i = 0; i < nx; ++i)
            for (int k = 1; k < nz; ++k) {
                const int row = g.iu2(i, k);
                const double inv = 1.0 / (g.s_c[i] * hz);
                add_p(T, row, g, i, k, inv);
                add_p(T, row, g, i, k - 1, -inv);
            }
        grad_pz = from_triplets(g.n_u2(), g.n_p(), T);
    }

    // ---- viscous Laplacians (finite-volume boxes) -------------------------
    {
        TripVec T;
        for (int i = 0; i <= nx; ++i) {
            for (int k = 0; k < nz; ++k) {
                const int row = g.iu1(i, k);
                // x-edges of the box at centers i-1/2 (index i-1) and i+1/2 (index i)
                for (int e : {i - 1, i}) {
                    const double sgn = (e == i) ? 1.0 : -1.0;  // outward difference
                    const double k11 = g.sc(e);
                    const double k12 = -g.sxc(e) * g.zeta_c(k);
                    const double f = sgn / (hx * g.s_f[i]);
                    add_u1(T, row, g, e + 1, k, f * k11 / hx);
                    add_u1(T, row, g, e, k, -f * k11 / hx);
                    for (int ii : {e, e + 1}) {
                        add_u1(T, row, g, ii, k + 1, f * k12 / (4 * hz));
                        add_u1(T, row, g, ii, k - 1, -f * k12 / (4 * hz));
                    }
                }
                // zeta-edges at node heights k and k+1
                for (int e : {k, k + 1}) {
                    const double sgn = (e == k + 1) ? 1.0 : -1.0;
                    const double zf = g.zeta_f(e);
                    const double k21 = -g.sxf(i) * zf;
                    const double k22 = (1.0 + g.sxf(i) * g.sxf(i) * zf * zf) / g.sf(i);
                    const double f = sgn / (hz * g.s_f[i]);
                    add_u1(T, row, g, i, e, f * k22 / hz);
                    add_u1(T, row, g, i, e - 1, -f * k22 / hz);
                    for (int kk : {e - 1, e}) {
                        add_u1(T, row, g, i + 1, kk, f * k21 / (4 * hx));
                        add_u1(T, row, g, i - 1, kk, -f * k21 / (4 * hx));
                    }
                }
            }
        }
        lap_u1 = from_triplets(g.n_u1(), g.n_u1(), T);
    }
    {
        TripVec T;
        for (int i = 0; i < nx; ++i) {
            for (int k = 1; k < nz; ++k) {  // rows k=0,nz are BC rows
                const int row = g.iu2(i, k);
                const double zf = g.zeta_f(k);
                for (int e : {i, i + 1}) {
                    const double sgn = (e == i + 1) ? 1.0 : -1.0;
                    const double k11 = g.sf(e);
                    const double k12 = -g.sxf(e) * zf;
                    const double f = sgn / (hx * g.s_c[i]);
                    add_u2(T, row, g, e, k, f * k11 / hx);
                    add_u2(T, row, g, e - 1, k, -f * k11 / hx);
                    for (int ii : {e - 1, e}) {
                        add_u2(T, row, g, ii, k + 1, f * k12 / (4 * hz));
                        add_u2(T, row, g, ii, k - 1, -f * k12 / (4 * hz));
                    }
                }
                for (int e : {k - 1, k}) {  // zeta-edges at center heights
                    const double sgn = (e == k) ? 1.0 : -1.0;
                    const double zc = g.zeta_c(e);
                    const double k21 = -g.sxc(i) * zc;
                    const double k22 = (1.0 + g.sxc(i) * g.sxc(i) * zc * zc) / g.sc(i);
                    const double f = sgn / (hz * g.s_c[i]);
                    add_u2(T, row, g, i, e + 1, f * k22 / hz);
                    add_u2(T, row, g, i, e, -f * k22 / hz);
                    for (int kk : {e, e + 1}) {
                        add_u2(T, row, g, i + 1, kk, f * k21 / (4 * hx));
                        add_u2(T, row, g, i - 1, kk, -f * k21 / (4 * hx));
                    }
                }
            }
        }
        lap_u2 = from_triplets(g.n_u2(), g.n_u2(), T);
    }

    // ---- projector gradient: negative vol-adjoint of div ------------------
    {
        SpMat voldiv1 = w_p.asDiagonal() * div1;
        SpMat div2r = div2;
        // remove the top/bottom u2 columns: those fluxes are data, not DOFs
        for (int i = 0; i < nx; ++i)
            for (int k : {0, nz})
                for (SpMat::InnerIterator it(div2r, g.iu2(i, k)); it; ++it) it.valueRef() = 0.0;
        div2r.prune(0.0);
        SpMat voldiv2 = w_p.asDiagonal() * div2r;
        SpMat t1 = voldiv1.transpose();
        SpMat t2 = voldiv2.transpose();
        gproj_x = w_u1.cwiseInverse().asDiagonal() * t1;
        gproj_x *= -1.0;
        gproj_z = w_u2.cwiseInverse().asDiagonal() * t2;
        gproj_z *= -1.0;
        a_pot = div1 * gproj_x + div2 * gproj_z;
        a_pot *= -1.0;
        a_pot.makeCompressed();
    }

    // ---- evaluation derivatives (no boundary conditions) ------------------
    auto comp_deriv = [&](int n, double h, int pos, int last) {
        // centered interior, one-sided 3-point second order at the edges
        Eigen::Vector3d w;
        Eigen::Vector3i idx;
        if (pos == 0) {
            w << -3.0 / (2 * h), 4.0 / (2 * h), -1.0 / (2 * h);
            idx << 0, 1, 2;
        } else if (pos == last) {
            w << 3.0 / (2 * h), -4.0 / (2 * h), 1.0 / (2 * h);
            idx << last, last - 1, last - 2;
        } else {
            w << -1.0 / (2 * h), 0.0, 1.0 / (2 * h);
            idx << pos - 1, pos, pos + 1;
        }
        (void)n;
        return std::make_pair(w, idx);
    };

    {   // u1 staggering: i in [0,nx], k in [0,nz-1]
        TripVec TX, TZ;
        for (int i = 0; i <= nx; ++i)
            for (int k = 0; k < nz; ++k) {
                const int row = g.iu1(i, k);
                auto [wx, ix] = comp_deriv(nx + 1, hx, i, nx);
                auto [wz, iz] = comp_deriv(nz, hz, k, nz - 1);
                const double cf = -g.zeta_c(k) * g.sx_f[i] / g.s_f[i];
                for (int m = 0; m < 3; ++m) {
                    TX.emplace_back(row, g.iu1(ix[m], k), wx[m]);
                    TX.emplace_back(row, g.iu1(i, iz[m]), cf * wz[m]);
                    TZ.emplace_back(row, g.iu1(i, iz[m]), wz[m] / g.s_f[i]);
                }
            }
        dx_u1 = from_triplets(g.n_u1(), g.n_u1(), TX);
        dz_u1 = from_triplets(g.n_u1(), g.n_u1(), TZ);
    }
    {   // u2 staggering: i in [0,nx-1], k in [0,nz]
        TripVec TX, TZ;
        for (int i = 0; i < nx; ++i)
            for (int k = 0; k <= nz; ++k) {
                const int row = g.iu2(i, k);
                auto [wx, ix] = comp_deriv(nx, hx, i, nx - 1);
                auto [wz, iz] = comp_deriv(nz + 1, hz, k, nz);
                const double cf = -g.zeta_f(k) * g.sx_c[i] / g.s_c[i];
                for (int m = 0; m < 3; ++m) {
                    TX.emplace_back(row, g.iu2(ix[m], k), wx[m]);
                    TX.emplace_back(row, g.iu2(i, iz[m]), cf * wz[m]);
                    TZ.emplace_back(row, g.iu2(i, iz[m]), wz[m] / g.s_c[i]);
                }
            }
        dx_u2 = from_triplets(g.n_u2(), g.n_u2(), TX);
        dz_u2 = from_triplets(g.n_u2(), g.n_u2(), TZ);
    }
    {   // pressure derivatives evaluated at x-faces
        TripVec TX, TZ;
        Eigen::VectorXd off3(3);
        for (int i = 0; i <= nx; ++i)
            for (int k = 0; k < nz; ++k) {
                const int row = g.iu1(i, k);
                // d/dx at face station x_f(i) from center columns
                if (i >= 1 && i <= nx - 1) {
                    TX.emplace_back(row, g.ip(i, k), 1.0 / hx);
                    TX.emplace_back(row, g.ip(i - 1, k), -1.0 / hx);
                } else {
                    const int i0 = (i == 0) ? 0 : nx - 3;
                    off3 << g.x_c(i0) - g.x_f(i), g.x_c(i0 + 1) - g.x_f(i), g.x_c(i0 + 2) - g.x_f(i);
                    Eigen::VectorXd wq = fd_weights(off3, 1);
                    for (int m = 0; m < 3; ++m) TX.emplace_back(row, g.ip(i0 + m, k), wq[m]);
                }
                // d/dzeta at the face, interpolated from the two neighbor columns
                auto [wz, iz] = comp_deriv(nz, hz, k, nz - 1);
                const double cf = -g.zeta_c(k) * g.sx_f[i] / g.s_f[i];
                for (int m = 0; m < 3; ++m) {
                    const double wcol = 0.5 * wz[m];
                    for (int ii : {i - 1, i}) {
                        int ic = std::min(std::max(ii, 0), nx - 1);
                        TZ.emplace_back(row, g.ip(ic, iz[m]), wcol / g.s_f[i]);
                        TX.emplace_back(row, g.ip(ic, iz[m]), cf * wcol);
                    }
                }
            }
        dxp_at_u1 = from_triplets(g.n_u1(), g.n_p(), TX);
        dzp_at_u1 = from_triplets(g.n_u1(), g.n_p(), TZ);
    }
    lap_eval_u1 = dx_u1 * dx_u1 + dz_u1 * dz_u1;
    lap_eval_u2 = dx_u2 * dx_u2 + dz_u2 * dz_u2;
    lap_eval_u1.makeCompressed();
    lap_eval_u2.makeCompressed();

    {   // compact vertical pressure derivative at interior zeta-faces
        TripVec T;
        for (int i = 0; i < nx; ++i)
            for (int k = 1; k < nz; ++k) {
                const int row = g.iu2(i, k);
                const double inv = 1.0 / (g.s_c[i] * hz);
                add_p(T, row, g, i, k, inv);
                add_p(T, row, g, i, k - 1, -inv);
            }
        dzp_at_u2 = from_triplets(g.n_u2(), g.n_p(), T);
    }
    {   // evaluation average with extrapolated top/bottom rows
        TripVec T;
        for (int i = 0; i < nx; ++i)
            for (int k = 0; k <= nz; ++k) {
                const int row = g.iu2(i, k);
                if (k >= 1 && k <= nz - 1) {
                    for (int ii : {i, i + 1})
                        for (int dk : {k - 1, k}) add_u1(T, row, g, ii, dk, 0.25);
                } else if (k == 0) {
                    for (int ii : {i, i + 1}) {
                        add_u1(T, row, g, ii, 0, 0.75);
                        add_u1(T, row, g, ii, 1, -0.25);
                    }
                } else {
                    for (int ii : {i, i + 1}) {
                        add_u1(T, row, g, ii, nz - 1, 0.75);
                        add_u1(T, row, g, ii, nz - 2, -0.25);
                    }
                }
            }
        avg_u1_to_u2_eval = from_triplets(g.n_u2(), g.n_u1(), T);
    }
    {   // pressure traces by linear extrapolation through the boundary face
        TripVec Tt, Ti;
        for (int i = 0; i < nx; ++i) {
            Tt.emplace_back(i, g.ip(i, nz - 1), 1.5);
            Tt.emplace_back(i, g.ip(i, nz - 2), -0.5);
        }
        for (int k = 0; k < nz; ++k) {
            Ti.emplace_back(k, g.ip(0, k), 1.5);
            Ti.emplace_back(k, g.ip(1, k), -0.5);
            Ti.emplace_back(nz + k, g.ip(nx - 1, k), 1.5);
            Ti.emplace_back(nz + k, g.ip(nx - 2, k), -0.5);
        }
        trace_top_p = from_triplets(nx, g.n_p(), Tt);
        trace_io_p = from_triplets(2 * nz, g.n_p(), Ti);
    }
}

Vec FluidOps::flux_top(const Vec& u2) const {
    Vec f(g.nx);
    for (int i = 0; i < g.nx; ++i) f[i] = u2[g.iu2(i, g.nz)];
    return f;
}

Vec FluidOps::flux_bottom(const Vec& u2) const {
    Vec f(g.nx);
    for (int i = 0; i < g.nx; ++i) f[i] = u2[g.iu2(i, 0)];
    return f;
}

} // namespace fsib
