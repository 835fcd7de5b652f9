#include "fsib/elliptic.hpp"
#include "fsib/errors.hpp"

namespace fsib {

PotentialSolver::PotentialSolver(const FluidOps& ops, double tol) : ops_(&ops), tol_(tol) {
    lu_.compute(ops.a_pot);
    if (lu_.info() != Eigen::Success)
        throw SolverError("potential solver: factorization failed");
}

Vec PotentialSolver::solve(const Vec& rhs) const {
    Vec phi = lu_.solve(rhs);
    const double nb = rhs.norm();
    if (nb > 0) {
        const double res = (ops_->a_pot * phi - rhs).norm() / nb;
        if (res > tol_)
            throw SolverError("potential solver: residual " + std::to_string(res), res);
    }
    return phi;
}

Vec PotentialSolver::flux_rhs(const Vec& flux_top, const Vec& flux_bottom) const {
    const FluidGrid& g = ops_->g;
    Vec u2hat = Vec::Zero(g.n_u2());
    for (int i = 0; i < g.nx; ++i) {
        u2hat[g.iu2(i, g.nz)] = flux_top[i];
        u2hat[g.iu2(i, 0)] = flux_bottom[i];
    }
    return ops_->div2 * u2hat;
}

DirichletPoisson::DirichletPoisson(const FluidGrid& g, double tol) : g_(g), tol_(tol) {
    const int nx = g.nx, nz = g.nz;
    const double hx = g.hx, hz = g.hz;
    std::vector<Triplet> T, TL, TR;

    auto addp = [&](std::vector<Triplet>& trip, int row, int i, int k, double c) {
        if (c != 0.0) trip.emplace_back(row, g.ip(i, k), c);
    };

    // cell balance: sum of outward K-fluxes = 0; assemble -div(K grad)
    for (int i = 0; i < nx; ++i) {
        for (int k = 0; k < nz; ++k) {
            const int row = g.ip(i, k);
            const double inv = 1.0 / (g.s_c[i] * hx);
            // x-edges at faces i and i+1
            for (int e : {i, i + 1}) {
                const double sgn = (e == i + 1) ? 1.0 : -1.0;
                const double k11 = g.s_f[e];
                const double k12 = -g.sx_f[e] * g.zeta_c(k);
                if (e == 0 || e == nx) {
                    // Dirichlet ghost: q_ghost = 2*theta - q_in; the cross term
                    // vanishes for clamped profiles (sx = 0 at the ends)
                    addp(T, row, i, k, sgn * k11 * (-2.0) * sgn / hx * inv);
                    auto& B = (e == 0) ? TL : TR;
                    B.emplace_back(row, k, sgn * k11 * 2.0 * sgn / hx * inv);
                } else {
                    const int il = e - 1, ir = e;
                    addp(T, row, ir, k, sgn * k11 / hx * inv);
                    addp(T, row, il, k, -sgn * k11 / hx * inv);
                    if (k12 != 0.0) {
                        // interpolated d/dzeta, one-sided at the top/bottom rows
                        for (int ii : {il, ir}) {
                            if (k >= 1 && k <= nz - 2) {
                                addp(T, row, ii, k + 1, sgn * k12 * 0.5 / (2 * hz) * inv);
                                addp(T, row, ii, k - 1, -sgn * k12 * 0.5 / (2 * hz) * inv);
                            } else if (k == 0) {
                                addp(T, row, ii, 0, sgn * k12 * 0.5 * (-3.0) / (2 * hz) * inv);
                                addp(T, row, ii, 1, sgn * k12 * 0.5 * (4.0) / (2 * hz) * inv);
                                addp(T, row, ii, 2, sgn * k12 * 0.5 * (-1.0) / (2 * hz) * inv);
                            } else {
                                addp(T, row, ii, nz - 1, sgn * k12 * 0.5 * (3.0) / (2 * hz) * inv);
                                addp(T, row, ii, nz - 2, sgn * k12 * 0.5 * (-4.0) / (2 * hz) * inv);
                                addp(T, row, ii, nz - 3, sgn * k12 * 0.5 * (1.0) / (2 * hz) * inv);
                            }
                        }
                    }
                }
            }
            // zeta-edges at levels k and k+1 (data on the outermost ones)
            const double invz = 1.0 / (g.s_c[i] * hz);
            for (int e : {k, k + 1}) {
                if (e == 0 || e == nz) continue;  // prescribed flux -> RHS
                const double sgn = (e == k + 1) ? 1.0 : -1.0;
                const double zf = g.zeta_f(e);
                const double k21 = -g.sx_c[i] * zf;
                const double k22 = (1.0 + g.sx_c[i] * g.sx_c[i] * zf * zf) / g.s_c[i];
                addp(T, row, i, e, sgn * k22 / hz * invz);
                addp(T, row, i, e - 1, -sgn * k22 / hz * invz);
                if (k21 != 0.0) {
                    for (int kk : {e - 1, e}) {
                        const int ir = std::min(i + 1, nx - 1), il = std::max(i - 1, 0);
                        // one-sided d/dx interpolation if against a wall
                        if (il != i - 1 || ir != i + 1) {
                            // near Gamma_io sx_c is O(h) for clamped profiles;
                            // drop the cross term there (first-order, local)
                            continue;
                        }
                        addp(T, row, ir, kk, sgn * k21 / (4 * hx) * invz);
                        addp(T, row, il, kk, -sgn * k21 / (4 * hx) * invz);
                    }
                }
            }
        }
    }
    // sign: assemble as negative divergence so the matrix is positive definite
    for (auto& t : T) t = Triplet(t.row(), t.col(), -t.value());
    for (auto& t : TL) t = Triplet(t.row(), t.col(), -t.value());
    for (auto& t : TR) t = Triplet(t.row(), t.col(), -t.value());

    A_ = SpMat(g.n_p(), g.n_p());
    A_.setFromTriplets(T.begin(), T.end());
    bleft_ = SpMat(g.n_p(), nz);
    bleft_.setFromTriplets(TL.begin(), TL.end());
    bright_ = SpMat(g.n_p(), nz);
    bright_.setFromTriplets(TR.begin(), TR.end());
    lu_.compute(A_);
    if (lu_.info() != Eigen::Success)
        throw SolverError("cell Poisson: factorization failed");
}

Vec DirichletPoisson::solve(const Vec& tl, const Vec& tr, const Vec& ft, const Vec& fb) const {
    const int nx = g_.nx, nz = g_.nz;
    Vec rhs = -(bleft_ * tl) - (bright_ * tr);
    for (int i = 0; i < nx; ++i) {
        rhs[g_.ip(i, nz - 1)] += ft[i] / (g_.s_c[i] * g_.hz);
        rhs[g_.ip(i, 0)] -= fb[i] / (g_.s_c[i] * g_.hz);
    }
    Vec q = lu_.solve(rhs);
    const double nb = rhs.norm();
    if (nb > 0) {
        const double res = (A_ * q - rhs).norm() / nb;
        if (res > tol_)
            throw SolverError("cell Poisson: residual " + std::to_string(res), res);
    }
    return q;
}

} // namespace fsib
