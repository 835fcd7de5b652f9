#include "fsib/stokes.hpp"
#include "fsib/errors.hpp"

#include <cmath>
#include <cstring>

namespace fsib {

double lift_cutoff(double zeta, double delta) {
    const double lo = 1.0 - delta, hi = 1.0 - 0.5 * delta;
    if (zeta <= lo) return 0.0;
    if (zeta >= hi) return 1.0;
    const double t = (zeta - lo) / (hi - lo);
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double lift_cutoff_delta(const BeamProfile& profile) {
    const double m = profile.min_gap();
    const double delta = (m < 1.0) ? m : 0.5;
    const double smax = (1.0 + profile.eta0.array()).maxCoeff();
    return delta / smax;
}

StokesSolver::StokesSolver(const FluidGrid& grid, double nu, double tol, bool mirror_pair)
    : g_(grid), ops_(grid, nu), nu_(nu), tol_(tol), mirror_pair_(mirror_pair),
      lifting_(grid, tol), potential_(ops_, tol) {
    // full-Dirichlet potential operator for the two-solve projector route
    SpMat voldiv1 = ops_.w_p.asDiagonal() * ops_.div1;
    SpMat voldiv2 = ops_.w_p.asDiagonal() * ops_.div2;
    SpMat t1 = voldiv1.transpose();
    SpMat t2 = voldiv2.transpose();
    gdir_x_ = ops_.w_u1.cwiseInverse().asDiagonal() * t1;
    gdir_x_ *= -1.0;
    gdir_z_ = ops_.w_u2.cwiseInverse().asDiagonal() * t2;
    gdir_z_ *= -1.0;
    a_dir_ = ops_.div1 * gdir_x_ + ops_.div2 * gdir_z_;
    a_dir_ *= -1.0;
    a_dir_.makeCompressed();
    lu_dir_.compute(a_dir_);
    if (lu_dir_.info() != Eigen::Success)
        throw SolverError("stokes: Dirichlet potential factorization failed");

    steady_ = std::make_shared<Assembled>();
    steady_->A = assemble_fluid(0.0);
    steady_->lu.compute(steady_->A);
    if (steady_->lu.info() != Eigen::Success)
        throw SolverError("stokes: steady factorization failed");
}

FluidState StokesSolver::lift_divfree(const Vec& g_top) const {
    const int nx = g_.nx, nz = g_.nz;
    if (g_top.size() != nx) throw DimensionError("lift_divfree: g must live on the top faces");
    const double corner_l = 1.5 * g_top[0] - 0.5 * g_top[1];
    const double corner_r = 1.5 * g_top[nx - 1] - 0.5 * g_top[nx - 2];
    const double lim = std::sqrt(g_.hx) * std::max(1e-12, g_top.lpNorm<Eigen::Infinity>());
    if (std::abs(corner_l) > lim || std::abs(corner_r) > lim)
        throw PreconditionError("lift_divfree: top data must vanish at the corners");

    double dz = lift_cutoff_delta(g_.profile);
    dz = std::max(dz, 4.5 * g_.hz);
    dz = std::min(dz, 0.9);

    // stream function Phi(i,k) = G(x_i) * S(zeta_k), cumulative trapezoid-free
    // sum so the top trace is exact
    Vec G(nx + 1);
    G[0] = 0.0;
    for (int i = 0; i < nx; ++i) G[i + 1] = G[i] + g_.hx * g_top[i];
    Vec S(nz + 1);
    for (int k = 0; k <= nz; ++k) S[k] = lift_cutoff(g_.zeta_f(k), dz);

    FluidState w = FluidState::zero(g_);
    for (int i = 0; i <= nx; ++i)
        for (int k = 0; k < nz; ++k)
            w.u1[g_.iu1(i, k)] = -G[i] * (S[k + 1] - S[k]) / g_.hz / g_.s_f[i];
    Vec corr = ops_.avg_u1_to_u2 * w.u1;
    for (int i = 0; i < nx; ++i)
        for (int k = 0; k <= nz; ++k) {
            const double q2 = (G[i + 1] - G[i]) * S[k] / g_.hx;
            w.u2[g_.iu2(i, k)] = q2 + g_.zeta_f(k) * g_.sx_c[i] * corr[g_.iu2(i, k)];
        }
    return w;
}

ProjectionResult StokesSolver::leray_project(const Vec& u1, const Vec& u2, bool two_solves) const {
    if (u1.size() != g_.n_u1() || u2.size() != g_.n_u2())
        throw DimensionError("leray_project: field size mismatch");
    ProjectionResult r;
    Vec u2_int = u2;
    for (int i = 0; i < g_.nx; ++i) {
        u2_int[g_.iu2(i, 0)] = 0.0;
        u2_int[g_.iu2(i, g_.nz)] = 0.0;
    }
    if (!two_solves) {
        Vec rhs = -(ops_.div1 * u1) - (ops_.div2 * u2_int);
        r.potential = potential_.solve(rhs);
        r.u1 = u1 - ops_.gproj_x * r.potential;
        r.u2 = u2_int - ops_.gproj_z * r.potential;
    } else {
        // the paper's split: p_u with Dirichlet 0 on the whole boundary, then
        // a harmonic correction with the residual normal flux on Gamma_d
        Vec rhs_p = -(ops_.div1 * u1) - (ops_.div2 * u2);
        r.p_u = lu_dir_.solve(rhs_p);
        Vec v1 = u1 - gdir_x_ * r.p_u;
        Vec v2 = u2 - gdir_z_ * r.p_u;
        Vec v2_int = v2;
        for (int i = 0; i < g_.nx; ++i) {
            v2_int[g_.iu2(i, 0)] = 0.0;
            v2_int[g_.iu2(i, g_.nz)] = 0.0;
        }
        Vec rhs_q = -(ops_.div1 * v1) - (ops_.div2 * v2_int);
        r.q_u = potential_.solve(rhs_q);
        r.u1 = v1 - ops_.gproj_x * r.q_u;
        r.u2 = v2_int - ops_.gproj_z * r.q_u;
        r.potential = r.p_u + r.q_u;
    }
    return r;
}

SpMat StokesSolver::assemble_fluid(double inv_dt) const {
    const int n1 = g_.n_u1(), n2 = g_.n_u2();
    const int o2 = n1, op = n1 + n2;
    std::vector<Triplet> T;
    T.reserve(static_cast<size_t>(ops_.lap_u1.nonZeros() + ops_.lap_u2.nonZeros() +
                                  ops_.div1.nonZeros() + ops_.div2.nonZeros()) + 4 * (n1 + n2));

    auto add_block = [&T](const SpMat& M, int ro, int co, double scale) {
        for (int c = 0; c < M.outerSize(); ++c)
            for (SpMat::InnerIterator it(M, c); it; ++it)
                T.emplace_back(ro + static_cast<int>(it.row()), co + c, scale * it.value());
    };

    // x-momentum rows
    add_block(ops_.lap_u1, 0, 0, -nu_);
    add_block(mirror_pair_ ? ops_.grad_px_dd : ops_.grad_px, 0, op, 1.0);
    if (inv_dt > 0)
        for (int j = 0; j < n1; ++j) T.emplace_back(j, j, inv_dt);

    // z-momentum rows (interior) + boundary-condition rows at k = 0, nz
    add_block(ops_.lap_u2, o2, o2, -nu_);
    add_block(ops_.grad_pz, o2, op, 1.0);
    for (int i = 0; i < g_.nx; ++i)
        for (int k = 0; k <= g_.nz; ++k) {
            const int j = g_.iu2(i, k);
            if (k == 0 || k == g_.nz)
                T.emplace_back(o2 + j, o2 + j, 1.0);
            else if (inv_dt > 0)
                T.emplace_back(o2 + j, o2 + j, inv_dt);
        }

    // continuity rows
    add_block(ops_.div1, op, 0, 1.0);
    add_block(ops_.div2, op, o2, 1.0);

    SpMat A(n_total(), n_total());
    A.setFromTriplets(T.begin(), T.end());
    A.makeCompressed();
    return A;
}

const StokesSolver::Assembled& StokesSolver::unsteady_for(double dt) const {
    long long key = 0;
    static_assert(sizeof(double) == sizeof(long long));
    std::memcpy(&key, &dt, sizeof(double));
    auto it = unsteady_.find(key);
    if (it == unsteady_.end()) {
        auto sys = std::make_shared<Assembled>();
        sys->A = assemble_fluid(1.0 / dt);
        sys->lu.compute(sys->A);
        if (sys->lu.info() != Eigen::Success)
            throw SolverError("stokes: unsteady factorization failed");
        it = unsteady_.emplace(key, sys).first;
    }
    return *it->second;
}

Vec StokesSolver::rhs_fluid(const Vec& f1, const Vec& f2, const Vec& g_top, const Vec& r_theta,
                            const FluidState* prev, double inv_dt) const {
    const int n1 = g_.n_u1(), n2 = g_.n_u2();
    const int o2 = n1, op = n1 + n2;
    Vec rhs = Vec::Zero(n_total());
    rhs.segment(0, n1) = f1 - ops_.dxp_at_u1 * r_theta;
    rhs.segment(o2, n2) = f2 - ops_.dzp_at_u2 * r_theta;
    if (prev && inv_dt > 0) {
        rhs.segment(0, n1) += inv_dt * prev->u1;
        rhs.segment(o2, n2) += inv_dt * prev->u2;
    }
    for (int i = 0; i < g_.nx; ++i) {
        rhs[o2 + g_.iu2(i, 0)] = 0.0;
        rhs[o2 + g_.iu2(i, g_.nz)] = g_top[i];
    }
    (void)op;
    return rhs;
}

Vec StokesSolver::solve_fluid(const Assembled& sys, const Vec& rhs) const {
    Vec x = sys.lu.solve(rhs);
    const double nb = rhs.norm();
    if (nb > 0) {
        const double res = (sys.A * x - rhs).norm() / nb;
        if (res > tol_)
            throw SolverError("stokes: linear residual " + std::to_string(res), res);
    }
    return x;
}

SteadyResult StokesSolver::solve_steady(const Vec& f1, const Vec& f2, const Vec& g_top,
                                        const ThetaData& h) const {
    Vec r_theta = lift_theta(h);
    Vec rhs = rhs_fluid(f1, f2, g_top, r_theta, nullptr, 0.0);
    Vec x = solve_fluid(*steady_, rhs);

    const int n1 = g_.n_u1(), n2 = g_.n_u2(), np = g_.n_p();
    SteadyResult out;
    out.state = FluidState::zero(g_);
    out.state.u1 = x.segment(0, n1);
    out.state.u2 = x.segment(n1, n2);
    out.p1 = x.segment(n1 + n2, np);
    out.state.p = out.p1 + r_theta;
    return out;
}

FluidState StokesSolver::unsteady_step(const FluidState& state, const Vec& f1, const Vec& f2,
                                       const Vec& g_top, const ThetaData& theta, double dt) const {
    if (dt <= 0) throw DomainError("unsteady_step: dt must be > 0");
    const auto& sys = unsteady_for(dt);
    Vec r_theta = lift_theta(theta);
    Vec rhs = rhs_fluid(f1, f2, g_top, r_theta, &state, 1.0 / dt);
    Vec x = solve_fluid(sys, rhs);

    const int n1 = g_.n_u1(), n2 = g_.n_u2(), np = g_.n_p();
    FluidState out = FluidState::zero(g_, state.t + dt);
    out.u1 = x.segment(0, n1);
    out.u2 = x.segment(n1, n2);
    out.p = x.segment(n1 + n2, np) + r_theta;
    return out;
}

Mat StokesSolver::assemble_Ns() const {
    const int nx = g_.nx, nb = nx + 1;
    Mat Ns = Mat::Zero(nb, nb);
    Vec zero = Vec::Zero(nx);
    for (int j = 0; j < nb; ++j) {
        // nodal hat interpolated to the top-face stations
        Vec ghat = Vec::Zero(nx);
        if (j > 0) ghat[j - 1] += 0.5;
        if (j < nx) ghat[j] += 0.5;
        Vec pi = potential_.solve(potential_.flux_rhs(ghat, zero));
        // adjacent-cell trace keeps the matrix symmetric (discrete Green identity)
        Vec tf(nx);
        for (int i = 0; i < nx; ++i) tf[i] = pi[g_.ip(i, g_.nz - 1)];
        for (int l = 0; l < nb; ++l) {
            double v = 0.0;
            if (l > 0) v += 0.5 * tf[l - 1];
            if (l < nx) v += 0.5 * tf[l];
            Ns(l, j) = v;
        }
    }
    return Ns;
}

Vec StokesSolver::apply_N0(const Vec& v_top, const Vec& v_bottom) const {
    if (v_top.size() != g_.nx || v_bottom.size() != g_.nx)
        throw DimensionError("apply_N0: data must live on the top/bottom faces");
    // inputs are outward-normal derivatives; the potential solver wants
    // +zeta-direction fluxes (surface measure folds into sqrt(1+sx^2) on top)
    Vec ft(g_.nx), fb(g_.nx);
    for (int i = 0; i < g_.nx; ++i) {
        ft[i] = v_top[i] * std::sqrt(1.0 + g_.sx_c[i] * g_.sx_c[i]);
        fb[i] = -v_bottom[i];
    }
    Vec rho = potential_.solve(potential_.flux_rhs(ft, fb));
    Vec tf = Vec(g_.nx);
    for (int i = 0; i < g_.nx; ++i)
        tf[i] = 1.5 * rho[g_.ip(i, g_.nz - 1)] - 0.5 * rho[g_.ip(i, g_.nz - 2)];
    Vec out(g_.nx + 1);
    out[0] = 1.5 * tf[0] - 0.5 * tf[1];
    out[g_.nx] = 1.5 * tf[g_.nx - 1] - 0.5 * tf[g_.nx - 2];
    for (int j = 1; j < g_.nx; ++j) out[j] = 0.5 * (tf[j - 1] + tf[j]);
    return out;
}

StokesSolver::PressureParts StokesSolver::decompose_pressure(
    const FluidState& state, const Vec& theta_lift, const Vec& g_top, const Vec& f1,
    const Vec& f2, const Vec& q_prev, double dt) const {
    PressureParts parts;
    const int nx = g_.nx;
    Vec zero = Vec::Zero(nx);

    // q: harmonic with the kinematic data as top flux
    parts.q = potential_.solve(potential_.flux_rhs(g_top, zero));

    // rho: harmonic with nu * (Lap Pi u).n on Gamma_d
    ProjectionResult pr = leray_project(state.u1, state.u2);
    Vec lap1 = ops_.lap_eval_u1 * pr.u1;
    Vec lap2 = ops_.lap_eval_u2 * pr.u2;
    Vec lap1_at_u2 = ops_.avg_u1_to_u2_eval * lap1;
    Vec ft(nx), fb(nx);
    for (int i = 0; i < nx; ++i) {
        ft[i] = nu_ * (lap2[g_.iu2(i, g_.nz)] - g_.sx_c[i] * lap1_at_u2[g_.iu2(i, g_.nz)]);
        fb[i] = nu_ * lap2[g_.iu2(i, 0)];
    }
    parts.rho = potential_.solve(potential_.flux_rhs(ft, fb));

    // p_F from (I - Pi)(f - grad R(theta))
    Vec F1 = f1 - ops_.dxp_at_u1 * theta_lift;
    Vec F2 = f2 - ops_.dzp_at_u2 * theta_lift;
    ProjectionResult pf = leray_project(F1, F2);
    parts.p_F = pf.potential;

    Vec p1 = state.p - theta_lift;
    Vec recomposed = parts.rho + parts.p_F;
    if (q_prev.size() == parts.q.size()) recomposed -= (parts.q - q_prev) / dt;
    Vec diff = p1 - recomposed;
    parts.residual = std::sqrt(dot_w(ops_.w_p, diff, diff) / ops_.w_p.sum());
    return parts;
}

double StokesSolver::max_divergence(const Vec& u1, const Vec& u2) const {
    return (ops_.div1 * u1 + ops_.div2 * u2).lpNorm<Eigen::Infinity>();
}

} // namespace fsib
