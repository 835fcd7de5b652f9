#include "fsib/coupling.hpp"
#include "fsib/errors.hpp"

#include <cmath>
#include <cstring>

namespace fsib {

void PicardConfig::validate() const {
    if (kappa_star <= 0.0 || kappa_star >= 1.0)
        throw DomainError("picard: kappa_star must be in (0,1)");
    if (dt <= 0.0 || T <= 0.0) throw DomainError("picard: T and dt must be positive");
    if (T_min > 0.0 && T_min >= T) throw DomainError("picard: T_min must be below T");
    if (max_iters < 1) throw DomainError("picard: max_iters must be >= 1");
}

CoupledSolver::CoupledSolver(const FluidGrid& grid, const BeamParams& bp, double nu, double tol)
    : stokes_(grid, nu, tol), bp_(bp), tol_(tol) {
    bp_.validate();
    if (bp_.nb != grid.nx + 1)
        throw DimensionError("coupled: beam nodes must coincide with x-face stations");
    if (std::abs(bp_.L - grid.L) > 1e-12)
        throw DimensionError("coupled: beam and channel length differ");
    Kb_ = beam_stiffness(bp_);
    D2b_ = beam_d2(bp_);
}

Vec CoupledSolver::beam_to_faces(const Vec& nodal) const {
    const int nx = grid().nx;
    Vec f(nx);
    for (int i = 0; i < nx; ++i) f[i] = 0.5 * (nodal[i] + nodal[i + 1]);
    return f;
}

Vec CoupledSolver::top_trace_nodes(const Vec& cell_field) const {
    const int nx = grid().nx;
    Vec tf = ops().trace_top_p * cell_field;
    Vec out(nx + 1);
    for (int j = 1; j < nx; ++j) out[j] = 0.5 * (tf[j - 1] + tf[j]);
    out[0] = 1.5 * tf[0] - 0.5 * tf[1];
    out[nx] = 1.5 * tf[nx - 1] - 0.5 * tf[nx - 2];
    return out;
}

const Mat& CoupledSolver::added_mass() const {
    if (!ns_) {
        Mat full = stokes_.assemble_Ns();
        auto m = std::make_shared<Mat>(full.block(1, 1, nb() - 2, nb() - 2));
        ns_ = m;
    }
    return *ns_;
}

SpMat CoupledSolver::assemble_coupled(double dt) const {
    const FluidGrid& g = grid();
    const FluidOps& o = ops();
    const int n1 = n_u1(), n2 = n_u2(), np = n_p(), m = nb();
    const int o2 = n1, op = n1 + n2, oe = op + np, ox = oe + m;
    const double inv_dt = 1.0 / dt;

    std::vector<Triplet> T;
    auto add_block = [&T](const SpMat& M, int ro, int co, double scale) {
        for (int c = 0; c < M.outerSize(); ++c)
            for (SpMat::InnerIterator it(M, c); it; ++it)
                T.emplace_back(ro + static_cast<int>(it.row()), co + c, scale * it.value());
    };

    // fluid momentum
    add_block(o.lap_u1, 0, 0, -stokes_.nu());
    add_block(o.grad_px, 0, op, 1.0);
    for (int j = 0; j < n1; ++j) T.emplace_back(j, j, inv_dt);
    add_block(o.lap_u2, o2, o2, -stokes_.nu());
    add_block(o.grad_pz, o2, op, 1.0);
    for (int i = 0; i < g.nx; ++i)
        for (int k = 0; k <= g.nz; ++k) {
            const int j = g.iu2(i, k);
            if (k == 0) {
                T.emplace_back(o2 + j, o2 + j, 1.0);
            } else if (k == g.nz) {
                // kinematic coupling: u2 = eta_t at the interface
                T.emplace_back(o2 + j, o2 + j, 1.0);
                T.emplace_back(o2 + j, ox + i, -0.5);
                T.emplace_back(o2 + j, ox + i + 1, -0.5);
            } else {
                T.emplace_back(o2 + j, o2 + j, inv_dt);
            }
        }

    // continuity
    add_block(o.div1, op, 0, 1.0);
    add_block(o.div2, op, o2, 1.0);

    // beam displacement rows: eta - dt*xi = eta^n, clamped ends
    T.emplace_back(oe, oe, 1.0);
    T.emplace_back(oe + m - 1, oe + m - 1, 1.0);
    for (int j = 1; j < m - 1; ++j) {
        T.emplace_back(oe + j, oe + j, 1.0);
        T.emplace_back(oe + j, ox + j, -dt);
    }

    // beam velocity rows: xi/dt + gamma*(-D2) xi + K eta - <gauged p trace> = ...
    T.emplace_back(ox, ox, 1.0);
    T.emplace_back(ox + m - 1, ox + m - 1, 1.0);
    for (int j = 1; j < m - 1; ++j) {
        const int row = ox + j;
        T.emplace_back(row, ox + j, inv_dt);
        for (int c = 1; c < m - 1; ++c) {
            const double kd = Kb_(j - 1, c - 1);
            if (kd != 0.0) T.emplace_back(row, oe + c, kd);
            const double dd = D2b_(j - 1, c - 1);
            if (dd != 0.0) T.emplace_back(row, ox + c, -bp_.gamma * dd);
        }
        // pressure trace at node j (top extrapolation averaged to the node)
        auto add_face_trace = [&](int i, double wgt) {
            T.emplace_back(row, op + g.ip(i, g.nz - 1), -1.5 * wgt);
            T.emplace_back(row, op + g.ip(i, g.nz - 2), 0.5 * wgt);
        };
        add_face_trace(j - 1, 0.5);
        add_face_trace(j, 0.5);
    }

    SpMat A(n_total(), n_total());
    A.setFromTriplets(T.begin(), T.end());
    A.makeCompressed();
    return A;
}

const CoupledSolver::System& CoupledSolver::system_for(double dt) const {
    long long key = 0;
    std::memcpy(&key, &dt, sizeof(double));
    auto it = systems_.find(key);
    if (it == systems_.end()) {
        auto sys = std::make_shared<System>();
        sys->A = assemble_coupled(dt);
        sys->lu.compute(sys->A);
        if (sys->lu.info() != Eigen::Success)
            throw SolverError("coupled: factorization failed");
        it = systems_.emplace(key, sys).first;
    }
    return *it->second;
}

CoupledState CoupledSolver::step(const CoupledState& prev, const RhsBundle& rhs, double dt) const {
    const FluidGrid& g = grid();
    const int n1 = n_u1(), n2 = n_u2(), np = n_p(), m = nb();
    const int o2 = n1, op = n1 + n2, oe = op + np, ox = oe + m;
    const auto& sys = system_for(dt);

    Vec r_theta = stokes_.lift_theta(rhs.theta);
    Vec trace_r = top_trace_nodes(r_theta);

    Vec b = Vec::Zero(n_total());
    b.segment(0, n1) = rhs.f1 - ops().dxp_at_u1 * r_theta + prev.fluid.u1 / dt;
    b.segment(o2, n2) = rhs.f2 - ops().dzp_at_u2 * r_theta + prev.fluid.u2 / dt;
    for (int i = 0; i < g.nx; ++i) {
        b[o2 + g.iu2(i, 0)] = 0.0;
        b[o2 + g.iu2(i, g.nz)] = 0.0;  // kinematic row
    }
    for (int j = 1; j < m - 1; ++j) {
        b[oe + j] = prev.beam.eta[j];
        b[ox + j] = prev.beam.eta_t[j] / dt + rhs.h[j] + trace_r[j];
    }

    Vec x = sys.lu.solve(b);
    const double nbm = b.norm();
    if (nbm > 0) {
        const double res = (sys.A * x - b).norm() / nbm;
        if (res > tol_)
            throw SolverError("coupled: linear residual " + std::to_string(res), res);
    }

    CoupledState out;
    out.fluid = FluidState::zero(g, prev.fluid.t + dt);
    out.fluid.u1 = x.segment(0, n1);
    out.fluid.u2 = x.segment(o2, n2);
    out.fluid.p = x.segment(op, np) + r_theta;
    out.beam = BeamState::zero(m, prev.beam.t + dt);
    out.beam.eta = x.segment(oe, m);
    out.beam.eta_t = x.segment(ox, m);
    return out;
}

Trajectory CoupledSolver::linear_solve(const std::vector<RhsBundle>& rhs, const CoupledState& x0,
                                       double dt) const {
    Trajectory X;
    X.dt = dt;
    X.t0 = x0.fluid.t;
    X.levels.reserve(rhs.size() + 1);
    X.levels.push_back(x0);
    for (const auto& r : rhs) X.levels.push_back(step(X.levels.back(), r, dt));
    return X;
}

PartitionedResult CoupledSolver::partitioned_step(const CoupledState& prev, const RhsBundle& rhs,
                                                  double dt, bool use_added_mass,
                                                  int max_sub) const {
    const int m = nb();
    const int mi = m - 2;
    Vec r_theta = stokes_.lift_theta(rhs.theta);
    Vec trace_r = top_trace_nodes(r_theta);

    Mat Ma = Mat::Identity(mi, mi);
    if (use_added_mass) Ma += added_mass();
    Mat Astep = Ma + dt * bp_.gamma * (-D2b_) + dt * dt * Kb_;
    Eigen::LDLT<Mat> beam_lu(Astep);

    const Vec eta_n = prev.beam.eta.segment(1, mi);
    const Vec xi_n = prev.beam.eta_t.segment(1, mi);

    PartitionedResult out;
    Vec xi_k = prev.beam.eta_t;
    FluidState fl = prev.fluid;
    const double scale = std::max(1.0, prev.beam.eta_t.lpNorm<Eigen::Infinity>());
    for (int it = 0; it < max_sub; ++it) {
        // fluid advance with the current interface velocity (Dirichlet data)
        fl = stokes_.unsteady_step(prev.fluid, rhs.f1, rhs.f2, beam_to_faces(xi_k), rhs.theta, dt);
        // beam advance with the (I + N_s) mass and the fluid pressure trace;
        // the N_s(xi_k - xi_n) compensation makes the fixed point monolithic
        Vec load = rhs.h + top_trace_nodes(fl.p);
        Vec rb = Ma * xi_n + dt * (-(Kb_ * eta_n) + load.segment(1, mi));
        if (use_added_mass) rb += added_mass() * (xi_k.segment(1, mi) - xi_n);
        Vec xi_i = beam_lu.solve(rb);
        Vec xi_new = Vec::Zero(m);
        xi_new.segment(1, mi) = xi_i;

        out.last_update = (xi_new - xi_k).lpNorm<Eigen::Infinity>() / scale;
        out.updates.push_back(out.last_update);
        xi_k = xi_new;
        out.iterations = it + 1;
        if (out.last_update < 1e-11) {
            out.converged = true;
            break;
        }
        if (out.last_update > 1e6) break;  // diverged (added-mass instability)
    }

    out.state.fluid = stokes_.unsteady_step(prev.fluid, rhs.f1, rhs.f2, beam_to_faces(xi_k),
                                            rhs.theta, dt);
    out.state.beam = BeamState::zero(m, prev.beam.t + dt);
    out.state.beam.eta = prev.beam.eta + dt * xi_k;
    out.state.beam.eta[0] = out.state.beam.eta[m - 1] = 0.0;
    out.state.beam.eta_t = xi_k;
    return out;
}

std::vector<RhsBundle> CoupledSolver::nonlinear_rhs(const Trajectory& X) const {
    const BeamProfile& prof = grid().profile;
    std::vector<RhsBundle> rhs;
    rhs.reserve(X.steps());
    GeometryMap gm_prev = build_geometry(prof, X.levels[0].beam.eta, X.levels[0].beam.eta_t);
    for (int n = 1; n <= X.steps(); ++n) {
        const CoupledState& s = X.levels[n];
        const CoupledState& sp = X.levels[n - 1];
        GeometryMap gm = build_geometry(prof, s.beam.eta, s.beam.eta_t);
        RhsBundle b = RhsBundle::zero(grid());
        VelocityPair F = eval_F(ops(), gm, gm_prev, s.fluid.u1, s.fluid.u2, s.fluid.p,
                                sp.fluid.u1, sp.fluid.u2, X.dt);
        b.f1 = F.u1;
        b.f2 = F.u2;
        b.theta = eval_Theta(ops(), s.fluid.u1, s.fluid.u2);
        b.h = eval_H(ops(), gm, s.fluid.u1, s.fluid.u2);
        rhs.push_back(std::move(b));
        gm_prev = std::move(gm);
    }
    return rhs;
}

Trajectory CoupledSolver::picard_map(const Trajectory& X, const CoupledState& x0, double R,
                                     double mu, const NormWeights& w) const {
    for (const auto& lev : X.levels) {
        const double margin = (1.0 + lev.beam.eta.array()).minCoeff();
        if (margin < 1.0 / (2.0 * mu))
            throw CollisionError("picard_map: gap bound ||(1+eta)^{-1}|| <= 2 mu violated",
                                 margin);
    }
    const double norm = traj_norm(ops(), bp_, X, w);
    if (norm > R)
        throw BallError("picard_map: trajectory norm " + std::to_string(norm) +
                        " exceeds the ball radius " + std::to_string(R));
    return linear_solve(nonlinear_rhs(X), x0, X.dt);
}

CoupledState CoupledSolver::enforce_compatibility(const CoupledState& x0,
                                                  CompatReport* rep) const {
    const int m = nb();
    if (x0.beam.eta.size() != m || x0.beam.eta_t.size() != m)
        throw DimensionError("compatibility: beam state size mismatch");
    const double clamp = std::max({std::abs(x0.beam.eta[0]), std::abs(x0.beam.eta[m - 1]),
                                   std::abs(x0.beam.eta_t[0]), std::abs(x0.beam.eta_t[m - 1])});
    if (clamp > 1e-12)
        throw PreconditionError("compatibility: beam data must be clamped at the ends");

    Vec g_top = beam_to_faces(x0.beam.eta_t);
    FluidState lift = stokes_.lift_divfree(g_top);
    Vec v1 = x0.fluid.u1 - lift.u1;
    Vec v2 = x0.fluid.u2 - lift.u2;
    ProjectionResult pr = stokes_.leray_project(v1, v2);

    CoupledState out = x0;
    out.fluid.u1 = pr.u1 + lift.u1;
    out.fluid.u2 = pr.u2 + lift.u2;
    if (rep) {
        rep->divergence_before = stokes_.max_divergence(x0.fluid.u1, x0.fluid.u2);
        rep->divergence_after = stokes_.max_divergence(out.fluid.u1, out.fluid.u2);
        const double base = fluid_l2(ops(), x0.fluid.u1, x0.fluid.u2);
        rep->modification = fluid_l2(ops(), out.fluid.u1 - x0.fluid.u1,
                                     out.fluid.u2 - x0.fluid.u2) / std::max(base, 1e-14);
    }
    return out;
}

std::pair<Trajectory, FixedPointReport> CoupledSolver::picard_solve(
    const CoupledState& x0_in, const PicardConfig& cfg) const {
    cfg.validate();
    FixedPointReport rep;
    const double mu = cfg.mu > 0 ? cfg.mu : 1.0 / grid().profile.min_gap();
    rep.mu_used = mu;

    collision_guard(x0_in.beam, mu);  // collision at t=0 is a precondition error
    CoupledState x0 = cfg.enforce_compat ? enforce_compatibility(x0_in) : x0_in;

    int nsteps = std::max(1, static_cast<int>(std::llround(cfg.T / cfg.dt)));
    const double tmin = cfg.T_min > 0 ? cfg.T_min : cfg.T / 64.0;
    const int floor_steps = std::max(1, static_cast<int>(std::llround(tmin / cfg.dt)));

    Trajectory X;
    while (true) {
        // homogeneous linear solution as the initial iterate
        std::vector<RhsBundle> zeros(nsteps, RhsBundle::zero(grid()));
        X = linear_solve(zeros, x0, cfg.dt);
        const double norm0 = traj_norm(ops(), bp_, X, cfg.weights);
        const double data_norm = state_norm_sup(ops(), bp_, x0, cfg.weights);
        rep.C_L = norm0 / std::max(data_norm, 1e-14);
        const double R = cfg.R > 0 ? cfg.R : 2.0 * norm0;
        rep.R_used = R;

        bool halve = false;
        double diff_prev = -1.0;
        for (int k = 0; k < cfg.max_iters; ++k) {
            Trajectory X1;
            try {
                X1 = picard_map(X, x0, R, mu, cfg.weights);
            } catch (const CollisionError&) {
                rep.status = "collision";
                halve = true;
                break;
            } catch (const BallError&) {
                rep.status = "ball";
                halve = true;
                break;
            }
            const double margin = [&] {
                double mn = 1e300;
                for (const auto& lev : X1.levels)
                    mn = std::min(mn, (1.0 + lev.beam.eta.array()).minCoeff());
                return mn;
            }();
            const double diff = traj_dist(ops(), bp_, X1, X, cfg.weights);
            rep.residuals.push_back(diff);
            rep.margins.push_back(margin);
            rep.iterations += 1;
            if (margin < 1.0 / (2.0 * mu)) {
                rep.status = "collision";
                halve = true;
                break;
            }
            if (diff_prev > 0.0) {
                const double kappa = diff / diff_prev;
                rep.kappas.push_back(kappa);
                rep.kappa_final = kappa;
                if (kappa > cfg.kappa_star) {
                    halve = true;
                    break;
                }
            }
            X = std::move(X1);
            const double xnorm = traj_norm(ops(), bp_, X, cfg.weights);
            if (diff <= cfg.tol * std::max(1.0, xnorm)) {
                rep.status = "converged";
                rep.T_final = nsteps * cfg.dt;
                return {X, rep};
            }
            diff_prev = diff;
        }
        if (!halve && rep.status != "converged") {
            // ran out of iterations without meeting the tolerance
            halve = true;
        }
        nsteps /= 2;
        if (nsteps < floor_steps || nsteps < 1) {
            rep.status = (rep.status == "collision") ? "collision" : "halved-to-floor";
            rep.T_final = nsteps * 2 * cfg.dt;
            return {X, rep};
        }
        rep.halvings.push_back(nsteps * cfg.dt);
    }
}

double CoupledSolver::nonlinear_residual(const Trajectory& X) const {
    const FluidGrid& g = grid();
    const int n1 = n_u1(), n2 = n_u2(), np = n_p(), m = nb();
    const int o2 = n1, op = n1 + n2, oe = op + np, ox = oe + m;
    const auto& sys = system_for(X.dt);
    auto rhs = nonlinear_rhs(X);

    double worst = 0.0;
    for (int n = 1; n <= X.steps(); ++n) {
        const CoupledState& s = X.levels[n];
        const CoupledState& sp = X.levels[n - 1];
        const RhsBundle& r = rhs[n - 1];
        Vec r_theta = stokes_.lift_theta(r.theta);
        Vec trace_r = top_trace_nodes(r_theta);

        Vec x = Vec::Zero(n_total());
        x.segment(0, n1) = s.fluid.u1;
        x.segment(o2, n2) = s.fluid.u2;
        x.segment(op, np) = s.fluid.p - r_theta;
        x.segment(oe, m) = s.beam.eta;
        x.segment(ox, m) = s.beam.eta_t;

        Vec b = Vec::Zero(n_total());
        b.segment(0, n1) = r.f1 - ops().dxp_at_u1 * r_theta + sp.fluid.u1 / X.dt;
        b.segment(o2, n2) = r.f2 - ops().dzp_at_u2 * r_theta + sp.fluid.u2 / X.dt;
        for (int i = 0; i < g.nx; ++i) {
            b[o2 + g.iu2(i, 0)] = 0.0;
            b[o2 + g.iu2(i, g.nz)] = 0.0;
        }
        for (int j = 1; j < m - 1; ++j) {
            b[oe + j] = sp.beam.eta[j];
            b[ox + j] = sp.beam.eta_t[j] / X.dt + r.h[j] + trace_r[j];
        }
        worst = std::max(worst, (sys.A * x - b).norm() / std::max(1.0, b.norm()));
    }
    return worst;
}

std::vector<EnergySample> CoupledSolver::energy_report(const Trajectory& X) const {
    const FluidGrid& g = grid();
    const FluidOps& o = ops();
    std::vector<EnergySample> out;
    out.reserve(X.levels.size());
    for (const auto& s : X.levels) {
        EnergySample e{};
        e.t = s.fluid.t;
        e.fluid = 0.5 * (dot_w(o.w_u1, s.fluid.u1, s.fluid.u1) +
                         dot_w(o.w_u2, s.fluid.u2, s.fluid.u2));
        BeamEnergy be = beam_energy(bp_, s.beam);
        e.beam_kinetic = be.kinetic;
        e.beam_potential = be.potential;
        e.total = e.fluid + be.total();

        Vec d1x = o.dx_u1 * s.fluid.u1, d1z = o.dz_u1 * s.fluid.u1;
        Vec d2x = o.dx_u2 * s.fluid.u2, d2z = o.dz_u2 * s.fluid.u2;
        double grad2 = dot_w(o.w_u1, d1x, d1x) + dot_w(o.w_u1, d1z, d1z) +
                       dot_w(o.w_u2, d2x, d2x) + dot_w(o.w_u2, d2z, d2z);
        double etatx2 = 0.0;
        for (int j = 0; j < bp_.nb - 1; ++j) {
            const double d = (s.beam.eta_t[j + 1] - s.beam.eta_t[j]) / bp_.h();
            etatx2 += bp_.h() * d * d;
        }
        e.dissipation = stokes_.nu() * grad2 + bp_.gamma * etatx2;

        Vec ptr = o.trace_io_p * s.fluid.p;
        Vec u2a = o.avg_u2_to_u1 * s.fluid.u2;
        double power = 0.0;
        for (int k = 0; k < g.nz; ++k) {
            const int jl = g.iu1(0, k), jr = g.iu1(g.nx, k);
            const double headl = ptr[k] + 0.5 * (s.fluid.u1[jl] * s.fluid.u1[jl] +
                                                 u2a[jl] * u2a[jl]);
            const double headr = ptr[g.nz + k] + 0.5 * (s.fluid.u1[jr] * s.fluid.u1[jr] +
                                                        u2a[jr] * u2a[jr]);
            power += g.hz * (headl * s.fluid.u1[jl] - headr * s.fluid.u1[jr]);
        }
        e.boundary_power = power;
        out.push_back(e);
    }
    return out;
}

double collision_guard(const BeamState& s, double mu) {
    const double margin = (1.0 + s.eta.array()).minCoeff();
    if (margin < 1.0 / (2.0 * mu))
        throw CollisionError("collision guard: min(1+eta) = " + std::to_string(margin) +
                             " below 1/(2 mu) = " + std::to_string(1.0 / (2.0 * mu)), margin);
    return margin;
}

ContinuationResult continue_solution(const BeamProfile& profile0, const BeamParams& bp, double nu,
                                     double tol, int nx, int nz, const CoupledState& x0,
                                     const ContinuationConfig& cfg) {
    ContinuationResult out;
    BeamProfile profile = profile0;
    CoupledState state = x0;
    double t = 0.0;
    bool first = true;

    while (t < cfg.T_total - 1e-12 && static_cast<int>(out.slabs.size()) < cfg.max_slabs) {
        FluidGrid grid(profile, nx, nz);
        CoupledSolver solver(grid, bp, nu, tol);

        PicardConfig pc = cfg.picard;
        pc.enforce_compat = first ? cfg.picard.enforce_compat : false;
        const double remaining = cfg.T_total - t;
        if (pc.T > remaining) pc.T = std::max(pc.dt, remaining);

        SlabRecord rec;
        rec.profile = profile;
        rec.junction_div = solver.stokes().max_divergence(state.fluid.u1, state.fluid.u2);

        auto [traj, report] = solver.picard_solve(state, pc);
        rec.traj = traj;
        rec.report = report;
        out.slabs.push_back(std::move(rec));
        if (report.status != "converged") {
            out.status = report.status;
            out.t_end = t;
            return out;
        }
        t += traj.horizon();
        state = traj.back();
        // rebuild the reference configuration from eta(T*): the flattened
        // state carries over unchanged, the relative displacement resets to 0
        profile = make_profile(bp.L, state.beam.eta);
        first = false;
    }
    out.completed = t >= cfg.T_total - 1e-12;
    out.status = out.completed ? "completed" : "max-slabs";
    out.t_end = t;
    return out;
}

} // namespace fsib
