#include "doctest.h"

#include "fsib/coupling.hpp"
#include "fsib/errors.hpp"

#include <cmath>

using namespace fsib;

namespace {

struct Rig {
    FluidGrid g;
    BeamParams bp;
    CoupledSolver cs;
    Rig(bool graph, int nx, int nz, double nu = 0.05, double amp = 0.3)
        : g(graph ? bump_profile(1.0, nx + 1, amp) : rect_profile(1.0, nx + 1), nx, nz),
          bp{}, cs([&] {
              bp.alpha = 1.0;
              bp.beta = 0.5;
              bp.gamma = 0.1;
              bp.L = 1.0;
              bp.nb = nx + 1;
              return CoupledSolver(g, bp, nu);
          }()) {}
};

CoupledState zero_state(const FluidGrid& g, int nb) {
    return {FluidState::zero(g), BeamState::zero(nb)};
}

Vec bump_nodal(const BeamProfile& prof, double amp) {
    Vec v(prof.nodes());
    for (int j = 0; j < prof.nodes(); ++j) {
        const double x = prof.node_x(j);
        v[j] = amp * 16.0 * x * x * (prof.L - x) * (prof.L - x) / std::pow(prof.L, 4);
    }
    return v;
}

} // namespace

TEST_CASE("linear coupled solve: zero data stays zero; kinematic residual") {
    Rig r(false, 16, 12);
    CoupledState x0 = zero_state(r.g, r.bp.nb);
    std::vector<RhsBundle> rhs(10, RhsBundle::zero(r.g));
    Trajectory X = r.cs.linear_solve(rhs, x0, 0.02);
    for (const auto& lev : X.levels) {
        CHECK(lev.fluid.u1.lpNorm<Eigen::Infinity>() < 1e-12);
        CHECK(lev.beam.eta.lpNorm<Eigen::Infinity>() < 1e-12);
    }

    // constant beam load: the interface moves; the kinematic condition holds
    RhsBundle load = RhsBundle::zero(r.g);
    load.h = Vec::Constant(r.bp.nb, 1.0);
    CoupledState s = x0;
    for (int n = 0; n < 5; ++n) {
        s = r.cs.step(s, load, 0.02);
        Vec gtop = r.cs.beam_to_faces(s.beam.eta_t);
        double res = 0.0;
        for (int i = 0; i < r.g.nx; ++i)
            res = std::max(res, std::abs(s.fluid.u2[r.g.iu2(i, r.g.nz)] - gtop[i]));
        CHECK(res < 1e-9);
        CHECK(r.cs.stokes().max_divergence(s.fluid.u1, s.fluid.u2) < 1e-9);
    }
    CHECK(s.beam.eta.lpNorm<Eigen::Infinity>() > 1e-4);  // something happened
}

TEST_CASE("monolithic and partitioned paths agree to the sub-iteration tolerance") {
    for (bool graph : {false, true}) {
        Rig r(graph, 16, 12);
        CoupledState s_mono = zero_state(r.g, r.bp.nb);
        CoupledState s_part = s_mono;
        RhsBundle load = RhsBundle::zero(r.g);
        load.h = Vec::Constant(r.bp.nb, 0.5);
        load.theta.left = Vec::Constant(r.g.nz, 0.2);
        const double dt = 0.02;
        double worst = 0.0;
        for (int n = 0; n < 12; ++n) {
            s_mono = r.cs.step(s_mono, load, dt);
            PartitionedResult pr = r.cs.partitioned_step(s_part, load, dt);
            CHECK(pr.converged);
            s_part = pr.state;
            worst = std::max(worst, (s_mono.beam.eta - s_part.beam.eta).lpNorm<Eigen::Infinity>());
            worst = std::max(worst, (s_mono.fluid.u1 - s_part.fluid.u1).lpNorm<Eigen::Infinity>());
            worst = std::max(worst, (s_mono.fluid.u2 - s_part.fluid.u2).lpNorm<Eigen::Infinity>());
        }
        CHECK(worst < 1e-6);
    }
}

TEST_CASE("removing the added mass degrades the strongly coupled iteration") {
    // heavier coupling: finer grid, larger viscosity
    Rig r(false, 24, 20, 0.5);
    RhsBundle load = RhsBundle::zero(r.g);
    load.h = Vec::Constant(r.bp.nb, 1.0);
    CoupledState s = zero_state(r.g, r.bp.nb);
    PartitionedResult with = r.cs.partitioned_step(s, load, 0.02, true);
    PartitionedResult without = r.cs.partitioned_step(s, load, 0.02, false);
    CHECK(with.converged);
    // growth factor of the uncompensated iteration exceeds 1 (divergence or
    // at best much slower convergence)
    REQUIRE(without.updates.size() >= 2);
    double growth = 0.0;
    for (size_t i = 1; i < std::min<size_t>(without.updates.size(), 6); ++i)
        growth = std::max(growth, without.updates[i] / without.updates[i - 1]);
    CHECK(growth > 1.0);
    CHECK(with.iterations < without.iterations);
}

TEST_CASE("collision guard: margin, threshold convention, trigger") {
    BeamState s = BeamState::zero(17);
    CHECK(collision_guard(s, 1.0) == doctest::Approx(1.0));

    BeamState low = BeamState::zero(17);
    const double mu = 2.0;
    for (int j = 1; j < 16; ++j) low.eta[j] = -1.0 + 1.0 / (4.0 * mu);
    CHECK_THROWS_AS(collision_guard(low, mu), CollisionError);

    // exactly at the closed constraint 1/(2 mu): accepted
    BeamState edge = BeamState::zero(17);
    for (int j = 1; j < 16; ++j) edge.eta[j] = -1.0 + 1.0 / (2.0 * mu);
    CHECK(collision_guard(edge, mu) == doctest::Approx(1.0 / (2.0 * mu)));
}

TEST_CASE("picard: zero data converges immediately; moderate data contracts") {
    Rig r(false, 16, 12);
    PicardConfig cfg;
    cfg.T = 0.2;
    cfg.dt = 0.025;
    cfg.tol = 1e-10;

    auto [Xz, repz] = r.cs.picard_solve(zero_state(r.g, r.bp.nb), cfg);
    CHECK(repz.status == "converged");
    CHECK(repz.iterations <= 1);

    // moderate data: eta2_0 bump of amplitude 0.1
    CoupledState x0 = zero_state(r.g, r.bp.nb);
    x0.beam.eta_t = bump_nodal(r.g.profile, 0.1);
    cfg.tol = 1e-9;
    auto [X, rep] = r.cs.picard_solve(x0, cfg);
    REQUIRE(rep.status == "converged");
    CHECK(rep.kappa_final < 0.5);

    // the converged trajectory satisfies the discrete nonlinear system
    const double res = r.cs.nonlinear_residual(X);
    CHECK(res < 10 * (cfg.tol + 1e-10));

    // fixed-point self-consistency
    Trajectory X2 = r.cs.picard_map(X, X.levels[0], rep.R_used, rep.mu_used, cfg.weights);
    const double fp = traj_dist(r.cs.ops(), r.bp, X2, X, cfg.weights);
    CHECK(fp < 5e-8);
}

TEST_CASE("compatibility enforcement is idempotent on compatible data") {
    Rig r(false, 16, 12);
    CoupledState x0 = zero_state(r.g, r.bp.nb);
    x0.beam.eta_t = bump_nodal(r.g.profile, 0.2);
    CompatReport rep1, rep2;
    CoupledState c1 = r.cs.enforce_compatibility(x0, &rep1);
    CoupledState c2 = r.cs.enforce_compatibility(c1, &rep2);
    CHECK(rep2.modification < 1e-9);
    CHECK(rep2.divergence_after < 1e-9);
    // the corrected state satisfies the interface trace
    Vec gtop = r.cs.beam_to_faces(x0.beam.eta_t);
    for (int i = 0; i < r.g.nx; ++i)
        CHECK(std::abs(c1.fluid.u2[r.g.iu2(i, r.g.nz)] - gtop[i]) < 1e-10);
}

TEST_CASE("continuation: zero solution, junction continuity of the carried state") {
    BeamParams bp;
    bp.nb = 17;
    bp.beta = 0.5;
    BeamProfile prof = rect_profile(1.0, 17);
    FluidGrid g(prof, 16, 12);
    CoupledState x0 = {FluidState::zero(g), BeamState::zero(17)};

    ContinuationConfig cc;
    cc.T_total = 0.15;
    cc.picard.T = 0.05;
    cc.picard.dt = 0.0125;
    cc.picard.tol = 1e-10;
    ContinuationResult res = continue_solution(prof, bp, 0.05, 1e-10, 16, 12, x0, cc);
    CHECK(res.completed);
    for (const auto& s : res.slabs) CHECK(s.traj.back().fluid.u1.lpNorm<Eigen::Infinity>() < 1e-12);

    // moderate data run: junctions are exact relabelings
    CoupledState x1 = x0;
    x1.beam.eta_t = bump_nodal(prof, 0.08);
    ContinuationResult r2 = continue_solution(prof, bp, 0.05, 1e-10, 16, 12, x1, cc);
    REQUIRE(r2.completed);
    REQUIRE(r2.slabs.size() >= 2);
    for (size_t s = 1; s < r2.slabs.size(); ++s) {
        const auto& prev_end = r2.slabs[s - 1].traj.back();
        const auto& next_start = r2.slabs[s].traj.levels.front();
        CHECK((prev_end.beam.eta - next_start.beam.eta).lpNorm<Eigen::Infinity>() < 1e-10);
        CHECK((prev_end.fluid.u1 - next_start.fluid.u1).lpNorm<Eigen::Infinity>() < 1e-12);
        CHECK((prev_end.fluid.u2 - next_start.fluid.u2).lpNorm<Eigen::Infinity>() < 1e-12);
    }

    // energy is non-increasing for the homogeneous-forcing run
    for (const auto& s : r2.slabs) {
        auto energy = CoupledSolver(FluidGrid(s.profile, 16, 12), bp, 0.05).energy_report(s.traj);
        for (size_t n = 1; n < energy.size(); ++n)
            CHECK(energy[n].total <= energy[n - 1].total + 1e-8);
    }
}
