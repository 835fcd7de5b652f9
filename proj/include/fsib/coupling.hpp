#pragma once

#include "fsib/nonlinear.hpp"
#include "fsib/norms.hpp"
#include "fsib/stokes.hpp"

#include <functional>
#include <optional>
#include <string>

namespace fsib {

// Fixed-point driver configuration (the ball B(x0,R,mu,T) and the horizon
// adaptation schedule).
struct PicardConfig {
    double R = 0.0;            // 0: auto, 2x the norm of the homogeneous solution
    double mu = 0.0;           // 0: auto, ||(1+eta0)^{-1}||_inf
    double T = 0.4;
    double T_min = 0.0;        // 0: auto, T / 2^6
    double kappa_star = 0.5;   // contraction target
    int max_iters = 25;
    double dt = 0.0125;
    double tol = 1e-9;         // successive-difference tolerance (relative)
    NormWeights weights;
    bool enforce_compat = true;

    void validate() const;
};

struct FixedPointReport {
    std::vector<double> residuals;  // ||X_{k+1} - X_k|| per accepted iteration
    std::vector<double> kappas;     // contraction ratios
    std::vector<double> margins;    // min(1+eta) per iteration
    std::vector<double> halvings;   // horizon values after each halving
    int iterations = 0;
    double T_final = 0.0;
    double kappa_final = 0.0;
    double C_L = 0.0;               // measured linear-solve gain
    double R_used = 0.0, mu_used = 0.0;
    std::string status;             // converged | halved-to-floor | collision
};

struct PartitionedResult {
    CoupledState state;
    int iterations = 0;
    double last_update = 0.0;
    bool converged = false;
    std::vector<double> updates;  // sub-iteration update norms (growth diagnostics)
};

struct CompatReport {
    double modification = 0.0;    // relative size of the applied correction
    double divergence_before = 0.0, divergence_after = 0.0;
};

struct EnergySample {
    double t, total, fluid, beam_kinetic, beam_potential;
    double dissipation;     // nu*|grad u|^2 + gamma*|eta_tx|^2
    double boundary_power;  // total-head influx through Gamma_io
};

// Inner linear coupled solver (monolithic implicit Euler over the saddle
// system) plus the partitioned added-mass path and the Picard driver.
class CoupledSolver {
public:
    CoupledSolver(const FluidGrid& grid, const BeamParams& bp, double nu, double tol = 1e-10);

    const StokesSolver& stokes() const { return stokes_; }
    const FluidOps& ops() const { return stokes_.ops(); }
    const FluidGrid& grid() const { return stokes_.grid(); }
    const BeamParams& beam_params() const { return bp_; }

    // one monolithic step: all coupling conditions at the new level
    CoupledState step(const CoupledState& prev, const RhsBundle& rhs, double dt) const;

    // trajectory solve; rhs[n] feeds the step from level n to n+1
    Trajectory linear_solve(const std::vector<RhsBundle>& rhs, const CoupledState& x0,
                            double dt) const;

    // strongly coupled partitioned step: beam advanced with the (I+N_s) mass
    // and the fluid pressure trace, fluid advanced with the new eta_t
    // Dirichlet data; sub-iterated to the monolithic fixed point.
    // use_added_mass=false removes N_s (the instability experiment).
    PartitionedResult partitioned_step(const CoupledState& prev, const RhsBundle& rhs, double dt,
                                       bool use_added_mass = true, int max_sub = 80) const;

    // nonlinear right-hand sides (F, Theta, H) along X
    std::vector<RhsBundle> nonlinear_rhs(const Trajectory& X) const;

    // the map F: evaluate the nonlinearities along X, then solve the linear
    // system; throws BallError / CollisionError when X leaves the ball
    Trajectory picard_map(const Trajectory& X, const CoupledState& x0, double R, double mu,
                          const NormWeights& w) const;

    std::pair<Trajectory, FixedPointReport> picard_solve(const CoupledState& x0,
                                                         const PicardConfig& cfg) const;

    // residual of the time-discrete nonlinear system along a trajectory
    double nonlinear_residual(const Trajectory& X) const;

    // projection + top-trace correction onto the compatible set
    CoupledState enforce_compatibility(const CoupledState& x0, CompatReport* rep = nullptr) const;

    std::vector<EnergySample> energy_report(const Trajectory& X) const;

    Vec beam_to_faces(const Vec& nodal) const;  // kinematic transfer
    Vec top_trace_nodes(const Vec& cell_field) const;

private:
    struct System {
        SpMat A;
        Eigen::SparseLU<SpMat> lu;
    };

    StokesSolver stokes_;
    BeamParams bp_;
    double tol_;
    Mat Kb_, D2b_;                       // beam interior matrices
    mutable std::shared_ptr<Mat> ns_;    // cached added-mass matrix
    mutable std::map<long long, std::shared_ptr<System>> systems_;

    const Mat& added_mass() const;
    const System& system_for(double dt) const;
    SpMat assemble_coupled(double dt) const;

    int n_u1() const { return grid().n_u1(); }
    int n_u2() const { return grid().n_u2(); }
    int n_p() const { return grid().n_p(); }
    int nb() const { return bp_.nb; }
    int n_total() const { return n_u1() + n_u2() + n_p() + 2 * nb(); }
};

// collision guard: returns min(1 + eta); throws CollisionError when the gap
// bound is violated (strictly below 1/(2 mu); equality is accepted)
double collision_guard(const BeamState& s, double mu);

struct ContinuationConfig {
    double T_total = 1.0;
    int max_slabs = 64;
    PicardConfig picard;
};

struct SlabRecord {
    Trajectory traj;
    FixedPointReport report;
    BeamProfile profile;
    double junction_div = 0.0;  // new-metric divergence of the carried state
};

struct ContinuationResult {
    std::vector<SlabRecord> slabs;
    bool completed = false;
    std::string status;  // completed | horizon-floor | collision
    double t_end = 0.0;
};

// Slab-by-slab continuation: after each converged slab the reference profile
// is rebuilt from eta(T*) (the flattened computational state carries over
// unchanged and etat resets to zero), and the fixed point restarts.
ContinuationResult continue_solution(const BeamProfile& profile0, const BeamParams& bp, double nu,
                                     double tol, int nx, int nz, const CoupledState& x0,
                                     const ContinuationConfig& cfg);

} // namespace fsib
