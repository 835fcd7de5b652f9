#pragma once

#include "fsib/beam.hpp"
#include "fsib/grid.hpp"
#include "fsib/operators.hpp"

#include <vector>

namespace fsib {

struct CoupledState {
    FluidState fluid;
    BeamState beam;
};

// Uniform-step trajectory over one time slab [t0, t0 + dt*(levels-1)].
struct Trajectory {
    std::vector<CoupledState> levels;
    double dt = 0.0;
    double t0 = 0.0;

    int steps() const { return static_cast<int>(levels.size()) - 1; }
    double horizon() const { return dt * steps(); }
    const CoupledState& back() const { return levels.back(); }
};

// Weights of the discrete stand-in for the H^{2,1} x L2H1 x H^{4,2} norm:
// max over levels of (|u|_H1 + |eta|_H2 + |eta_t|_L2) plus the L2-in-time of
// (|u|_H2 + |eta|_H4).
struct NormWeights {
    double u_h1 = 1.0, eta_h2 = 1.0, etat_l2 = 1.0;
    double u_h2 = 1.0, eta_h4 = 1.0;
};

double fluid_l2(const FluidOps& ops, const Vec& u1, const Vec& u2);
double fluid_h1(const FluidOps& ops, const Vec& u1, const Vec& u2);
double fluid_h2(const FluidOps& ops, const Vec& u1, const Vec& u2);
double beam_sobolev(const BeamParams& p, const Vec& eta, int order);  // H^order, order<=4

double state_norm_sup(const FluidOps& ops, const BeamParams& p, const CoupledState& s,
                      const NormWeights& w);
double state_norm_l2t(const FluidOps& ops, const BeamParams& p, const CoupledState& s,
                      const NormWeights& w);
double traj_norm(const FluidOps& ops, const BeamParams& p, const Trajectory& X,
                 const NormWeights& w);
double traj_dist(const FluidOps& ops, const BeamParams& p, const Trajectory& A,
                 const Trajectory& B, const NormWeights& w);

} // namespace fsib
