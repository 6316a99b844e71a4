#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "sr/criterion.hpp"
#include "sr/detection.hpp"
#include "sr/sde_model.hpp"

namespace sr {

struct CostWeights {
  double w_traj = 10.0;
  double w_miss = 1e3;
  double w_coll = 1e6;
  double lambda_hinge = 1.0;
};

struct Goal {
  double time = 0.0;
  Vec point;
};

// Axis-aligned box the FREE optimizer may place setpoints in.
struct Box {
  Vec lo;
  Vec hi;
  Box inflated(double factor) const;
};

// Everything a candidate plan is scored against: the opponents' current
// trajectories and the criterion parameters. Opponent moments are shared so
// repeated cost evaluations do not recompute their Lipschitz constants.
struct ConflictContext {
  std::vector<std::shared_ptr<const MomentFunctions>> opponents;
  double delta = 0.05;
  CriterionKind kind = CriterionKind::kWhittle2D;
  double own_diameter = 1.0;
  std::vector<double> opponent_diameters;
  std::size_t cost_grid = 512;  // grid for the hinge-loss minimum
};

// Arc length of the mean trajectory, chord-summed on a 256-cell grid.
double cost_traj(const AgentDynamics& dyn, const Plan& plan);

// Sum of squared distances between the mean and each timed goal.
double cost_miss(const AgentDynamics& dyn, const Plan& plan, const std::vector<Goal>& goals);

// Hinge loss on the criterion minimum.
double cost_coll(double criterion_min, double lambda_hinge);

// Smallest pairwise-criterion minimum of `plan` against the context's
// opponents (+inf when there are none).
double criterion_min_against(const AgentDynamics& dyn, const Plan& plan,
                             const ConflictContext& context);

double plan_cost(const AgentDynamics& dyn, const Plan& plan, const std::vector<Goal>& goals,
                 const CostWeights& weights, const ConflictContext& context);

// WAIT: hold at the start state until the detected conflict time.
Plan resolve_wait(const Plan& plan, const AgentDynamics& dyn, double t_coll);

// FREE: multistart derivative-free search for the best single time-setpoint
// insertion. Deterministic for a fixed seed. The first restart is seeded
// with an insertion that reproduces the current reference signal, so the
// reported best never costs more than the unmodified plan.
Plan resolve_free(const Plan& plan, const AgentDynamics& dyn, const std::vector<Goal>& goals,
                  const CostWeights& weights, const ConflictContext& context, const Box& arena,
                  int restarts = 10, std::uint64_t seed = 0);

}  // namespace sr
