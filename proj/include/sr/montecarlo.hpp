#pragma once

#include <cstdint>
#include <vector>

#include "sr/sde_model.hpp"

namespace sr {

struct SimConfig {
  std::size_t n_draws = 100;
  double dt = 1e-3;
  std::uint64_t master_seed = 0;
  void validate() const {
    if (n_draws < 1) throw std::invalid_argument("need at least one draw");
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  }
};

// Euler-Maruyama path ensemble. data is draw-major: draw, then step, then
// dimension. Draw i uses the stream (master_seed, stream_tag, i), so the
// ensemble is independent of evaluation order.
struct Ensemble {
  std::vector<double> times;
  std::size_t n_draws = 0;
  std::size_t dim = 0;
  std::vector<double> data;

  double at(std::size_t draw, std::size_t step, std::size_t j) const {
    return data[(draw * times.size() + step) * dim + j];
  }
};

Ensemble simulate_paths(const AgentDynamics& dyn, const Plan& plan, const SimConfig& sim,
                        std::uint64_t stream_tag = 0);

// Streaming empirical moments at selected times; avoids materialising large
// ensembles when only means/variances are needed.
struct EmpiricalMoments {
  std::vector<double> times;
  std::vector<Vec> mean;      // per time, per dimension
  std::vector<Vec> variance;  // per time, per dimension (unbiased)
  std::vector<Vec> cross;     // E[(x(s)-mu(s))(x(t)-mu(t))] vs times.front()
  std::size_t n_draws = 0;
};
EmpiricalMoments empirical_moments(const AgentDynamics& dyn, const Plan& plan,
                                   const SimConfig& sim, const std::vector<double>& query_times,
                                   std::uint64_t stream_tag = 0);

struct MetricsRow {
  double collision_prob_pct = 0.0;      // % of draws with any pairwise contact anywhere
  double max_instant_pair_freq = 0.0;   // worst per-instant pairwise contact frequency (fraction)
  double avg_path_length = 0.0;         // mean over draws and agents
  double avg_sqr_goal_dist = 0.0;       // mean squared final-state goal distance
  int resolution_rounds = 0;
};

// Table metrics over time-aligned ensembles. pair_lambda[a][b] is the
// contact distance for the (a, b) pair; final_goals holds one goal per agent.
MetricsRow estimate_metrics(const std::vector<Ensemble>& ensembles,
                            const std::vector<Vec>& final_goals,
                            const std::vector<std::vector<double>>& pair_lambda, int rounds);

}  // namespace sr
