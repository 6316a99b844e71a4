#include "sr/montecarlo.hpp"

#include <algorithm>
#include <cmath>

#include "sr/rng.hpp"

namespace sr {

namespace {

std::vector<double> time_grid(const Plan& plan, double dt) {
  std::vector<double> times;
  const double t0 = plan.t0();
  const double tf = plan.tf();
  const std::size_t steps = static_cast<std::size_t>(std::ceil((tf - t0) / dt - 1e-12));
  times.reserve(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) times.push_back(std::min(tf, t0 + dt * k));
  return times;
}

// One Euler-Maruyama path, invoking `visit(step, state)` at every grid time.
template <typename Visitor>
void walk_path(const AgentDynamics& dyn, const Plan& plan, const std::vector<double>& times,
               Rng& rng, Visitor&& visit) {
  const std::size_t d = dyn.dim();
  Vec x(d);
  for (std::size_t j = 0; j < d; ++j) {
    x[j] = dyn.initial_mean[j] + std::sqrt(dyn.initial_cov[j]) * rng.normal();
  }
  visit(std::size_t{0}, x);
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double h = times[k] - times[k - 1];
    // the reference is constant on each step interval (times[k-1], times[k]]
    const Vec xi = plan.reference(times[k]);
    const double sq = std::sqrt(h);
    for (std::size_t j = 0; j < d; ++j) {
      x[j] += dyn.gain[j] * (xi[j] - x[j]) * h + dyn.drift[j] * x[j] * h +
              std::sqrt(dyn.noise[j]) * sq * rng.normal();
    }
    visit(k, x);
  }
}

}  // namespace

Ensemble simulate_paths(const AgentDynamics& dyn, const Plan& plan, const SimConfig& sim,
                        std::uint64_t stream_tag) {
  sim.validate();
  dyn.validate();
  plan.validate(dyn.dim());
  Ensemble out;
  out.times = time_grid(plan, sim.dt);
  out.n_draws = sim.n_draws;
  out.dim = dyn.dim();
  out.data.assign(out.n_draws * out.times.size() * out.dim, 0.0);
  for (std::size_t draw = 0; draw < sim.n_draws; ++draw) {
    Rng rng(seed_stream(sim.master_seed, stream_tag, draw));
    walk_path(dyn, plan, out.times, rng, [&](std::size_t step, const Vec& x) {
      for (std::size_t j = 0; j < out.dim; ++j) {
        out.data[(draw * out.times.size() + step) * out.dim + j] = x[j];
      }
    });
  }
  return out;
}

EmpiricalMoments empirical_moments(const AgentDynamics& dyn, const Plan& plan,
                                   const SimConfig& sim, const std::vector<double>& query_times,
                                   std::uint64_t stream_tag) {
  sim.validate();
  dyn.validate();
  plan.validate(dyn.dim());
  const std::vector<double> times = time_grid(plan, sim.dt);
  const std::size_t d = dyn.dim();

  // nearest grid index for each query time
  std::vector<std::size_t> q_index;
  for (double q : query_times) {
    std::size_t best = 0;
    double best_err = std::abs(times[0] - q);
    for (std::size_t k = 1; k < times.size(); ++k) {
      const double err = std::abs(times[k] - q);
      if (err < best_err) {
        best_err = err;
        best = k;
      }
    }
    q_index.push_back(best);
  }

  EmpiricalMoments out;
  out.n_draws = sim.n_draws;
  for (std::size_t k : q_index) out.times.push_back(times[k]);
  const std::size_t nq = q_index.size();
  std::vector<Vec> sum(nq, Vec(d, 0.0)), sum_sq(nq, Vec(d, 0.0));
  std::vector<Vec> sum_cross(nq, Vec(d, 0.0));  // against the first query time

  std::vector<Vec> snapshot(nq, Vec(d, 0.0));
  for (std::size_t draw = 0; draw < sim.n_draws; ++draw) {
    Rng rng(seed_stream(sim.master_seed, stream_tag, draw));
    walk_path(dyn, plan, times, rng, [&](std::size_t step, const Vec& x) {
      for (std::size_t qi = 0; qi < nq; ++qi) {
        if (q_index[qi] == step) snapshot[qi] = x;
      }
    });
    for (std::size_t qi = 0; qi < nq; ++qi) {
      for (std::size_t j = 0; j < d; ++j) {
        sum[qi][j] += snapshot[qi][j];
        sum_sq[qi][j] += snapshot[qi][j] * snapshot[qi][j];
        sum_cross[qi][j] += snapshot[qi][j] * snapshot[0][j];
      }
    }
  }

  const double n = static_cast<double>(sim.n_draws);
  const double bessel = std::max(1.0, n - 1.0);
  out.mean.assign(nq, Vec(d, 0.0));
  out.variance.assign(nq, Vec(d, 0.0));
  out.cross.assign(nq, Vec(d, 0.0));
  for (std::size_t qi = 0; qi < nq; ++qi) {
    for (std::size_t j = 0; j < d; ++j) {
      const double m = sum[qi][j] / n;
      out.mean[qi][j] = m;
      out.variance[qi][j] = std::max(0.0, (sum_sq[qi][j] - n * m * m) / bessel);
      const double m0 = sum[0][j] / n;
      out.cross[qi][j] = (sum_cross[qi][j] - n * m * m0) / bessel;
    }
  }
  return out;
}

MetricsRow estimate_metrics(const std::vector<Ensemble>& ensembles,
                            const std::vector<Vec>& final_goals,
                            const std::vector<std::vector<double>>& pair_lambda, int rounds) {
  if (ensembles.empty()) throw std::invalid_argument("no ensembles");
  const std::size_t n_agents = ensembles.size();
  const std::size_t n_draws = ensembles.front().n_draws;
  const std::size_t n_steps = ensembles.front().times.size();
  const std::size_t d = ensembles.front().dim;
  for (const auto& e : ensembles) {
    if (e.n_draws != n_draws || e.times.size() != n_steps || e.dim != d ||
        e.times != ensembles.front().times) {
      throw std::invalid_argument("ensembles are not time-aligned");
    }
  }

  MetricsRow row;
  row.resolution_rounds = rounds;

  std::size_t colliding_draws = 0;
  std::vector<std::size_t> instant_hits;  // per (pair, step) contact counts
  const std::size_t n_pairs = n_agents * (n_agents - 1) / 2;
  instant_hits.assign(std::max<std::size_t>(1, n_pairs * n_steps), 0);

  double path_sum = 0.0;
  double goal_sum = 0.0;

  for (std::size_t draw = 0; draw < n_draws; ++draw) {
    bool contact = false;
    std::size_t pair_idx = 0;
    for (std::size_t a = 0; a < n_agents; ++a) {
      for (std::size_t b = a + 1; b < n_agents; ++b, ++pair_idx) {
        const double lambda = pair_lambda[a][b];
        for (std::size_t k = 0; k < n_steps; ++k) {
          double dist_sq = 0.0;
          for (std::size_t j = 0; j < d; ++j) {
            const double diff = ensembles[a].at(draw, k, j) - ensembles[b].at(draw, k, j);
            dist_sq += diff * diff;
          }
          if (dist_sq <= lambda * lambda) {
            contact = true;
            ++instant_hits[pair_idx * n_steps + k];
          }
        }
      }
    }
    if (contact) ++colliding_draws;

    for (std::size_t a = 0; a < n_agents; ++a) {
      double length = 0.0;
      for (std::size_t k = 1; k < n_steps; ++k) {
        double seg = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
          const double diff = ensembles[a].at(draw, k, j) - ensembles[a].at(draw, k - 1, j);
          seg += diff * diff;
        }
        length += std::sqrt(seg);
      }
      path_sum += length;
      double miss = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double diff = ensembles[a].at(draw, n_steps - 1, j) - final_goals[a][j];
        miss += diff * diff;
      }
      goal_sum += miss;
    }
  }

  row.collision_prob_pct = 100.0 * static_cast<double>(colliding_draws) / static_cast<double>(n_draws);
  std::size_t worst = 0;
  for (std::size_t hits : instant_hits) worst = std::max(worst, hits);
  row.max_instant_pair_freq = static_cast<double>(worst) / static_cast<double>(n_draws);
  row.avg_path_length = path_sum / static_cast<double>(n_draws * n_agents);
  row.avg_sqr_goal_dist = goal_sum / static_cast<double>(n_draws * n_agents);
  return row;
}

}  // namespace sr
