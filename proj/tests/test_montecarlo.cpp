#include <doctest.h>

#include <cmath>

#include "sr/montecarlo.hpp"

using namespace sr;

namespace {

AgentDynamics plant2(const Vec& start, double k, double nu) {
  AgentDynamics dyn;
  dyn.gain = {k, k};
  dyn.drift = {0.0, 0.0};
  dyn.noise = {nu, nu};
  dyn.initial_mean = start;
  dyn.initial_cov = {0.0, 0.0};
  return dyn;
}

Plan line_plan(const Vec& start, const Vec& goal, double tf) {
  Plan plan;
  plan.times = {0.0, tf};
  plan.setpoints = {start, goal};
  plan.horizon_end = tf;
  return plan;
}

}  // namespace

TEST_CASE("noiseless paths reproduce the mean ODE within O(dt)") {
  const auto dyn = plant2({0.0, 0.0}, 3.0, 0.0);
  const auto plan = line_plan({0.0, 0.0}, {4.0, 2.0}, 2.0);
  SimConfig sim;
  sim.n_draws = 3;
  sim.dt = 1e-3;
  const Ensemble e = simulate_paths(dyn, plan, sim);
  for (std::size_t k = 0; k < e.times.size(); k += 100) {
    const Vec mu = mean_at(dyn, plan, e.times[k]);
    for (std::size_t draw = 0; draw < e.n_draws; ++draw) {
      CHECK(std::abs(e.at(draw, k, 0) - mu[0]) < 0.02);
      CHECK(std::abs(e.at(draw, k, 1) - mu[1]) < 0.02);
    }
  }
}

TEST_CASE("identical sim configs are bit-identical") {
  const auto dyn = plant2({1.0, 1.0}, 2.0, 0.3);
  const auto plan = line_plan({1.0, 1.0}, {5.0, 5.0}, 1.0);
  SimConfig sim;
  sim.n_draws = 10;
  sim.dt = 1e-3;
  sim.master_seed = 99;
  const Ensemble a = simulate_paths(dyn, plan, sim, 4);
  const Ensemble b = simulate_paths(dyn, plan, sim, 4);
  CHECK(a.data == b.data);
  const Ensemble c = simulate_paths(dyn, plan, sim, 5);
  CHECK(a.data != c.data);
}

TEST_CASE("metrics on degenerate ensembles") {
  const auto dyn = plant2({0.0, 0.0}, 3.0, 0.0);
  SimConfig sim;
  sim.n_draws = 20;
  sim.dt = 1e-2;

  SUBCASE("two agents glued together collide in every draw") {
    const auto plan = line_plan({0.0, 0.0}, {2.0, 0.0}, 1.0);
    const Ensemble e1 = simulate_paths(dyn, plan, sim, 1);
    const Ensemble e2 = simulate_paths(dyn, plan, sim, 1);
    const MetricsRow row = estimate_metrics({e1, e2}, {{2.0, 0.0}, {2.0, 0.0}},
                                            {{0.0, 1.0}, {1.0, 0.0}}, 0);
    CHECK(row.collision_prob_pct == 100.0);
    CHECK(row.max_instant_pair_freq == 1.0);
  }
  SUBCASE("agents forever far apart never collide") {
    const Ensemble e1 = simulate_paths(dyn, line_plan({0.0, 0.0}, {0.0, 0.0}, 1.0), sim, 1);
    const Ensemble e2 = simulate_paths(plant2({0.0, 10.0}, 3.0, 0.0),
                                       line_plan({0.0, 10.0}, {0.0, 10.0}, 1.0), sim, 2);
    const MetricsRow row = estimate_metrics({e1, e2}, {{0.0, 0.0}, {0.0, 10.0}},
                                            {{0.0, 1.0}, {1.0, 0.0}}, 0);
    CHECK(row.collision_prob_pct == 0.0);
    CHECK(row.max_instant_pair_freq == 0.0);
    CHECK(row.avg_sqr_goal_dist < 1e-6);
  }
  SUBCASE("misaligned ensembles are rejected") {
    const Ensemble e1 = simulate_paths(dyn, line_plan({0.0, 0.0}, {2.0, 0.0}, 1.0), sim, 1);
    SimConfig other = sim;
    other.dt = 5e-3;
    const Ensemble e2 = simulate_paths(dyn, line_plan({0.0, 0.0}, {2.0, 0.0}, 1.0), other, 2);
    CHECK_THROWS_AS(estimate_metrics({e1, e2}, {{2.0, 0.0}, {2.0, 0.0}},
                                     {{0.0, 1.0}, {1.0, 0.0}}, 0),
                    std::invalid_argument);
  }
}

TEST_CASE("halving dt moves the crossing collision estimate by less than two points") {
  // corridor crossing with contact-scale noise
  const auto dyn1 = plant2({5.0, 10.0}, 2.0, 0.15);
  const auto dyn2 = plant2({5.0, 0.0}, 5.0, 0.15);
  const auto plan1 = line_plan({5.0, 10.0}, {5.0, 5.0}, 2.0);
  Plan plan2;
  plan2.times = {0.0, 1.0, 2.0};
  plan2.setpoints = {{5.0, 0.0}, {5.0, 7.0}, {0.0, 7.0}};
  plan2.horizon_end = 2.0;

  auto estimate = [&](double dt) {
    SimConfig sim;
    sim.n_draws = 100;
    sim.dt = dt;
    sim.master_seed = 31;
    const Ensemble e1 = simulate_paths(dyn1, plan1, sim, 1);
    const Ensemble e2 = simulate_paths(dyn2, plan2, sim, 2);
    return estimate_metrics({e1, e2}, {{5.0, 5.0}, {0.0, 7.0}}, {{0.0, 1.0}, {1.0, 0.0}}, 0)
        .collision_prob_pct;
  };
  const double coarse = estimate(1e-3);
  const double fine = estimate(5e-4);
  CHECK(coarse > 50.0);  // the uncoordinated crossing does collide
  CHECK(std::abs(coarse - fine) < 2.0);
}

TEST_CASE("empirical moments follow the closed forms on a driven plant") {
  AgentDynamics dyn;
  dyn.gain = {2.0};
  dyn.drift = {0.3};
  dyn.noise = {0.1};
  dyn.initial_mean = {1.0};
  dyn.initial_cov = {0.05};
  Plan plan;
  plan.times = {0.0, 0.6};
  plan.setpoints = {{1.0}, {3.0}};
  plan.horizon_end = 1.5;
  SimConfig sim;
  sim.n_draws = 30000;
  sim.dt = 1e-3;
  sim.master_seed = 17;
  const auto emp = empirical_moments(dyn, plan, sim, {0.5, 1.5});
  for (std::size_t qi = 0; qi < emp.times.size(); ++qi) {
    const double mu = mean_at(dyn, plan, emp.times[qi])[0];
    const double var = cov_at(dyn, plan, emp.times[qi])[0];
    const double se = std::sqrt(emp.variance[qi][0] / static_cast<double>(sim.n_draws));
    CHECK(std::abs(emp.mean[qi][0] - mu) <= 3.0 * se + 3e-3);
    CHECK(emp.variance[qi][0] == doctest::Approx(var).epsilon(0.06));
  }
  // cross moment against the first query time
  const double cross = cross_cov_at(dyn, plan, 0.5, 1.5)[0];
  CHECK(emp.cross[1][0] == doctest::Approx(cross).epsilon(0.12));
}
