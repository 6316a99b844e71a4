#include "sr/avoidance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sr/rng.hpp"

namespace sr {

namespace {

constexpr std::size_t kTrajGridCells = 256;
constexpr int kSimplexIters = 200;
constexpr double kSimplexTol = 1e-6;

double clamp_box(double lo, double hi, double x) { return std::clamp(x, lo, hi); }

// Nelder-Mead over a small fixed dimension with box projection inside the
// objective. Returns the best vertex ever seen.
struct SimplexResult {
  std::vector<double> x;
  double value = std::numeric_limits<double>::infinity();
};

template <typename F>
SimplexResult nelder_mead(F&& objective, std::vector<double> start, double step) {
  const std::size_t n = start.size();
  std::vector<std::vector<double>> verts(n + 1, start);
  for (std::size_t i = 0; i < n; ++i) verts[i + 1][i] += step;
  std::vector<double> vals(n + 1);
  for (std::size_t i = 0; i <= n; ++i) vals[i] = objective(verts[i]);

  SimplexResult best;
  auto remember = [&](const std::vector<double>& x, double v) {
    if (v < best.value) {
      best.value = v;
      best.x = x;
    }
  };
  for (std::size_t i = 0; i <= n; ++i) remember(verts[i], vals[i]);

  for (int iter = 0; iter < kSimplexIters; ++iter) {
    std::vector<std::size_t> order(n + 1);
    for (std::size_t i = 0; i <= n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return vals[a] < vals[b];
    });
    const std::size_t lo = order[0], hi = order[n], second_hi = order[n - 1];
    if (vals[hi] - vals[lo] < kSimplexTol) break;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == hi) continue;
      for (std::size_t d = 0; d < n; ++d) centroid[d] += verts[i][d];
    }
    for (double& c : centroid) c /= static_cast<double>(n);

    auto blend = [&](double coeff) {
      std::vector<double> x(n);
      for (std::size_t d = 0; d < n; ++d) x[d] = centroid[d] + coeff * (centroid[d] - verts[hi][d]);
      return x;
    };

    std::vector<double> refl = blend(1.0);
    const double refl_v = objective(refl);
    remember(refl, refl_v);
    if (refl_v < vals[lo]) {
      std::vector<double> exp = blend(2.0);
      const double exp_v = objective(exp);
      remember(exp, exp_v);
      verts[hi] = exp_v < refl_v ? exp : refl;
      vals[hi] = std::min(exp_v, refl_v);
    } else if (refl_v < vals[second_hi]) {
      verts[hi] = refl;
      vals[hi] = refl_v;
    } else {
      std::vector<double> contr = blend(-0.5);
      const double contr_v = objective(contr);
      remember(contr, contr_v);
      if (contr_v < vals[hi]) {
        verts[hi] = contr;
        vals[hi] = contr_v;
      } else {
        for (std::size_t i = 0; i <= n; ++i) {
          if (i == lo) continue;
          for (std::size_t d = 0; d < n; ++d) verts[i][d] = 0.5 * (verts[i][d] + verts[lo][d]);
          vals[i] = objective(verts[i]);
          remember(verts[i], vals[i]);
        }
      }
    }
  }
  return best;
}

}  // namespace

Box Box::inflated(double factor) const {
  Box out = *this;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    const double pad = factor * (hi[i] - lo[i]);
    out.lo[i] -= 0.5 * pad;
    out.hi[i] += 0.5 * pad;
  }
  return out;
}

double cost_traj(const AgentDynamics& dyn, const Plan& plan) {
  const double t0 = plan.t0();
  const double tf = plan.tf();
  double length = 0.0;
  Vec prev = mean_at(dyn, plan, t0);
  for (std::size_t i = 1; i <= kTrajGridCells; ++i) {
    const double t = t0 + (tf - t0) * static_cast<double>(i) / kTrajGridCells;
    const Vec cur = mean_at(dyn, plan, t);
    double seg = 0.0;
    for (std::size_t j = 0; j < cur.size(); ++j) seg += (cur[j] - prev[j]) * (cur[j] - prev[j]);
    length += std::sqrt(seg);
    prev = cur;
  }
  return length;
}

double cost_miss(const AgentDynamics& dyn, const Plan& plan, const std::vector<Goal>& goals) {
  double total = 0.0;
  for (const auto& goal : goals) {
    const Vec mu = mean_at(dyn, plan, goal.time);
    for (std::size_t j = 0; j < mu.size(); ++j) {
      total += (mu[j] - goal.point[j]) * (mu[j] - goal.point[j]);
    }
  }
  return total;
}

double cost_coll(double criterion_min, double lambda_hinge) {
  return lambda_hinge * std::max(0.0, -criterion_min);
}

double criterion_min_against(const AgentDynamics& dyn, const Plan& plan,
                             const ConflictContext& context) {
  if (context.opponents.empty()) return std::numeric_limits<double>::infinity();
  auto own = std::make_shared<MomentFunctions>(dyn, plan);
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < context.opponents.size(); ++i) {
    PairParams params;
    params.delta = context.delta;
    params.lambda_pair = 0.5 * (context.own_diameter + context.opponent_diameters[i]);
    CriterionFn gamma = make_pair_criterion(own, context.opponents[i], params, context.kind);
    // Lower-bound the criterion minimum by the piecewise-linear floor over a
    // uniform grid. A plain grid minimum can sit marginally above zero while
    // the certified detector still finds a dip in between; grading plans by
    // the floor keeps resolution aligned with what detection will accept.
    bool have_local = true;
    try {
      attach_lipschitz(gamma, own, context.opponents[i], params);
    } catch (const VanishingVarianceError&) {
      have_local = false;
    }
    const std::size_t cells = context.cost_grid;
    const double span = gamma.tf - gamma.t0;
    const double h = span / static_cast<double>(cells);
    double prev = gamma.eval(gamma.t0);
    double floor_min = prev;
    for (std::size_t c = 1; c <= cells; ++c) {
      const double t = (c == cells) ? gamma.tf : gamma.t0 + h * static_cast<double>(c);
      const double cur = gamma.eval(t);
      const double l = have_local && gamma.local_lipschitz ? gamma.local_lipschitz(t - h, t)
                                                           : gamma.lipschitz;
      floor_min = std::min(floor_min, 0.5 * (prev + cur) - 0.5 * l * h);
      prev = cur;
    }
    worst = std::min(worst, floor_min);
  }
  return worst;
}

double plan_cost(const AgentDynamics& dyn, const Plan& plan, const std::vector<Goal>& goals,
                 const CostWeights& weights, const ConflictContext& context) {
  const double traj = cost_traj(dyn, plan);
  const double miss = cost_miss(dyn, plan, goals);
  double coll = 0.0;
  if (!context.opponents.empty()) {
    coll = cost_coll(criterion_min_against(dyn, plan, context), weights.lambda_hinge);
  }
  return weights.w_traj * traj + weights.w_miss * miss + weights.w_coll * coll;
}

Plan resolve_wait(const Plan& plan, const AgentDynamics& dyn, double t_coll) {
  const double t0 = plan.t0();
  const double tf = plan.tf();
  const double margin = 1e-3 * (tf - t0);
  double t_star = std::clamp(t_coll, t0 + margin, tf - margin);
  // nudge left off existing setpoint times; holding slightly longer is safe
  auto taken = [&](double t) {
    for (double existing : plan.times) {
      if (existing == t) return true;
    }
    return false;
  };
  for (int attempt = 0; taken(t_star) && attempt < 64; ++attempt) {
    t_star = (t_star - margin > t0) ? t_star - margin : t0 + 0.5 * (t_star - t0);
  }
  if (taken(t_star)) {
    // same hold instruction already present; re-issuing it is a no-op
    return plan_insert(plan, t_star, dyn.initial_mean, true);
  }
  return plan_insert(plan, t_star, dyn.initial_mean);
}

Plan resolve_free(const Plan& plan, const AgentDynamics& dyn, const std::vector<Goal>& goals,
                  const CostWeights& weights, const ConflictContext& context, const Box& arena,
                  int restarts, std::uint64_t seed) {
  const double t0 = plan.t0();
  const double tf = plan.tf();
  const double margin = 1e-3 * (tf - t0);
  const Box box = arena.inflated(0.2);
  const std::size_t dim = dyn.dim();

  auto decode = [&](const std::vector<double>& x) {
    const double t = clamp_box(t0 + margin, tf - margin, x[0]);
    Vec s(dim);
    for (std::size_t j = 0; j < dim; ++j) s[j] = clamp_box(box.lo[j], box.hi[j], x[1 + j]);
    return std::make_pair(t, s);
  };

  auto objective = [&](const std::vector<double>& x) {
    const auto [t, s] = decode(x);
    Plan candidate;
    try {
      candidate = plan_insert(plan, t, s);
    } catch (const std::invalid_argument&) {
      return std::numeric_limits<double>::infinity();
    }
    return plan_cost(dyn, candidate, goals, weights, context);
  };

  SimplexResult best;
  for (int r = 0; r < restarts; ++r) {
    std::vector<double> start(1 + dim);
    if (r == 0) {
      // Reproduce the current reference: inserting (t, xi(t)) changes nothing.
      const double t_mid = 0.5 * (t0 + tf);
      const Vec ref = plan.reference(std::min(tf, t_mid + margin));
      start[0] = t_mid;
      for (std::size_t j = 0; j < dim; ++j) start[1 + j] = ref[j];
    } else {
      Rng rng(seed_stream(seed, 0x46524545, static_cast<std::uint64_t>(r)));
      start[0] = rng.uniform(t0 + margin, tf - margin);
      for (std::size_t j = 0; j < dim; ++j) start[1 + j] = rng.uniform(box.lo[j], box.hi[j]);
    }
    const double step = 0.1 * std::max(tf - t0, box.hi[0] - box.lo[0]);
    SimplexResult res = nelder_mead(objective, start, step);
    if (res.value < best.value) best = res;
  }

  const auto [t, s] = decode(best.x);
  try {
    return plan_insert(plan, t, s);
  } catch (const std::invalid_argument&) {
    return plan;  // degenerate collision with an existing time; keep the plan
  }
}

}  // namespace sr
