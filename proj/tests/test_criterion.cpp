#include <doctest.h>

#include <cmath>
#include <memory>

#include "sr/criterion.hpp"
#include "sr/lipschitz.hpp"
#include "sr/rng.hpp"

using namespace sr;

namespace {

// static 2-D agent: gains keep the mean pinned at `pos` with variance c0
std::shared_ptr<MomentFunctions> static_agent(const Vec& pos, const Vec& var, double tf = 1.0) {
  AgentDynamics dyn;
  dyn.gain = {1.0, 1.0};
  dyn.drift = {0.0, 0.0};
  dyn.noise = {2.0 * var[0], 2.0 * var[1]};  // nu = 2 k C0 keeps the variance stationary
  dyn.initial_mean = pos;
  dyn.initial_cov = var;
  Plan plan;
  plan.times = {0.0};
  plan.setpoints = {pos};
  plan.horizon_end = tf;
  return std::make_shared<MomentFunctions>(dyn, plan);
}

PairParams params_of(double delta, double lambda) {
  PairParams p;
  p.delta = delta;
  p.lambda_pair = lambda;
  return p;
}

}  // namespace

TEST_CASE("chebyshev radius") {
  CHECK(chebyshev_radius(0.0, 0.05) == 0.0);
  CHECK(chebyshev_radius(0.1, 0.05) == doctest::Approx(2.0));
  CHECK(chebyshev_radius(0.00001, 0.05) == doctest::Approx(0.02));
}

TEST_CASE("whittle radius") {
  SUBCASE("isotropic case") {
    CHECK(whittle_radius({0.1, 0.0, 0.0, 0.1}, 0, 0.05) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  }
  SUBCASE("diagonal equal variances simplify to sigma / sqrt(delta)") {
    Rng rng(8);
    for (int i = 0; i < 100; ++i) {
      const double sigma_sq = rng.uniform(1e-4, 2.0);
      const double delta = rng.uniform(0.01, 0.5);
      CHECK(whittle_radius({sigma_sq, 0.0, 0.0, sigma_sq}, 0, delta) ==
            doctest::Approx(std::sqrt(sigma_sq / delta)).epsilon(1e-10));
    }
  }
  SUBCASE("degenerate covariance collapses the inner root") {
    const double c11 = 0.3, c22 = 0.2;
    const double c12 = std::sqrt(c11 * c22);
    CHECK(whittle_radius({c11, c12, c12, c22}, 0, 0.1) ==
          doctest::Approx(std::sqrt(c11 / (2.0 * 0.1))).epsilon(1e-9));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(whittle_radius({0.1, 0.0, 0.0, 0.0}, 0, 0.05), SingularCovarianceError);
    CHECK_THROWS_AS(whittle_radius({0.1, 0.4, 0.4, 0.1}, 0, 0.05), InvalidCovarianceError);
  }
}

TEST_CASE("whittle radius never exceeds the chebyshev radius on diagonal covariances") {
  Rng rng(31);
  for (int i = 0; i < 10000; ++i) {
    const double c11 = rng.uniform(1e-4, 1.0);
    const double c22 = rng.uniform(1e-4, 1.0);
    const double delta = rng.uniform(0.01, 0.5);
    const double w = whittle_radius({c11, 0.0, 0.0, c22}, 0, delta);
    const double c = chebyshev_radius(c11, delta);
    CHECK(w <= c + 1e-12);
  }
}

TEST_CASE("pair criterion values for static agents") {
  SUBCASE("identical means are always conflicted") {
    auto a = static_agent({1.0, 1.0}, {0.01, 0.01});
    auto b = static_agent({1.0, 1.0}, {0.02, 0.02});
    const auto gamma = make_pair_criterion(a, b, params_of(0.05, 1.0), CriterionKind::kChebyshev1D);
    for (double t : {0.0, 0.5, 1.0}) CHECK(gamma.eval(t) < 0.0);
  }
  SUBCASE("five apart with tiny variance") {
    auto a = static_agent({0.0, 0.0}, {1e-5, 1e-5});
    auto b = static_agent({5.0, 0.0}, {1e-5, 1e-5});
    const auto gamma = make_pair_criterion(a, b, params_of(0.05, 1.0), CriterionKind::kChebyshev1D);
    CHECK(gamma.eval(0.5) == doctest::Approx(5.0 - 1.0 - 0.02 - 0.02).epsilon(1e-9));
  }
  SUBCASE("zero crossings of the two criterion kinds") {
    // solve gamma = 0 over the mean gap d for C = diag(0.1, 0.1), delta = 0.05
    auto crossing = [](CriterionKind kind) {
      double lo = 1.0, hi = 10.0;
      for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        auto a = static_agent({0.0, 0.0}, {0.1, 0.1});
        auto b = static_agent({mid, 0.0}, {0.1, 0.1});
        const auto gamma = make_pair_criterion(a, b, params_of(0.05, 1.0), kind);
        (gamma.eval(0.5) < 0.0 ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    };
    CHECK(crossing(CriterionKind::kChebyshev1D) == doctest::Approx(5.0).epsilon(1e-6));
    CHECK(crossing(CriterionKind::kWhittle2D) ==
          doctest::Approx(1.0 + 2.0 * std::sqrt(2.0)).epsilon(1e-6));
  }
}

TEST_CASE("whittle construction rejects non-planar agents") {
  AgentDynamics dyn;
  dyn.gain = {1.0};
  dyn.drift = {0.0};
  dyn.noise = {0.0};
  dyn.initial_mean = {0.0};
  dyn.initial_cov = {0.0};
  Plan plan;
  plan.times = {0.0};
  plan.setpoints = {{0.0}};
  plan.horizon_end = 1.0;
  auto a = std::make_shared<MomentFunctions>(dyn, plan);
  auto b = std::make_shared<MomentFunctions>(dyn, plan);
  CHECK_THROWS_AS(make_pair_criterion(a, b, params_of(0.05, 1.0), CriterionKind::kWhittle2D),
                  std::invalid_argument);
}

TEST_CASE("attached Lipschitz constants") {
  SUBCASE("static agents give a constant criterion") {
    auto a = static_agent({0.0, 0.0}, {0.01, 0.01});
    auto b = static_agent({5.0, 0.0}, {0.01, 0.01});
    auto gamma = make_pair_criterion(a, b, params_of(0.05, 1.0), CriterionKind::kChebyshev1D);
    CHECK(attach_lipschitz(gamma, a, b, params_of(0.05, 1.0)) == doctest::Approx(0.0));
  }
  SUBCASE("formula arithmetic of the chebyshev bound") {
    // L <= L(mu_a) + L(mu_b) + sqrt(2/delta) (L(sigma_a) + L(sigma_b))
    const double l = lip_sum(lip_sum(1.0, 1.0),
                             lip_scale(lip_sum(0.1, 0.1), std::sqrt(2.0 / 0.05)));
    CHECK(l == doctest::Approx(3.2649).epsilon(1e-4));
  }
  SUBCASE("variance infimum sits at the horizon start when variance grows") {
    AgentDynamics dyn;
    dyn.gain = {1.0, 1.0};
    dyn.drift = {0.0, 0.0};
    dyn.noise = {0.5, 0.5};  // stationary variance 0.25 > C0
    dyn.initial_mean = {0.0, 0.0};
    dyn.initial_cov = {0.01, 0.01};
    Plan plan;
    plan.times = {0.0};
    plan.setpoints = {{0.0, 0.0}};
    plan.horizon_end = 2.0;
    MomentFunctions m(dyn, plan);
    CHECK(m.cov_inf(0) == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(m.cov_sup(0) == doctest::Approx(cov_at(dyn, plan, 2.0)[0]).epsilon(1e-12));
  }
  SUBCASE("vanishing variance with growing uncertainty has no finite constant") {
    AgentDynamics dyn;
    dyn.gain = {1.0, 1.0};
    dyn.drift = {0.0, 0.0};
    dyn.noise = {0.5, 0.5};
    dyn.initial_mean = {0.0, 0.0};
    dyn.initial_cov = {0.0, 0.0};
    Plan plan;
    plan.times = {0.0};
    plan.setpoints = {{0.0, 0.0}};
    plan.horizon_end = 1.0;
    auto a = std::make_shared<MomentFunctions>(dyn, plan);
    auto b = static_agent({4.0, 0.0}, {0.01, 0.01});
    auto gamma = make_pair_criterion(a, b, params_of(0.05, 1.0), CriterionKind::kWhittle2D);
    CHECK_THROWS_AS(attach_lipschitz(gamma, a, b, params_of(0.05, 1.0)), VanishingVarianceError);
  }
}

TEST_CASE("attached constants bound sampled difference quotients of moving pairs") {
  Rng rng(314);
  for (int trial = 0; trial < 5; ++trial) {
    AgentDynamics dyn_a, dyn_b;
    dyn_a.gain = {rng.uniform(1.0, 4.0), rng.uniform(1.0, 4.0)};
    dyn_a.drift = {0.0, 0.0};
    dyn_a.noise = {rng.uniform(0.05, 0.3), rng.uniform(0.05, 0.3)};
    dyn_a.initial_mean = {0.0, 0.0};
    dyn_a.initial_cov = {1e-4, 1e-4};
    dyn_b = dyn_a;
    dyn_b.initial_mean = {rng.uniform(2.0, 6.0), rng.uniform(-2.0, 2.0)};

    Plan plan_a, plan_b;
    plan_a.times = {0.0, 2.0};
    plan_a.setpoints = {dyn_a.initial_mean, {rng.uniform(2.0, 6.0), rng.uniform(2.0, 6.0)}};
    plan_a.horizon_end = 2.0;
    plan_b.times = {0.0, 2.0};
    plan_b.setpoints = {dyn_b.initial_mean, {rng.uniform(-4.0, 0.0), rng.uniform(2.0, 6.0)}};
    plan_b.horizon_end = 2.0;

    auto ma = std::make_shared<MomentFunctions>(dyn_a, plan_a);
    auto mb = std::make_shared<MomentFunctions>(dyn_b, plan_b);
    for (CriterionKind kind : {CriterionKind::kChebyshev1D, CriterionKind::kWhittle2D}) {
      auto gamma = make_pair_criterion(ma, mb, params_of(0.05, 1.0), kind);
      const double l = attach_lipschitz(gamma, ma, mb, params_of(0.05, 1.0));
      for (int i = 0; i < 1000; ++i) {
        const double s = rng.uniform(0.0, 2.0);
        const double t = rng.uniform(0.0, 2.0);
        if (s == t) continue;
        CHECK(std::abs(gamma.eval(s) - gamma.eval(t)) / std::abs(s - t) <= l + 1e-9);
      }
    }
  }
}

TEST_CASE("multi-agent criterion is the pointwise minimum") {
  auto a = static_agent({0.0, 0.0}, {1e-5, 1e-5});
  auto mk = [&](const Vec& pos) {
    auto b = static_agent(pos, {1e-5, 1e-5});
    auto gamma = make_pair_criterion(a, b, params_of(0.05, 1.0), CriterionKind::kChebyshev1D);
    attach_lipschitz(gamma, a, b, params_of(0.05, 1.0));
    return gamma;
  };

  SUBCASE("singleton list is the pairwise criterion") {
    const auto g = mk({5.0, 0.0});
    const auto joint = multi_agent_criterion({g});
    for (double t : {0.0, 0.3, 1.0}) CHECK(joint.eval(t) == doctest::Approx(g.eval(t)));
  }
  SUBCASE("a dominated constituent pins the minimum") {
    CriterionFn minus_one = mk({5.0, 0.0});
    minus_one.eval = [](double) { return -1.0; };
    const auto joint = multi_agent_criterion({mk({5.0, 0.0}), minus_one});
    for (double t : {0.0, 0.5, 1.0}) CHECK(joint.eval(t) <= -1.0);
  }
  SUBCASE("three constituents at known values") {
    const auto joint = multi_agent_criterion({mk({4.96, 0.0}), mk({3.0, 0.0}), mk({1.5, 0.0})});
    // pairwise values: 4.96-1.04 = 3.92ish, 1.96ish, 0.46ish; min is the last
    const auto g3 = mk({1.5, 0.0});
    CHECK(joint.eval(0.5) == doctest::Approx(g3.eval(0.5)));
  }
  SUBCASE("exact min structure at random times") {
    const auto g1 = mk({5.0, 0.0});
    const auto g2 = mk({0.0, 3.0});
    const auto g3 = mk({-4.0, 1.0});
    const auto joint = multi_agent_criterion({g1, g2, g3});
    Rng rng(12);
    for (int i = 0; i < 1000; ++i) {
      const double t = rng.uniform(0.0, 1.0);
      const double expected = std::min({g1.eval(t), g2.eval(t), g3.eval(t)});
      CHECK(joint.eval(t) == expected);
    }
    CHECK(joint.lipschitz == std::max({g1.lipschitz, g2.lipschitz, g3.lipschitz}));
  }
  SUBCASE("empty list is rejected") {
    CHECK_THROWS_AS(multi_agent_criterion({}), std::invalid_argument);
  }
}

TEST_CASE("positive criterion implies empirically rare collisions (small suite)") {
  // the acceptance suite runs the full 100-configuration version
  Rng rng(2718);
  const double delta = 0.05;
  const double lambda = 1.0;
  int checked = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const Vec var_a{rng.uniform(1e-4, 1.0), rng.uniform(1e-4, 1.0)};
    const Vec var_b{rng.uniform(1e-4, 1.0), rng.uniform(1e-4, 1.0)};
    const Vec pos_a{0.0, 0.0};
    const Vec pos_b{rng.uniform(0.0, 14.0), rng.uniform(-2.0, 2.0)};
    auto a = static_agent(pos_a, var_a);
    auto b = static_agent(pos_b, var_b);
    for (CriterionKind kind : {CriterionKind::kChebyshev1D, CriterionKind::kWhittle2D}) {
      const auto gamma = make_pair_criterion(a, b, params_of(delta, lambda), kind);
      if (gamma.eval(0.5) <= 0.0) continue;
      ++checked;
      std::size_t hits = 0;
      const std::size_t draws = 20000;
      for (std::size_t i = 0; i < draws; ++i) {
        double dist_sq = 0.0;
        for (int j = 0; j < 2; ++j) {
          const double xa = pos_a[j] + std::sqrt(var_a[j]) * rng.normal();
          const double xb = pos_b[j] + std::sqrt(var_b[j]) * rng.normal();
          dist_sq += (xa - xb) * (xa - xb);
        }
        if (dist_sq <= lambda * lambda) ++hits;
      }
      const double freq = static_cast<double>(hits) / static_cast<double>(draws);
      const double se = std::sqrt(delta * (1.0 - delta) / static_cast<double>(draws));
      CHECK(freq < delta + 3.0 * se);
    }
  }
  CHECK(checked >= 5);
}

TEST_CASE("separated confinement boxes contain only collision-free joint samples") {
  Rng rng(555);
  const double lambda = 1.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Vec mu_a{0.0, 0.0};
    const Vec mu_b{rng.uniform(2.0, 8.0), rng.uniform(-1.0, 1.0)};
    const Vec r_a{rng.uniform(0.1, 1.0), rng.uniform(0.1, 1.0)};
    const Vec r_b{rng.uniform(0.1, 1.0), rng.uniform(0.1, 1.0)};
    // require the disjunctive separation in at least one dimension
    bool separated = false;
    for (int j = 0; j < 2; ++j) {
      if (std::abs(mu_a[j] - mu_b[j]) > lambda + r_a[j] + r_b[j]) separated = true;
    }
    if (!separated) continue;
    for (int i = 0; i < 200; ++i) {
      Vec xa(2), xb(2);
      for (int j = 0; j < 2; ++j) {
        xa[j] = mu_a[j] + rng.uniform(-r_a[j], r_a[j]);
        xb[j] = mu_b[j] + rng.uniform(-r_b[j], r_b[j]);
      }
      const double dist = std::hypot(xa[0] - xb[0], xa[1] - xb[1]);
      CHECK(dist > lambda);
    }
  }
}
