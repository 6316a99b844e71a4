#include "sr/sde_model.hpp"

#include <algorithm>
#include <cmath>

namespace sr {

namespace {

constexpr double kDomainSlack = 1e-9;

void check_horizon(const Plan& plan, double t) {
  const double slack = kDomainSlack * std::max(1.0, plan.tf() - plan.t0());
  if (t < plan.t0() - slack || t > plan.tf() + slack) {
    throw std::domain_error("time outside plan horizon");
  }
}

// Breakpoints of the reference signal restricted to (t0, t]: consecutive
// pairs (lo, hi] with the setpoint active there. The last setpoint holds
// beyond its own time.
struct Segment {
  double lo;
  double hi;
  std::size_t setpoint;
};

std::vector<Segment> segments_until(const Plan& plan, double t) {
  std::vector<Segment> segs;
  const double t0 = plan.t0();
  for (std::size_t i = 1; i < plan.size(); ++i) {
    const double lo = std::max(plan.times[i - 1], t0);
    const double hi = std::min(plan.times[i], t);
    if (hi > lo) segs.push_back({lo, hi, i});
    if (plan.times[i] >= t) return segs;
  }
  const double lo = std::max(plan.times.back(), t0);
  if (t > lo) segs.push_back({lo, t, plan.size() - 1});
  return segs;
}

}  // namespace

void AgentDynamics::validate() const {
  const std::size_t d = gain.size();
  if (d == 0) throw std::invalid_argument("dynamics need at least one dimension");
  if (drift.size() != d || noise.size() != d || initial_mean.size() != d || initial_cov.size() != d) {
    throw std::invalid_argument("dynamics field sizes disagree");
  }
  for (std::size_t j = 0; j < d; ++j) {
    if (!(gain[j] > 0.0)) throw std::invalid_argument("gain must be positive");
    if (!(gain[j] - drift[j] > 0.0)) throw std::invalid_argument("stability needs k - a > 0");
    if (noise[j] < 0.0) throw std::invalid_argument("noise must be non-negative");
    if (initial_cov[j] < 0.0) throw std::invalid_argument("initial covariance must be non-negative");
  }
  if (!(diameter > 0.0)) throw std::invalid_argument("diameter must be positive");
}

void Plan::validate(std::size_t dim) const {
  if (times.empty()) throw std::invalid_argument("plan needs at least one setpoint");
  if (times.size() != setpoints.size()) throw std::invalid_argument("plan times/setpoints disagree");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw std::invalid_argument("plan times must be strictly increasing");
  }
  if (times.back() > horizon_end) throw std::invalid_argument("plan extends past horizon");
  for (const auto& s : setpoints) {
    if (s.size() != dim) throw std::invalid_argument("setpoint dimension mismatch");
  }
}

Vec Plan::reference(double t) const {
  std::size_t idx = 0;
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (t > times[i - 1]) idx = i;
  }
  if (t > times.back()) idx = times.size() - 1;
  return setpoints[idx];
}

Plan plan_insert(const Plan& plan, double t, const Vec& setpoint, bool replace) {
  if (!(t > plan.t0()) || !(t <= plan.tf())) {
    throw std::invalid_argument("insertion time must lie after the horizon start");
  }
  Plan out = plan;
  auto it = std::lower_bound(out.times.begin(), out.times.end(), t);
  if (it != out.times.end() && *it == t) {
    if (!replace) throw std::invalid_argument("setpoint time already present in plan");
    out.setpoints[static_cast<std::size_t>(it - out.times.begin())] = setpoint;
    return out;
  }
  const std::size_t pos = static_cast<std::size_t>(it - out.times.begin());
  out.times.insert(it, t);
  out.setpoints.insert(out.setpoints.begin() + static_cast<std::ptrdiff_t>(pos), setpoint);
  return out;
}

Vec mean_at(const AgentDynamics& dyn, const Plan& plan, double t) {
  check_horizon(plan, t);
  const double t0 = plan.t0();
  const auto segs = segments_until(plan, t);
  Vec mu(dyn.dim());
  for (std::size_t j = 0; j < dyn.dim(); ++j) {
    const double q = dyn.q(j);
    const double k = dyn.gain[j];
    double m = std::exp(q * (t0 - t)) * dyn.initial_mean[j];
    for (const auto& seg : segs) {
      m += (k / q) * plan.setpoints[seg.setpoint][j] *
           (std::exp(q * (seg.hi - t)) - std::exp(q * (seg.lo - t)));
    }
    mu[j] = m;
  }
  return mu;
}

Vec cov_at(const AgentDynamics& dyn, const Plan& plan, double t) {
  check_horizon(plan, t);
  const double t0 = plan.t0();
  Vec c(dyn.dim());
  for (std::size_t j = 0; j < dyn.dim(); ++j) {
    const double q = dyn.q(j);
    const double stat = dyn.noise[j] / (2.0 * q);
    c[j] = std::max(0.0, std::exp(-2.0 * q * (t - t0)) * (dyn.initial_cov[j] - stat) + stat);
  }
  return c;
}

Vec cross_cov_at(const AgentDynamics& dyn, const Plan& plan, double s, double t) {
  check_horizon(plan, s);
  check_horizon(plan, t);
  const double t0 = plan.t0();
  Vec c(dyn.dim());
  for (std::size_t j = 0; j < dyn.dim(); ++j) {
    const double q = dyn.q(j);
    const double stat = dyn.noise[j] / (2.0 * q);
    c[j] = std::exp(-q * (t + s - 2.0 * t0)) * dyn.initial_cov[j] +
           stat * (std::exp(-q * std::abs(t - s)) - std::exp(q * (2.0 * t0 - (s + t))));
  }
  return c;
}

MomentLipschitz moment_lipschitz(const AgentDynamics& dyn, const Plan& plan) {
  dyn.validate();
  plan.validate(dyn.dim());
  MomentLipschitz out;
  out.mean.assign(dyn.dim(), 0.0);
  out.cov.assign(dyn.dim(), 0.0);

  for (std::size_t j = 0; j < dyn.dim(); ++j) {
    const double q = dyn.q(j);
    out.cov[j] = std::abs(2.0 * q * (dyn.initial_cov[j] - dyn.noise[j] / (2.0 * q)));
  }

  // |dmu_j/dt| = |k_j xi_j(t) - q_j mu_j(t)| decays within each constant
  // segment, so the supremum over the horizon is attained at segment starts.
  std::vector<double> starts;
  starts.push_back(plan.t0());
  for (std::size_t i = 1; i < plan.size(); ++i) starts.push_back(plan.times[i]);
  for (double start : starts) {
    const Vec mu = mean_at(dyn, plan, start);
    // reference on the segment beginning at `start` (just after it)
    const double probe = std::min(plan.tf(), start + 1e-12 * std::max(1.0, plan.tf() - plan.t0()));
    const Vec xi = plan.reference(probe > start ? probe : start);
    for (std::size_t j = 0; j < dyn.dim(); ++j) {
      const double rate = std::abs(dyn.gain[j] * xi[j] - dyn.q(j) * mu[j]);
      out.mean[j] = std::max(out.mean[j], rate);
    }
  }
  return out;
}

MomentFunctions::MomentFunctions(AgentDynamics dyn, Plan plan)
    : dyn_(std::move(dyn)), plan_(std::move(plan)) {
  dyn_.validate();
  plan_.validate(dyn_.dim());
  lipschitz_ = moment_lipschitz(dyn_, plan_);

  segment_starts_.push_back(plan_.t0());
  for (std::size_t i = 1; i < plan_.size(); ++i) segment_starts_.push_back(plan_.times[i]);
  const double probe_eps = 1e-12 * std::max(1.0, plan_.tf() - plan_.t0());
  for (double start : segment_starts_) {
    const Vec mu = mean_at(dyn_, plan_, start);
    const double probe = std::min(plan_.tf(), start + probe_eps);
    const Vec xi = plan_.reference(probe > start ? probe : start);
    Vec rates(dyn_.dim());
    for (std::size_t j = 0; j < dyn_.dim(); ++j) {
      rates[j] = std::abs(dyn_.gain[j] * xi[j] - dyn_.q(j) * mu[j]);
    }
    segment_rates_.push_back(std::move(rates));
  }
}

double MomentFunctions::mean_lipschitz_local(std::size_t j, double a, double b) const {
  // within a segment the rate decays as e^{-q (t - start)}
  double sup = 0.0;
  for (std::size_t s = 0; s < segment_starts_.size(); ++s) {
    const double start = segment_starts_[s];
    const double end = (s + 1 < segment_starts_.size()) ? segment_starts_[s + 1] : plan_.tf();
    if (end <= a || start >= b) continue;
    const double entry = std::max(start, a);
    sup = std::max(sup, segment_rates_[s][j] * std::exp(-dyn_.q(j) * (entry - start)));
  }
  return sup;
}

double MomentFunctions::cov_lipschitz_local(std::size_t j, double a) const {
  // |dC/dt| = |2q (C0 - nu/2q)| e^{-2q(a - t0)} decays from the horizon start
  return lipschitz_.cov[j] * std::exp(-2.0 * dyn_.q(j) * (a - plan_.t0()));
}

double MomentFunctions::cov_inf(std::size_t j) const {
  // C_jj is monotone: increasing iff C0 < nu/(2q), so the extrema sit at
  // the horizon ends.
  const double at0 = cov_at(dyn_, plan_, t0())[j];
  const double attf = cov_at(dyn_, plan_, tf())[j];
  return std::min(at0, attf);
}

double MomentFunctions::cov_sup(std::size_t j) const {
  const double at0 = cov_at(dyn_, plan_, t0())[j];
  const double attf = cov_at(dyn_, plan_, tf())[j];
  return std::max(at0, attf);
}

}  // namespace sr
