#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace sr {

using Vec = std::vector<double>;

// Diagonal feedback-controlled linear SDE plant
//   dx_j = (a_j x_j + k_j (xi_j(t) - x_j)) dt + sqrt(nu_j) dW_j
// with Gaussian initial state N(initial_mean, diag(initial_cov)).
// Stability requires q_j = k_j - a_j > 0 in every dimension.
struct AgentDynamics {
  Vec gain;          // k_j (1/s), positive
  Vec drift;         // a_j (1/s)
  Vec noise;         // nu_j (units^2/s), non-negative
  Vec initial_mean;  // mu0
  Vec initial_cov;   // C0_jj, non-negative
  double diameter = 1.0;

  std::size_t dim() const { return gain.size(); }
  double q(std::size_t j) const { return gain[j] - drift[j]; }
  void validate() const;
};

// Piecewise-constant reference signal: setpoint i steers the plant on the
// half-open interval (times[i-1], times[i]]; the last setpoint extends to
// the horizon end. times are strictly increasing, times.front() is the
// horizon start.
struct Plan {
  std::vector<double> times;
  std::vector<Vec> setpoints;
  double horizon_end = 0.0;

  double t0() const { return times.front(); }
  double tf() const { return horizon_end; }
  std::size_t size() const { return times.size(); }
  void validate(std::size_t dim) const;

  // Reference value at time t (right-continuous from the left as above).
  Vec reference(double t) const;
};

// Inserts (t, s) keeping times sorted; the original plan is left untouched.
// A time collision with an existing setpoint throws unless replace is set.
Plan plan_insert(const Plan& plan, double t, const Vec& setpoint, bool replace = false);

Vec mean_at(const AgentDynamics& dyn, const Plan& plan, double t);
Vec cov_at(const AgentDynamics& dyn, const Plan& plan, double t);
Vec cross_cov_at(const AgentDynamics& dyn, const Plan& plan, double s, double t);

struct MomentLipschitz {
  Vec mean;  // per dimension
  Vec cov;
};

// Certified Lipschitz constants for t -> mean(t) and t -> cov_diag(t).
// The covariance constant is the closed derivative bound; the mean constant
// is the segment-wise supremum of |dmu/dt|, which never exceeds the cruder
// exponential-envelope bound.
MomentLipschitz moment_lipschitz(const AgentDynamics& dyn, const Plan& plan);

// Evaluable moment functions with their Lipschitz constants attached.
class MomentFunctions {
 public:
  MomentFunctions(AgentDynamics dyn, Plan plan);

  Vec mean(double t) const { return mean_at(dyn_, plan_, t); }
  Vec cov_diag(double t) const { return cov_at(dyn_, plan_, t); }
  Vec cross_cov(double s, double t) const { return cross_cov_at(dyn_, plan_, s, t); }

  const Vec& mean_lipschitz() const { return lipschitz_.mean; }
  const Vec& cov_lipschitz() const { return lipschitz_.cov; }

  // Localised constants: |dmu_j/dt| decays within each constant-reference
  // segment and |dC_jj/dt| decays over the whole horizon, so suprema over a
  // subinterval are available in closed form. Valid Lipschitz constants on
  // [a, b]; the horizon-wide calls reduce to the global constants.
  double mean_lipschitz_local(std::size_t j, double a, double b) const;
  double cov_lipschitz_local(std::size_t j, double a) const;

  // Range of C_jj over the horizon (closed form; C_jj is monotone).
  double cov_inf(std::size_t j) const;
  double cov_sup(std::size_t j) const;

  double t0() const { return plan_.t0(); }
  double tf() const { return plan_.tf(); }
  std::size_t dim() const { return dyn_.dim(); }
  const AgentDynamics& dynamics() const { return dyn_; }
  const Plan& plan() const { return plan_; }

 private:
  AgentDynamics dyn_;
  Plan plan_;
  MomentLipschitz lipschitz_;
  std::vector<double> segment_starts_;
  std::vector<Vec> segment_rates_;  // |dmu_j/dt| at each segment start
};

}  // namespace sr
