#include "sr/criterion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sr/lipschitz.hpp"

namespace sr {

namespace {

constexpr double kDetTolerance = 1e-12;

double pair_radius(const MomentFunctions& m, std::size_t i, double t, double delta,
                   CriterionKind kind) {
  const Vec c = m.cov_diag(t);
  if (kind == CriterionKind::kChebyshev1D) return chebyshev_radius(c[i], delta);
  // cross-covariances of the diagonal plant are identically zero
  return whittle_radius({c[0], 0.0, 0.0, c[1]}, i, delta);
}

}  // namespace

double chebyshev_radius(double cov_ii, double delta) {
  if (cov_ii < 0.0) throw InvalidCovarianceError("negative variance");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must be in (0,1)");
  return std::sqrt(2.0 * cov_ii / delta);
}

double whittle_radius(const std::array<double, 4>& cov, std::size_t i, double delta) {
  if (i > 1) throw std::invalid_argument("dimension index must be 0 or 1");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must be in (0,1)");
  const std::size_t j = 1 - i;
  const double c_ii = cov[i * 2 + i];
  const double c_jj = cov[j * 2 + j];
  const double c_ij = cov[1];
  if (!(c_jj > 0.0)) throw SingularCovarianceError("C_jj must be positive");
  if (c_ii < 0.0) throw InvalidCovarianceError("negative variance");
  double det = c_ii * c_jj - c_ij * c_ij;
  if (det < -kDetTolerance) throw InvalidCovarianceError("covariance is not PSD");
  det = std::max(det, 0.0);
  const double inner = c_ii + std::sqrt(c_ii * c_jj * det) / c_jj;
  return std::sqrt(0.5 / delta) * std::sqrt(inner);
}

CriterionFn make_pair_criterion(std::shared_ptr<const MomentFunctions> moments_a,
                                std::shared_ptr<const MomentFunctions> moments_b,
                                const PairParams& params, CriterionKind kind) {
  params.validate();
  if (moments_a->dim() != moments_b->dim()) throw std::invalid_argument("dimension mismatch");
  if (moments_a->t0() != moments_b->t0() || moments_a->tf() != moments_b->tf()) {
    throw std::invalid_argument("criterion needs a shared horizon");
  }
  if (kind == CriterionKind::kWhittle2D && moments_a->dim() != 2) {
    throw std::invalid_argument("the two-dimensional criterion requires D=2");
  }

  CriterionFn out;
  out.kind = kind;
  out.t0 = moments_a->t0();
  out.tf = moments_a->tf();
  const double delta = params.delta;
  const double lambda = params.lambda_pair;
  out.eval = [moments_a, moments_b, delta, lambda, kind](double t) {
    const Vec mu_a = moments_a->mean(t);
    const Vec mu_b = moments_b->mean(t);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < mu_a.size(); ++i) {
      const double gap = std::abs(mu_a[i] - mu_b[i]) - lambda -
                         pair_radius(*moments_a, i, t, delta, kind) -
                         pair_radius(*moments_b, i, t, delta, kind);
      best = std::max(best, gap);
    }
    return best;
  };
  return out;
}

namespace {

// Lipschitz constant of t -> radius_i(t) for one agent on [a, b]. Both
// radius kinds reduce to sqrt(scale * C_ii(t)) for the diagonal plant.
// |d sqrt(C)/dt| = |dC/dt| / (2 sqrt(C)) is maximal at the interval start
// for the exponential variance profile (the numerator decays faster than
// the root grows), so the exact derivative supremum is available in closed
// form; it is never looser than the sqrt-composition rule with the global
// variance infimum.
double radius_lipschitz(const MomentFunctions& m, std::size_t i, double delta,
                        CriterionKind kind, double a) {
  const double l_cov = m.cov_lipschitz_local(i, a);
  if (l_cov == 0.0) return 0.0;  // constant variance, constant radius
  const double cov_a = m.cov_diag(a)[i];
  if (!(cov_a > 0.0)) {
    throw VanishingVarianceError(
        "variance vanishes at the horizon start; no finite Lipschitz constant exists. "
        "Use the global-minimizer detector instead.");
  }
  const double scale = (kind == CriterionKind::kChebyshev1D) ? 2.0 / delta : 1.0 / delta;
  return std::sqrt(scale) * l_cov / (2.0 * std::sqrt(cov_a));
}

double criterion_lipschitz_on(const MomentFunctions& ma, const MomentFunctions& mb,
                              const PairParams& params, CriterionKind kind, double a, double b) {
  double best = 0.0;
  for (std::size_t i = 0; i < ma.dim(); ++i) {
    double l = lip_sum(ma.mean_lipschitz_local(i, a, b), mb.mean_lipschitz_local(i, a, b));
    l = lip_sum(l, radius_lipschitz(ma, i, params.delta, kind, a));
    l = lip_sum(l, radius_lipschitz(mb, i, params.delta, kind, a));
    best = lip_max(best, l);
  }
  return best;
}

}  // namespace

double attach_lipschitz(CriterionFn& criterion, std::shared_ptr<const MomentFunctions> moments_a,
                        std::shared_ptr<const MomentFunctions> moments_b, const PairParams& params) {
  params.validate();
  const CriterionKind kind = criterion.kind;
  criterion.lipschitz = criterion_lipschitz_on(*moments_a, *moments_b, params, kind,
                                               moments_a->t0(), moments_a->tf());
  criterion.local_lipschitz = [moments_a, moments_b, params, kind](double a, double b) {
    return criterion_lipschitz_on(*moments_a, *moments_b, params, kind, a, b);
  };
  return criterion.lipschitz;
}

CriterionFn multi_agent_criterion(const std::vector<CriterionFn>& criteria) {
  if (criteria.empty()) throw std::invalid_argument("empty criterion list");
  CriterionFn out;
  out.kind = criteria.front().kind;
  out.t0 = criteria.front().t0;
  out.tf = criteria.front().tf;
  out.pair = {criteria.front().pair.first, -1};
  double l = 0.0;
  for (const auto& c : criteria) {
    if (c.t0 != out.t0 || c.tf != out.tf) throw std::invalid_argument("criteria horizons disagree");
    l = lip_max(l, c.lipschitz);
  }
  out.lipschitz = l;
  auto list = std::make_shared<std::vector<CriterionFn>>(criteria);
  out.eval = [list](double t) {
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& c : *list) worst = std::min(worst, c.eval(t));
    return worst;
  };
  bool all_local = true;
  for (const auto& c : *list) all_local = all_local && static_cast<bool>(c.local_lipschitz);
  if (all_local) {
    out.local_lipschitz = [list](double a, double b) {
      double worst = 0.0;
      for (const auto& c : *list) worst = std::max(worst, c.local_lipschitz(a, b));
      return worst;
    };
  }
  return out;
}

}  // namespace sr
