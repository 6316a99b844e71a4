#pragma once

#include <array>
#include <functional>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sr/sde_model.hpp"

namespace sr {

// Per-pair collision parameters: probability threshold and the summed
// half-diameters of the two plants.
struct PairParams {
  double delta = 0.05;
  double lambda_pair = 1.0;
  void validate() const {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must be in (0,1)");
    if (!(lambda_pair > 0.0)) throw std::invalid_argument("lambda_pair must be positive");
  }
};

enum class CriterionKind { kChebyshev1D, kWhittle2D };

struct SingularCovarianceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidCovarianceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Raised when no finite Lipschitz constant exists (vanishing variance);
// callers should fall back to the global-minimizer detector.
struct VanishingVarianceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Chebyshev confinement radius: a box of half-width sqrt(2 C_ii / delta)
// holds at least 1 - delta/2 of the mass in dimension i regardless of the
// distribution.
double chebyshev_radius(double cov_ii, double delta);

// Two-dimensional Chebyshev-type radius (tighter for D=2). cov is the 2x2
// covariance in row-major order; i selects the constrained dimension.
double whittle_radius(const std::array<double, 4>& cov, std::size_t i, double delta);

// A conservative criterion function: eval(t) > 0 certifies that the
// instantaneous collision probability of the pair is below delta.
// local_lipschitz, when attached, returns a constant valid on a subinterval
// [a, b]; the global constant can be very loose near the horizon start where
// the confinement radii take off from a small initial variance.
struct CriterionFn {
  std::function<double(double)> eval;
  double lipschitz = 0.0;
  std::function<double(double, double)> local_lipschitz;
  CriterionKind kind = CriterionKind::kChebyshev1D;
  std::pair<int, int> pair{-1, -1};
  double t0 = 0.0;
  double tf = 0.0;
};

CriterionFn make_pair_criterion(std::shared_ptr<const MomentFunctions> moments_a,
                                std::shared_ptr<const MomentFunctions> moments_b,
                                const PairParams& params, CriterionKind kind);

// Computes and stores a certified Lipschitz constant for criterion.eval,
// combining the moment constants with the max/sum/sqrt rules, and attaches
// the matching per-interval constant function. Throws
// VanishingVarianceError when the variance vanishes at the horizon start
// while its Lipschitz constant is not zero.
double attach_lipschitz(CriterionFn& criterion, std::shared_ptr<const MomentFunctions> moments_a,
                        std::shared_ptr<const MomentFunctions> moments_b, const PairParams& params);

// Pointwise minimum over the pairwise criteria; positivity bounds the
// union probability by delta * |constituents|.
CriterionFn multi_agent_criterion(const std::vector<CriterionFn>& criteria);

}  // namespace sr
