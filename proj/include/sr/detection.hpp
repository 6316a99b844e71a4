#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "sr/criterion.hpp"

namespace sr {

enum class DetectorKind { kNaive, kAdaptive, kGridFallback };

struct DetectionReport {
  bool collision = false;
  std::optional<double> t_coll;     // earliest non-positive time found
  std::vector<int> conflict_set;    // ids b with gamma^{a,b}(t_coll) <= 0
  std::size_t evaluations = 0;
  DetectorKind method = DetectorKind::kAdaptive;
  bool certified = true;            // false for grid fallback / budget exhaustion
  double criterion_min = 0.0;       // best known min of the joint criterion
};

// Decides collision-freeness of `agent` against `others` over the shared
// horizon by certifying positivity of the pointwise-minimum criterion.
// pair_criteria maps opponent id -> criterion (Lipschitz constants attached
// unless the grid fallback is selected). A kNonPositiveFound witness is
// pushed left by re-certifying on the prefix up to three times so the
// reported time approximates the earliest conflict.
DetectionReport detect(int agent, const std::vector<int>& others,
                       const std::map<int, CriterionFn>& pair_criteria,
                       DetectorKind detector = DetectorKind::kAdaptive,
                       std::size_t budget = 10000);

// Coarse minimum of a criterion on a uniform grid with parabolic
// refinement around the best cell. Not a certificate; used for the
// grid fallback and for hinge-loss cost evaluation.
struct GridMinimum {
  double t = 0.0;
  double value = 0.0;
  std::size_t evaluations = 0;
};
GridMinimum minimize_on_grid(const CriterionFn& criterion, std::size_t grid_points = 2048,
                             std::size_t refine_iters = 32);

}  // namespace sr
