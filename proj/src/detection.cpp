#include "sr/detection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sr/certify.hpp"
#include "sr/log.hpp"

namespace sr {

namespace {

// Constant criteria have L = 0, which the certifiers reject; a tiny positive
// stand-in keeps their verdicts unchanged.
double certifiable_lipschitz(double l) { return std::max(l, 1e-12); }

ScalarTarget as_target(const CriterionFn& gamma, double t0, double tf) {
  ScalarTarget target;
  target.eval = gamma.eval;
  target.t0 = t0;
  target.tf = tf;
  target.lipschitz = certifiable_lipschitz(gamma.lipschitz);
  if (gamma.local_lipschitz) {
    auto local = gamma.local_lipschitz;
    target.local_lipschitz = [local](double a, double b) {
      return certifiable_lipschitz(local(a, b));
    };
  }
  return target;
}

double min_sample(const CertificationOutcome& outcome) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : outcome.samples) best = std::min(best, s.value);
  return best;
}

double argmin_sample(const CertificationOutcome& outcome, double fallback) {
  double best = std::numeric_limits<double>::infinity();
  double at = fallback;
  for (const auto& s : outcome.samples) {
    if (s.value < best) {
      best = s.value;
      at = s.t;
    }
  }
  return at;
}

}  // namespace

GridMinimum minimize_on_grid(const CriterionFn& criterion, std::size_t grid_points,
                             std::size_t refine_iters) {
  GridMinimum out;
  const double span = criterion.tf - criterion.t0;
  out.value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid_points; ++i) {
    const double t =
        criterion.t0 + span * static_cast<double>(i) / static_cast<double>(grid_points - 1);
    const double v = criterion.eval(t);
    ++out.evaluations;
    if (v < out.value) {
      out.value = v;
      out.t = t;
    }
  }
  // golden-section polish inside the best cell
  double lo = std::max(criterion.t0, out.t - span / static_cast<double>(grid_points - 1));
  double hi = std::min(criterion.tf, out.t + span / static_cast<double>(grid_points - 1));
  const double gr = 0.6180339887498949;
  double a = hi - gr * (hi - lo);
  double b = lo + gr * (hi - lo);
  double fa = criterion.eval(a);
  double fb = criterion.eval(b);
  out.evaluations += 2;
  for (std::size_t it = 0; it < refine_iters; ++it) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - gr * (hi - lo);
      fa = criterion.eval(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + gr * (hi - lo);
      fb = criterion.eval(b);
    }
    ++out.evaluations;
  }
  const double t_best = fa < fb ? a : b;
  const double v_best = std::min(fa, fb);
  if (v_best < out.value) {
    out.value = v_best;
    out.t = t_best;
  }
  return out;
}

DetectionReport detect(int agent, const std::vector<int>& others,
                       const std::map<int, CriterionFn>& pair_criteria,
                       DetectorKind detector, std::size_t budget) {
  DetectionReport report;
  report.method = detector;

  std::vector<CriterionFn> parts;
  parts.reserve(others.size());
  for (int b : others) {
    auto it = pair_criteria.find(b);
    if (it == pair_criteria.end()) {
      throw std::invalid_argument("missing pairwise criterion for opponent " + std::to_string(b));
    }
    parts.push_back(it->second);
  }
  if (parts.empty()) {
    report.collision = false;
    report.criterion_min = std::numeric_limits<double>::infinity();
    return report;
  }
  CriterionFn gamma = multi_agent_criterion(parts);
  gamma.pair.first = agent;

  auto fill_conflicts = [&](double t) {
    report.conflict_set.clear();
    for (int b : others) {
      if (pair_criteria.at(b).eval(t) <= 0.0) report.conflict_set.push_back(b);
    }
    std::sort(report.conflict_set.begin(), report.conflict_set.end());
  };

  if (detector == DetectorKind::kGridFallback) {
    const GridMinimum gm = minimize_on_grid(gamma);
    report.evaluations = gm.evaluations;
    report.criterion_min = gm.value;
    report.certified = false;  // a grid scan is not a certificate
    report.collision = gm.value <= 0.0;
    if (report.collision) {
      report.t_coll = gm.t;
      fill_conflicts(gm.t);
    }
    return report;
  }

  auto run = [&](double t0, double tf, std::size_t evals, bool endpoint_shortcircuit) {
    const ScalarTarget target = as_target(gamma, t0, tf);
    if (detector == DetectorKind::kNaive) {
      // round r re-evaluates 2^r + 1 samples, so the cumulative cost of
      // r_max rounds is about 2^(r_max + 1); stay within the budget
      const auto refinements = static_cast<std::size_t>(
          std::max(2.0, std::log2(static_cast<double>(std::max<std::size_t>(evals, 8))) - 1.0));
      return certify_naive(target, refinements);
    }
    return certify_adaptive(target, evals, endpoint_shortcircuit);
  };

  CertificationOutcome outcome = run(gamma.t0, gamma.tf, budget, true);
  report.evaluations = outcome.evaluations;
  report.criterion_min = min_sample(outcome);

  if (outcome.flag == CertVerdict::kAllPositive) {
    report.collision = false;
    report.certified = true;
    return report;
  }

  if (outcome.flag == CertVerdict::kNonPositiveFound) {
    double witness = *outcome.critical_time;
    // Bounded leftward sweep: re-certify on the prefix to approximate the
    // earliest conflict time without a full scan. The prefix's right endpoint
    // is non-positive by construction, so endpoint short-circuiting is
    // disabled and only interior witnesses advance the sweep.
    const double span = gamma.tf - gamma.t0;
    for (int level = 0; level < 3; ++level) {
      const double upper = witness - 1e-3 * span;
      if (upper <= gamma.t0) break;
      CertificationOutcome sub =
          run(gamma.t0, upper, std::max<std::size_t>(64, budget / 8), false);
      report.evaluations += sub.evaluations;
      report.criterion_min = std::min(report.criterion_min, min_sample(sub));
      if (sub.flag != CertVerdict::kNonPositiveFound) break;
      witness = std::min(witness, *sub.critical_time);
    }
    report.collision = true;
    report.certified = true;
    report.t_coll = witness;
    fill_conflicts(witness);
    return report;
  }

  // Budget exhausted: treat as a collision, report the best-known minimizer.
  log_info("detector budget exhausted; treating outcome as a collision");
  report.collision = true;
  report.certified = false;
  const double t_min = argmin_sample(outcome, gamma.t0);
  report.t_coll = t_min;
  fill_conflicts(t_min);
  if (report.conflict_set.empty()) {
    // nothing non-positive at the minimizer; blame the pointwise-smallest pair
    double best = std::numeric_limits<double>::infinity();
    int blame = others.front();
    for (int b : others) {
      const double v = pair_criteria.at(b).eval(t_min);
      if (v < best) {
        best = v;
        blame = b;
      }
    }
    report.conflict_set.push_back(blame);
  }
  return report;
}

}  // namespace sr
