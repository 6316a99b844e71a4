#include "sr/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sr {

namespace {

struct InvalidTarget : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void validate_target(const ScalarTarget& target) {
  if (!target.eval) throw std::invalid_argument("target has no eval function");
  if (!(target.t0 < target.tf)) throw std::invalid_argument("target needs t0 < tf");
  if (!(target.lipschitz > 0.0) && !target.local_lipschitz) {
    throw std::invalid_argument("target needs a positive Lipschitz constant");
  }
}

double checked_eval(const ScalarTarget& target, double t, std::size_t& evaluations) {
  const double v = target.eval(t);
  ++evaluations;
  if (!std::isfinite(v)) {
    throw InvalidTarget("target evaluation is not finite at t=" + std::to_string(t));
  }
  return v;
}

double interval_constant(const ScalarTarget& target, double a, double b) {
  if (target.local_lipschitz) return target.local_lipschitz(a, b);
  return target.lipschitz;
}

void insert_sorted(std::vector<GridSample>& samples, GridSample s) {
  auto it = std::lower_bound(samples.begin(), samples.end(), s.t,
                             [](const GridSample& g, double t) { return g.t < t; });
  samples.insert(it, s);
}

}  // namespace

CertificationOutcome certify_naive(const ScalarTarget& target, std::size_t max_refinements) {
  validate_target(target);
  CertificationOutcome out;
  const double span = target.tf - target.t0;

  // Each round evaluates the whole halved grid afresh; the evaluation count
  // is cumulative across rounds.
  for (std::size_t r = 0; r <= max_refinements; ++r) {
    const std::size_t cells = std::size_t{1} << r;
    const double delta = span / static_cast<double>(cells);
    out.samples.clear();
    out.samples.reserve(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i) {
      const double t = (i == cells) ? target.tf : target.t0 + static_cast<double>(i) * delta;
      out.samples.push_back({t, checked_eval(target, t, out.evaluations)});
    }

    double min_val = std::numeric_limits<double>::infinity();
    double min_t = target.t0;
    for (const auto& s : out.samples) {
      if (s.value < min_val) {
        min_val = s.value;
        min_t = s.t;
      }
    }
    if (min_val <= 0.0) {
      out.flag = CertVerdict::kNonPositiveFound;
      out.critical_time = min_t;
      out.floor_min = min_val;
      return out;
    }

    // Values above L*delta on every cell rule out non-positive values in
    // between. With localised constants the check is per cell.
    bool all_clear = true;
    double floor_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < out.samples.size(); ++i) {
      const double len = out.samples[i + 1].t - out.samples[i].t;
      const double l = interval_constant(target, out.samples[i].t, out.samples[i + 1].t);
      const double lo = std::min(out.samples[i].value, out.samples[i + 1].value);
      floor_min = std::min(floor_min, lo - l * len);
      if (!(lo > l * len)) all_clear = false;
    }
    out.floor_min = floor_min;
    if (all_clear) {
      out.flag = CertVerdict::kAllPositive;
      return out;
    }
  }
  out.flag = CertVerdict::kInconclusive;
  return out;
}

CertificationOutcome certify_adaptive(const ScalarTarget& target, std::size_t max_evaluations,
                                      bool endpoint_shortcircuit) {
  validate_target(target);
  CertificationOutcome out;
  const double span = target.tf - target.t0;
  const double duplicate_tol = 1e-12 * span;

  for (double t : {target.t0, target.tf}) {
    if (out.evaluations >= max_evaluations) break;
    insert_sorted(out.samples, {t, checked_eval(target, t, out.evaluations)});
  }
  if (endpoint_shortcircuit) {
    for (const auto& s : out.samples) {
      if (s.value <= 0.0) {
        out.flag = CertVerdict::kNonPositiveFound;
        out.critical_time = s.t;
        out.floor_min = s.value;
        return out;
      }
    }
  }

  while (out.evaluations < max_evaluations) {
    // Locate the minimum of the lower envelope; ties go to the leftmost
    // interval so runs are reproducible.
    double best_floor = std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    for (std::size_t i = 0; i + 1 < out.samples.size(); ++i) {
      const GridSample& a = out.samples[i];
      const GridSample& b = out.samples[i + 1];
      const double l = interval_constant(target, a.t, b.t);
      const double phi = 0.5 * (a.value + b.value) - 0.5 * l * (b.t - a.t);
      if (phi < best_floor) {
        best_floor = phi;
        best_i = i;
      }
    }
    out.floor_min = best_floor;
    if (best_floor > 0.0) {
      out.flag = CertVerdict::kAllPositive;
      return out;
    }

    const GridSample& a = out.samples[best_i];
    const GridSample& b = out.samples[best_i + 1];
    const double l = interval_constant(target, a.t, b.t);
    double xi = 0.5 * (a.t + b.t) - (b.value - a.value) / (2.0 * l);
    xi = std::clamp(xi, a.t, b.t);

    // If xi collides with an existing grid point the envelope cannot be
    // tightened there; bisect the widest interval adjacent to that point.
    auto near_existing = [&](double t) {
      for (const auto& s : out.samples) {
        if (std::abs(s.t - t) <= duplicate_tol) return true;
      }
      return false;
    };
    if (near_existing(xi)) {
      double widest = -1.0;
      double mid = 0.5 * (a.t + b.t);
      for (std::size_t i = 0; i + 1 < out.samples.size(); ++i) {
        const double len = out.samples[i + 1].t - out.samples[i].t;
        if (len > widest) {
          widest = len;
          mid = 0.5 * (out.samples[i].t + out.samples[i + 1].t);
        }
      }
      xi = mid;
      if (near_existing(xi)) {
        out.flag = CertVerdict::kInconclusive;
        return out;
      }
    }

    const double v = checked_eval(target, xi, out.evaluations);
    insert_sorted(out.samples, {xi, v});
    if (v <= 0.0) {
      out.flag = CertVerdict::kNonPositiveFound;
      out.critical_time = xi;
      return out;
    }
  }
  out.flag = CertVerdict::kInconclusive;
  return out;
}

double floor_value(const ScalarTarget& target, const std::vector<GridSample>& samples, double t) {
  if (samples.empty()) throw std::invalid_argument("floor_value needs at least one sample");
  if (t <= samples.front().t) {
    return samples.front().value -
           interval_constant(target, target.t0, samples.front().t) * (samples.front().t - t);
  }
  if (t >= samples.back().t) {
    return samples.back().value -
           interval_constant(target, samples.back().t, target.tf) * (t - samples.back().t);
  }
  auto it = std::lower_bound(samples.begin(), samples.end(), t,
                             [](const GridSample& g, double x) { return g.t < x; });
  const GridSample& b = *it;
  const GridSample& a = *(it - 1);
  const double l = interval_constant(target, a.t, b.t);
  return std::max(a.value - l * (t - a.t), b.value - l * (b.t - t));
}

double critical_time_sentinel(const ScalarTarget& target, const CertificationOutcome& outcome) {
  return outcome.critical_time.value_or(target.t0 - 1.0);
}

std::string certification_trace_csv(const ScalarTarget& target, const CertificationOutcome& outcome) {
  std::ostringstream os;
  os.precision(17);
  os << "t,value,floor\n";
  for (const auto& s : outcome.samples) {
    os << s.t << ',' << s.value << ',' << floor_value(target, outcome.samples, s.t) << '\n';
  }
  return os.str();
}

}  // namespace sr
