#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace sr {

// A scalar function on a compact interval together with a Lipschitz number.
// local_lipschitz, when set, returns a constant valid on a subinterval
// [a, b] and overrides the global number there.
struct ScalarTarget {
  std::function<double(double)> eval;
  double t0 = 0.0;
  double tf = 0.0;
  double lipschitz = 0.0;
  std::function<double(double, double)> local_lipschitz;  // optional
};

enum class CertVerdict { kNonPositiveFound, kAllPositive, kInconclusive };

struct GridSample {
  double t = 0.0;
  double value = 0.0;
};

struct CertificationOutcome {
  CertVerdict flag = CertVerdict::kInconclusive;
  std::optional<double> critical_time;  // present iff kNonPositiveFound
  std::size_t evaluations = 0;
  double floor_min = 0.0;               // lower bound on the target at termination
  std::vector<GridSample> samples;      // sorted by t
};

// Grid-halving certifier: refines an equidistant grid until either a
// non-positive sample is found or every sample exceeds L*delta, which rules
// out non-positive values. Gives up (kInconclusive) after max_refinements
// rounds; callers must treat that verdict conservatively.
CertificationOutcome certify_naive(const ScalarTarget& target, std::size_t max_refinements = 24);

// Shubert-style certifier: keeps the piecewise-linear lower envelope of the
// samples, always refines at the envelope's argmin, and stops as soon as the
// envelope minimum is positive or a non-positive sample appears. With
// endpoint_shortcircuit disabled, non-positive *endpoint* values do not
// terminate the search; only interior refinements count as witnesses (used
// by the detector's leftward sweep, where the right endpoint is already
// known to be non-positive).
CertificationOutcome certify_adaptive(const ScalarTarget& target, std::size_t max_evaluations = 10000,
                                      bool endpoint_shortcircuit = true);

// Lower envelope implied by a sorted sample set and Lipschitz number(s);
// never exceeds the target anywhere on [t0, tf].
double floor_value(const ScalarTarget& target, const std::vector<GridSample>& samples, double t);

// Serialization uses the t0-1 sentinel for "no witness".
double critical_time_sentinel(const ScalarTarget& target, const CertificationOutcome& outcome);

// CSV rows "t,value,floor" for each sample of the outcome.
std::string certification_trace_csv(const ScalarTarget& target, const CertificationOutcome& outcome);

}  // namespace sr
