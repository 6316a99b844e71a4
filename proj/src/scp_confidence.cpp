#include "sr/scp_confidence.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sr {

namespace {

// log binomial(n, k) via lgamma; safe for the large pairing counts
double log_choose(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

void ScpPrior::validate() const {
  double total = 0.0;
  for (const auto& [n, p] : mass) {
    if (n < 0) throw std::invalid_argument("SCP counts must be non-negative");
    if (p < 0.0) throw std::invalid_argument("probabilities must be non-negative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("prior probabilities must sum to one");
  }
}

double scp_miss_bound(int n, int k) {
  if (k < 1) throw std::invalid_argument("need at least one lattice cell");
  if (n < 0) throw std::invalid_argument("SCP count must be non-negative");
  if (n == 0) return 0.0;       // no sign changes to miss
  if (n % 2 == 1) return 0.0;   // an odd count flips the endpoint sign
  const double pairs = static_cast<double>(n) * (n - 1) / 2.0;
  const double log_p = log_choose(pairs, n / 2.0) - (n / 2.0) * std::log(static_cast<double>(k));
  return std::min(1.0, std::exp(log_p));
}

double lattice_confidence_miss(const ScpPrior& prior, int k) {
  prior.validate();
  double miss = 0.0;
  for (const auto& [n, p] : prior.mass) {
    if (n % 2 == 0 && n > 0) miss += p * scp_miss_bound(n, k);
  }
  return miss;
}

int choose_k(const ScpPrior& prior, double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("theta must be in (0,1)");
  prior.validate();
  const auto confident = [&](long long k) {
    return 1.0 - lattice_confidence_miss(prior, static_cast<int>(k)) >= theta;
  };
  if (confident(1)) return 1;

  long long hi = 2;
  const long long cap = 2000000000LL;
  while (!confident(hi)) {
    if (hi >= cap) {
      throw UnreachableConfidenceError(
          "confidence " + std::to_string(theta) + " unreachable; best achieved " +
          std::to_string(1.0 - lattice_confidence_miss(prior, static_cast<int>(cap))));
    }
    hi = std::min(cap, hi * 2);
  }
  long long lo = hi / 2;  // lo is known non-confident (or 1, handled above)
  while (lo + 1 < hi) {
    const long long mid = lo + (hi - lo) / 2;
    if (confident(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return static_cast<int>(hi);
}

}  // namespace sr
