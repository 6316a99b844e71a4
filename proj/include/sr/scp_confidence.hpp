#pragma once

#include <map>
#include <stdexcept>

namespace sr {

// Finite-support prior over the number of sign-change points of a criterion
// function. The lattice bound below assumes SCP locations are i.i.d. with
// equal mass per grid cell; that independence is a modelling assumption, not
// a checked property.
struct ScpPrior {
  std::map<int, double> mass;
  void validate() const;
};

// Upper bound on the probability that a k-cell sign scan misses every SCP,
// given exactly n SCPs. Odd n is always detected; n = 0 means there is
// nothing to miss.
double scp_miss_bound(int n, int k);

// Prior-weighted miss probability for a k-cell lattice.
double lattice_confidence_miss(const ScpPrior& prior, int k);

struct UnreachableConfidenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Smallest k whose lattice confidence 1 - miss reaches theta.
int choose_k(const ScpPrior& prior, double theta);

}  // namespace sr
