#pragma once

#include <span>
#include <stdexcept>
#include <vector>

namespace sr {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

// A certified Lipschitz constant together with the interval it is valid on.
struct LipschitzConstant {
  double value = 0.0;
  Interval valid_interval{};
};

enum class CombineOp {
  kSum,         // L(f+g) <= L(f)+L(g)
  kScale,       // L(r f) = |r| L(f)
  kAbs,         // L(|f|) = L(f)
  kMax,         // L(max(f,g)) = max(L(f),L(g))
  kProduct,     // L(fg) <= s(f) L(g) + s(g) L(f)
  kReciprocal,  // L(1/f) <= inf|f|^-2 L(f)
  kSqrt,        // L(sqrt) <= 1/(2 sqrt(a)) on domains with infimum a > 0
  kCompose,     // L(g o f) <= L(g) L(f)
  kPower,       // L(f^2) <= 2 s(f) L(f)
};

// Optional bounds used by the rules that need them. sup_f / sup_g are
// suprema of |f| resp. |g|; inf_f is the infimum of |f| (reciprocal) or of
// the sqrt domain (kSqrt); scale_factor is r for kScale.
struct CombineBounds {
  double sup_f = 0.0;
  double sup_g = 0.0;
  double inf_f = 0.0;
  double scale_factor = 1.0;
};

struct SingularityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Applies one Lipschitz-arithmetic rule to the given constants. Throws
// SingularityError when kReciprocal/kSqrt are invoked with a non-positive
// bound. The returned interval is the intersection of the inputs'.
LipschitzConstant lipschitz_combine(CombineOp op, std::span<const LipschitzConstant> inputs,
                                    const CombineBounds& bounds = {});

// Convenience wrappers used throughout criterion construction.
double lip_sum(double a, double b);
double lip_scale(double l, double factor);
double lip_max(double a, double b);
double lip_product(double lf, double lg, double sup_f, double sup_g);
double lip_reciprocal(double lf, double inf_abs_f);
double lip_sqrt_constant(double domain_inf);             // constant of sqrt itself
double lip_sqrt_compose(double lf, double domain_inf);   // L(sqrt o f)
double lip_square(double lf, double sup_f);

struct InsufficientBeliefError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BeliefSample {
  double value = 0.0;
  double probability = 0.0;  // cumulative
};

// Smallest tabulated value whose cumulative probability reaches `confidence`.
// Used to pick a Lipschitz number from a belief over the smallest constant.
LipschitzConstant lipschitz_from_belief(std::span<const BeliefSample> cdf_samples,
                                        double confidence);

}  // namespace sr
