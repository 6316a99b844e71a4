#include "sr/lipschitz.hpp"

#include <algorithm>
#include <cmath>

namespace sr {

namespace {

Interval intersect(std::span<const LipschitzConstant> inputs) {
  if (inputs.empty()) return {};
  Interval out = inputs[0].valid_interval;
  for (const auto& in : inputs.subspan(1)) {
    out.lo = std::max(out.lo, in.valid_interval.lo);
    out.hi = std::min(out.hi, in.valid_interval.hi);
  }
  return out;
}

void require_arity(std::span<const LipschitzConstant> inputs, std::size_t n, const char* op) {
  if (inputs.size() != n) {
    throw std::invalid_argument(std::string(op) + ": expected " + std::to_string(n) + " input constants");
  }
}

}  // namespace

double lip_sum(double a, double b) { return a + b; }
double lip_scale(double l, double factor) { return std::abs(factor) * l; }
double lip_max(double a, double b) { return std::max(a, b); }

double lip_product(double lf, double lg, double sup_f, double sup_g) {
  return sup_f * lg + sup_g * lf;
}

double lip_reciprocal(double lf, double inf_abs_f) {
  if (!(inf_abs_f > 0.0)) throw SingularityError("reciprocal rule needs inf|f| > 0");
  return lf / (inf_abs_f * inf_abs_f);
}

double lip_sqrt_constant(double domain_inf) {
  if (!(domain_inf > 0.0)) throw SingularityError("sqrt rule needs a positive domain infimum");
  return 1.0 / (2.0 * std::sqrt(domain_inf));
}

double lip_sqrt_compose(double lf, double domain_inf) {
  return lip_sqrt_constant(domain_inf) * lf;
}

double lip_square(double lf, double sup_f) { return 2.0 * sup_f * lf; }

LipschitzConstant lipschitz_combine(CombineOp op, std::span<const LipschitzConstant> inputs,
                                    const CombineBounds& bounds) {
  LipschitzConstant out;
  out.valid_interval = intersect(inputs);
  switch (op) {
    case CombineOp::kSum:
      require_arity(inputs, 2, "sum");
      out.value = lip_sum(inputs[0].value, inputs[1].value);
      break;
    case CombineOp::kScale:
      require_arity(inputs, 1, "scale");
      out.value = lip_scale(inputs[0].value, bounds.scale_factor);
      break;
    case CombineOp::kAbs:
      require_arity(inputs, 1, "abs");
      out.value = inputs[0].value;
      break;
    case CombineOp::kMax:
      require_arity(inputs, 2, "max");
      out.value = lip_max(inputs[0].value, inputs[1].value);
      break;
    case CombineOp::kProduct:
      require_arity(inputs, 2, "product");
      out.value = lip_product(inputs[0].value, inputs[1].value, bounds.sup_f, bounds.sup_g);
      break;
    case CombineOp::kReciprocal:
      require_arity(inputs, 1, "reciprocal");
      out.value = lip_reciprocal(inputs[0].value, bounds.inf_f);
      break;
    case CombineOp::kSqrt:
      // constant of the square root map itself; no function input
      out.value = lip_sqrt_constant(bounds.inf_f);
      break;
    case CombineOp::kCompose:
      require_arity(inputs, 2, "compose");
      out.value = inputs[0].value * inputs[1].value;
      break;
    case CombineOp::kPower:
      require_arity(inputs, 1, "power");
      out.value = lip_square(inputs[0].value, bounds.sup_f);
      break;
  }
  return out;
}

LipschitzConstant lipschitz_from_belief(std::span<const BeliefSample> cdf_samples,
                                        double confidence) {
  if (cdf_samples.empty()) throw InsufficientBeliefError("empty belief table");
  if (confidence < 0.0 || confidence > 1.0) {
    throw std::invalid_argument("confidence must be in [0,1]");
  }
  for (const auto& sample : cdf_samples) {
    if (sample.probability >= confidence) {
      return LipschitzConstant{sample.value, {}};
    }
  }
  throw InsufficientBeliefError("belief table does not reach requested confidence");
}

}  // namespace sr
