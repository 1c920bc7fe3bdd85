#include "vprec/extprec.hpp"

#include <quadmath.h>

#include <cmath>
#include <stdexcept>
#include <string>

#include "vprec/detail/float_bits.hpp"

namespace vprec {

namespace {

using quad = __float128;

// Both conversions round to nearest, so |lo| <= ulp(hi)/2 holds by construction.
ExtendedValue split(quad q) noexcept {
  const auto hi = static_cast<double>(q);
  if (!std::isfinite(hi) || hi == 0.0) return ExtendedValue{hi};
  return {hi, static_cast<double>(q - static_cast<quad>(hi))};
}

quad eval_unary(MathFunction f, quad x) noexcept {
  switch (f) {
    case MathFunction::sin: return sinq(x);
    case MathFunction::cos: return cosq(x);
    case MathFunction::tan: return tanq(x);
    case MathFunction::asin: return asinq(x);
    case MathFunction::acos: return acosq(x);
    case MathFunction::atan: return atanq(x);
    case MathFunction::exp: return expq(x);
    case MathFunction::log: return logq(x);
    case MathFunction::log2: return log2q(x);
    case MathFunction::log10: return log10q(x);
    case MathFunction::sqrt: return sqrtq(x);
    case MathFunction::cbrt: return cbrtq(x);
    case MathFunction::floor: return floorq(x);
    case MathFunction::ceil: return ceilq(x);
    case MathFunction::fabs: return fabsq(x);
    default: return nanq("");
  }
}

quad eval_binary(MathFunction f, quad x, quad y) noexcept {
  switch (f) {
    case MathFunction::atan2: return atan2q(x, y);
    case MathFunction::pow: return powq(x, y);
    case MathFunction::hypot: return hypotq(x, y);
    case MathFunction::fmod: return fmodq(x, y);
    default: return nanq("");
  }
}

}  // namespace

ExtendedValue eval_extended(MathFunction f, double x, std::optional<double> y) {
  if (f == MathFunction::sincos) {
    throw std::invalid_argument("sincos has two outputs; use eval_sincos");
  }
  if ((arity(f) == 2) != y.has_value()) {
    throw std::invalid_argument(std::string(name(f)) + " expects " +
                                std::to_string(arity(f)) + " operand(s)");
  }
  if (f == MathFunction::fabs) return ExtendedValue{detail::abs_bits(x)};
  if (y) return split(eval_binary(f, x, *y));
  return split(eval_unary(f, x));
}

SinCosValue eval_sincos(double x) noexcept {
  // Separate evaluations keep both halves identical to the sin/cos entry points.
  return {split(sinq(x)), split(cosq(x))};
}

}  // namespace vprec
