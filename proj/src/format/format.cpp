#include "vprec/format.hpp"

#include <cfloat>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "vprec/detail/float_bits.hpp"

namespace vprec {

FloatFormat::FloatFormat(int exponent_bits, int precision_bits)
    : exponent_bits_(exponent_bits), precision_bits_(precision_bits) {
  if (exponent_bits < kMinExponentBits || exponent_bits > kMaxExponentBits) {
    throw std::invalid_argument("exponent bits r=" + std::to_string(exponent_bits) +
                                " outside [1,11]");
  }
  if (precision_bits < kMinPrecisionBits || precision_bits > kMaxPrecisionBits) {
    throw std::invalid_argument("precision bits p=" + std::to_string(precision_bits) +
                                " outside [0,52]");
  }
}

bool FloatFormat::valid(int exponent_bits, int precision_bits) noexcept {
  return exponent_bits >= kMinExponentBits && exponent_bits <= kMaxExponentBits &&
         precision_bits >= kMinPrecisionBits && precision_bits <= kMaxPrecisionBits;
}

int FloatFormat::bias() const noexcept { return (1 << (exponent_bits_ - 1)) - 1; }

int FloatFormat::emax() const noexcept { return bias(); }

int FloatFormat::emin() const noexcept {
  // The bias formula gives emin > emax for r = 1; pin the single exponent 0.
  return exponent_bits_ == 1 ? 0 : 1 - bias();
}

double FloatFormat::max_finite() const noexcept {
  return std::ldexp(2.0 - std::ldexp(1.0, -precision_bits_), emax());
}

double FloatFormat::min_normal() const noexcept { return std::ldexp(1.0, emin()); }

std::string_view to_string(RoundingFlag flag) noexcept {
  switch (flag) {
    case RoundingFlag::exact: return "exact";
    case RoundingFlag::inexact: return "inexact";
    case RoundingFlag::overflow: return "overflow";
    case RoundingFlag::underflow: return "underflow";
    case RoundingFlag::special: return "special";
  }
  return "?";
}

RoundedResult round_to_format(const ExtendedValue& z, const FloatFormat& fmt) noexcept {
  if (!std::isfinite(z.hi)) return {z.hi, RoundingFlag::special};
  if (z.hi == 0.0) return {z.hi, RoundingFlag::exact};

  const bool negative = std::signbit(z.hi);
  const double hi = negative ? -z.hi : z.hi;
  const double lo = negative ? -z.lo : z.lo;

  // e_z = floor(log2(hi + lo)); lo < 0 drops a power of two into the binade below.
  int ez = std::ilogb(hi);
  if (lo < 0.0 && detail::is_power_of_two(hi)) --ez;

  // Grid u = 2^k at precision p. Work on 2*m/u so that the half-ulp offset
  // becomes +1 and the result is floor((floor(2m/u) + 1) / 2).
  const int k = ez - fmt.precision_bits();
  const double a = std::ldexp(hi, 1 - k);  // exact, in [2^(p+1), 2^(p+2)]
  double b = std::ldexp(lo, 1 - k);
  if (lo != 0.0 && std::ldexp(b, k - 1) != lo) {
    // Scaled tail underflowed; only its sign can still move the floor.
    b = std::copysign(std::numeric_limits<double>::denorm_min(), lo);
  }
  const double a_int = detail::floor_small(a);
  double sum = 0.0;
  double err = 0.0;
  two_sum(a - a_int, b, sum, err);
  double sum_floor = detail::floor_small(sum);
  if (sum_floor == sum && err < 0.0) sum_floor -= 1.0;

  const auto twice = static_cast<std::int64_t>(a_int) + static_cast<std::int64_t>(sum_floor);
  const std::int64_t units = (twice + 1) >> 1;
  const double magnitude = std::ldexp(static_cast<double>(units), k);

  if (magnitude > fmt.max_finite()) {
    return {negative ? -std::numeric_limits<double>::infinity()
                     : std::numeric_limits<double>::infinity(),
            RoundingFlag::overflow};
  }
  if (magnitude < fmt.min_normal()) return {negative ? -0.0 : 0.0, RoundingFlag::underflow};

  // magnitude and hi lie within a factor of two, so the difference is exact.
  const bool exact = (magnitude - hi) == lo;
  return {negative ? -magnitude : magnitude, exact ? RoundingFlag::exact : RoundingFlag::inexact};
}

bool is_representable(double x, const FloatFormat& fmt) noexcept {
  if (x == 0.0) return true;
  if (!std::isfinite(x)) return false;
  const int e = std::ilogb(x);
  if (e < fmt.emin() || e > fmt.emax()) return false;
  const double scaled = std::ldexp(x < 0.0 ? -x : x, fmt.precision_bits() - e);
  return detail::floor_small(scaled) == scaled;
}

}  // namespace vprec
