#pragma once

namespace vprec {

/// Unevaluated sum hi + lo carrying more precision than a single binary64.
///
/// Invariant: |lo| <= ulp(hi) / 2 for finite nonzero hi, and lo == 0 when hi
/// is zero, infinite or NaN.
struct ExtendedValue {
  double hi = 0.0;
  double lo = 0.0;

  constexpr ExtendedValue() = default;
  constexpr explicit ExtendedValue(double value) : hi(value) {}
  constexpr ExtendedValue(double high, double low) : hi(high), lo(low) {}

  friend constexpr bool operator==(const ExtendedValue&, const ExtendedValue&) = default;
};

/// Exact error-free sum a + b = s + e (Knuth).
inline void two_sum(double a, double b, double& s, double& e) noexcept {
  s = a + b;
  const double bb = s - a;
  e = (a - (s - bb)) + (b - bb);
}

}  // namespace vprec
