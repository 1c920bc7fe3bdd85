#pragma once

#include <bit>
#include <cstdint>

// Bit-level helpers that avoid calling into the math library. The interposer
// exports floor/fabs itself, so its own code paths must not depend on them.

namespace vprec::detail {

inline std::uint64_t to_bits(double x) noexcept { return std::bit_cast<std::uint64_t>(x); }
inline double from_bits(std::uint64_t b) noexcept { return std::bit_cast<double>(b); }

/// floor(x) for |x| < 2^62.
inline double floor_small(double x) noexcept {
  auto i = static_cast<std::int64_t>(x);
  if (static_cast<double>(i) > x) --i;
  return static_cast<double>(i);
}

/// True for positive finite x (normal or subnormal) that is an exact power of two.
inline bool is_power_of_two(double x) noexcept {
  const std::uint64_t bits = to_bits(x);
  const std::uint64_t exponent = (bits >> 52) & 0x7ff;
  const std::uint64_t fraction = bits & ((std::uint64_t{1} << 52) - 1);
  if (exponent == 0) return fraction != 0 && (fraction & (fraction - 1)) == 0;
  return exponent != 0x7ff && fraction == 0;
}

inline double abs_bits(double x) noexcept {
  return from_bits(to_bits(x) & ~(std::uint64_t{1} << 63));
}

}  // namespace vprec::detail
