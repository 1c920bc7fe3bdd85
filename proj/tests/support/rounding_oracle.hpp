#pragma once

// Brute-force reference for reduced-format rounding, built from bit masks on
// the binary64 encoding. It shares no code with the library.

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

namespace oracle {

enum class Outcome { exact, inexact, overflow, underflow, special };

struct Rounded {
  double value;
  Outcome outcome;
};

struct Bounds {
  double largest;   // (2 - 2^-p) * 2^emax
  double smallest;  // 2^emin
};

inline Bounds bounds(int r, int p) {
  const int emax = (1 << (r - 1)) - 1;
  const int emin = r == 1 ? 0 : -emax + 1;
  return {std::ldexp(2.0 - std::ldexp(1.0, -p), emax), std::ldexp(1.0, emin)};
}

/// The p-bit neighbours of |z| by truncating and incrementing the encoding.
struct Neighbours {
  double down;
  double up;
};

inline Neighbours neighbours(double magnitude, int p) {
  const auto bits = std::bit_cast<std::uint64_t>(magnitude);
  const std::uint64_t step = std::uint64_t{1} << (52 - p);
  const std::uint64_t down = bits & ~(step - 1);
  return {std::bit_cast<double>(down), std::bit_cast<double>(down + step)};
}

inline Rounded round(double z, int r, int p) {
  if (std::isnan(z) || std::isinf(z)) return {z, Outcome::special};
  if (z == 0.0) return {z, Outcome::exact};
  const bool negative = std::signbit(z);
  double a = std::abs(z);

  // Subnormal inputs are scaled into the normal range so the mask applies.
  int scale = 0;
  if (a < 0x1p-1000) {
    a *= 0x1p128;
    scale = 128;
  }
  const auto [down, up] = neighbours(a, p);
  double chosen;
  if (a == down) {
    chosen = down;
  } else if (std::isinf(up)) {
    // up is 2^1024; compare distances at half scale, where they are exact.
    const double below = a / 2 - down / 2;
    const double above = 0x1p1023 - a / 2;
    chosen = below < above ? down : up;
  } else {
    const double below = a - down;
    const double above = up - a;
    chosen = below < above ? down : up;
  }

  const Bounds b = bounds(r, p);
  const double sign = negative ? -1.0 : 1.0;
  if (scale == 0 && chosen > b.largest) {
    return {sign * std::numeric_limits<double>::infinity(), Outcome::overflow};
  }
  if (chosen < std::ldexp(b.smallest, scale)) return {sign * 0.0, Outcome::underflow};
  const double value = std::ldexp(chosen, -scale);
  return {sign * value, chosen == a ? Outcome::exact : Outcome::inexact};
}

}  // namespace oracle
