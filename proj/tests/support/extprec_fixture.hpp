#pragma once

#include <cmath>
#include <cstdlib>
#include <optional>
#include <span>

namespace fixture {

struct Entry {
  const char* func;
  const char* x;
  std::optional<const char*> y;
  const char* ref_hi;
  const char* ref_lo;
};

inline constexpr Entry kEntries[] = {
#include "extprec_fixture.inc"
};

inline double hex(const char* s) { return std::strtod(s, nullptr); }

/// |(hi + lo) - (ref_hi + ref_lo)| / |ref_hi + ref_lo| in quad precision.
inline double relative_error(double hi, double lo, double ref_hi, double ref_lo) {
  const __float128 got = static_cast<__float128>(hi) + lo;
  const __float128 ref = static_cast<__float128>(ref_hi) + ref_lo;
  __float128 diff = got - ref;
  if (diff < 0) diff = -diff;
  __float128 mag = ref < 0 ? -ref : ref;
  if (mag == 0) return diff == 0 ? 0.0 : INFINITY;
  return static_cast<double>(diff / mag);
}

}  // namespace fixture
