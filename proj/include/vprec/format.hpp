#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "vprec/extended.hpp"

namespace vprec {

/// A reduced floating-point output format embedded in binary64: `exponent_bits`
/// pseudo-exponent bits and `precision_bits` explicit fraction bits.
///
/// Target formats have no subnormals. With r = 1 the only exponent is 0.
class FloatFormat {
 public:
  static constexpr int kMinExponentBits = 1;
  static constexpr int kMaxExponentBits = 11;
  static constexpr int kMinPrecisionBits = 0;
  static constexpr int kMaxPrecisionBits = 52;

  /// Throws std::invalid_argument when r or p is out of range.
  FloatFormat(int exponent_bits, int precision_bits);

  static FloatFormat binary64() { return {11, 52}; }
  static FloatFormat binary32() { return {8, 23}; }

  static bool valid(int exponent_bits, int precision_bits) noexcept;

  int exponent_bits() const noexcept { return exponent_bits_; }
  int precision_bits() const noexcept { return precision_bits_; }

  int bias() const noexcept;
  int emax() const noexcept;
  int emin() const noexcept;
  /// Largest finite magnitude (2 - 2^-p) * 2^emax.
  double max_finite() const noexcept;
  /// Smallest normal magnitude 2^emin.
  double min_normal() const noexcept;

  friend bool operator==(const FloatFormat&, const FloatFormat&) = default;

 private:
  int exponent_bits_;
  int precision_bits_;
};

enum class RoundingFlag : std::uint8_t { exact, inexact, overflow, underflow, special };

std::string_view to_string(RoundingFlag flag) noexcept;

struct RoundedResult {
  double value;
  RoundingFlag flag;
};

/// Rounds `z` into `fmt`: add half an ulp at precision p, truncate to p
/// fraction bits (the magnitude is rounded, so ties go away from zero).
/// Range checks are applied after rounding; values below 2^emin flush to zero.
RoundedResult round_to_format(const ExtendedValue& z, const FloatFormat& fmt) noexcept;

inline RoundedResult round_to_format(double z, const FloatFormat& fmt) noexcept {
  return round_to_format(ExtendedValue{z}, fmt);
}

bool is_representable(double x, const FloatFormat& fmt) noexcept;

}  // namespace vprec
