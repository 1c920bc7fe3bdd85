#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace vprec {

/// The binary64 math-library entry points handled by the toolkit.
enum class MathFunction : std::uint8_t {
  sin, cos, tan, asin, acos, atan, atan2, exp, log, log2, log10,
  pow, sqrt, cbrt, hypot, fmod, floor, ceil, fabs, sincos,
};

inline constexpr std::size_t kMathFunctionCount = 20;

inline constexpr std::array<MathFunction, kMathFunctionCount> kAllMathFunctions = {
    MathFunction::sin,   MathFunction::cos,   MathFunction::tan,   MathFunction::asin,
    MathFunction::acos,  MathFunction::atan,  MathFunction::atan2, MathFunction::exp,
    MathFunction::log,   MathFunction::log2,  MathFunction::log10, MathFunction::pow,
    MathFunction::sqrt,  MathFunction::cbrt,  MathFunction::hypot, MathFunction::fmod,
    MathFunction::floor, MathFunction::ceil,  MathFunction::fabs,  MathFunction::sincos,
};

std::string_view name(MathFunction f) noexcept;
std::optional<MathFunction> parse_math_function(std::string_view name) noexcept;

/// Number of binary64 operands (1 or 2).
int arity(MathFunction f) noexcept;
/// Number of results: 2 for sincos, 1 otherwise.
int output_count(MathFunction f) noexcept;
/// fabs/floor/ceil/fmod produce exactly representable binary64 results.
bool is_exact_function(MathFunction f) noexcept;

}  // namespace vprec
