#include "vprec/math_function.hpp"

namespace vprec {

namespace {

constexpr std::array<std::string_view, kMathFunctionCount> kNames = {
    "sin", "cos", "tan", "asin", "acos", "atan", "atan2", "exp", "log", "log2",
    "log10", "pow", "sqrt", "cbrt", "hypot", "fmod", "floor", "ceil", "fabs", "sincos",
};

}  // namespace

std::string_view name(MathFunction f) noexcept { return kNames[static_cast<std::size_t>(f)]; }

std::optional<MathFunction> parse_math_function(std::string_view text) noexcept {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == text) return static_cast<MathFunction>(i);
  }
  return std::nullopt;
}

int arity(MathFunction f) noexcept {
  switch (f) {
    case MathFunction::atan2:
    case MathFunction::pow:
    case MathFunction::hypot:
    case MathFunction::fmod:
      return 2;
    default:
      return 1;
  }
}

int output_count(MathFunction f) noexcept { return f == MathFunction::sincos ? 2 : 1; }

bool is_exact_function(MathFunction f) noexcept {
  return f == MathFunction::fabs || f == MathFunction::floor || f == MathFunction::ceil ||
         f == MathFunction::fmod;
}

}  // namespace vprec
