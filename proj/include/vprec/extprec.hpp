#pragma once

#include <optional>

#include "vprec/extended.hpp"
#include "vprec/math_function.hpp"

namespace vprec {

struct SinCosValue {
  ExtendedValue sin;
  ExtendedValue cos;
};

/// Evaluates `f` well beyond binary64 precision (relative error below 2^-64 for
/// finite nonzero transcendental results; fabs/floor/ceil/fmod are exact).
///
/// Domain errors yield NaN and poles yield signed infinities, following the
/// host math library's binary64 conventions. `y` must be present exactly when
/// `f` takes two operands; sincos is evaluated through eval_sincos().
/// Throws std::invalid_argument on an operand-count mismatch.
ExtendedValue eval_extended(MathFunction f, double x, std::optional<double> y = std::nullopt);

SinCosValue eval_sincos(double x) noexcept;

}  // namespace vprec
