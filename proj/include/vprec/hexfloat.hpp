#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace vprec {

/// Locale-independent C99 hexadecimal rendering: 3.25 -> "0x1.ap+1",
/// -0.0 -> "-0x0p+0", infinities -> "inf"/"-inf", NaN -> "nan".
std::string format_hexfloat(double x);

/// Parses the output of format_hexfloat() (the "0x" prefix is optional).
/// Returns nullopt unless the whole token is consumed.
std::optional<double> parse_hexfloat(std::string_view text) noexcept;

/// Parses a decimal or hexadecimal floating-point token, including inf/nan.
std::optional<double> parse_number(std::string_view text) noexcept;

/// Lowercase 16-digit hexadecimal with "0x" prefix.
std::string format_hex64(std::uint64_t value);
std::optional<std::uint64_t> parse_hex64(std::string_view text) noexcept;

}  // namespace vprec
