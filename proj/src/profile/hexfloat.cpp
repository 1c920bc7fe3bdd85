#include "vprec/hexfloat.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <limits>

namespace vprec {

namespace {

bool iequals(std::string_view a, std::string_view b) noexcept {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const char ca = static_cast<char>(a[i] | 0x20);
    if (ca != b[i]) return false;
  }
  return true;
}

// Handles the sign and the inf/nan spellings shared by both parsers.
struct Signed {
  bool negative = false;
  std::string_view body;
};

Signed split_sign(std::string_view text) noexcept {
  Signed s{false, text};
  if (!s.body.empty() && (s.body.front() == '-' || s.body.front() == '+')) {
    s.negative = s.body.front() == '-';
    s.body.remove_prefix(1);
  }
  return s;
}

std::optional<double> parse_special(const Signed& s) noexcept {
  if (iequals(s.body, "inf") || iequals(s.body, "infinity")) {
    const double inf = std::numeric_limits<double>::infinity();
    return s.negative ? -inf : inf;
  }
  if (iequals(s.body, "nan")) return std::numeric_limits<double>::quiet_NaN();
  return std::nullopt;
}

std::optional<double> parse_body(std::string_view body, std::chars_format fmt,
                                 bool negative) noexcept {
  if (body.empty() || body.front() == '-' || body.front() == '+') return std::nullopt;
  double value = 0.0;
  const auto* first = body.data();
  const auto* last = body.data() + body.size();
  const auto [ptr, ec] = std::from_chars(first, last, value, fmt);
  // ERANGE still yields the correctly rounded value for hex input in libstdc++,
  // but an out-of-range decimal literal is not a value we want to accept.
  if (ec != std::errc{} || ptr != last) return std::nullopt;
  return negative ? -value : value;
}

bool has_hex_prefix(std::string_view body) noexcept {
  return body.size() > 2 && body[0] == '0' && (body[1] == 'x' || body[1] == 'X');
}

}  // namespace

std::string format_hexfloat(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x < 0 ? "-inf" : "inf";
  std::array<char, 64> buf{};
  const double magnitude = std::signbit(x) ? -x : x;
  const auto [ptr, ec] =
      std::to_chars(buf.data(), buf.data() + buf.size(), magnitude, std::chars_format::hex);
  std::string out = std::signbit(x) ? "-0x" : "0x";
  out.append(buf.data(), ptr);
  return out;
}

std::optional<double> parse_hexfloat(std::string_view text) noexcept {
  const Signed s = split_sign(text);
  if (auto special = parse_special(s)) return special;
  std::string_view body = s.body;
  if (has_hex_prefix(body)) body.remove_prefix(2);
  return parse_body(body, std::chars_format::hex, s.negative);
}

std::optional<double> parse_number(std::string_view text) noexcept {
  const Signed s = split_sign(text);
  if (auto special = parse_special(s)) return special;
  if (has_hex_prefix(s.body)) {
    return parse_body(s.body.substr(2), std::chars_format::hex, s.negative);
  }
  return parse_body(s.body, std::chars_format::general, s.negative);
}

std::string format_hex64(std::uint64_t value) {
  std::array<char, 16> digits{};
  std::string out = "0x";
  const auto [ptr, ec] = std::to_chars(digits.data(), digits.data() + digits.size(), value, 16);
  out.append(16 - static_cast<std::size_t>(ptr - digits.data()), '0');
  out.append(digits.data(), ptr);
  return out;
}

std::optional<std::uint64_t> parse_hex64(std::string_view text) noexcept {
  if (has_hex_prefix(text)) text.remove_prefix(2);
  if (text.empty() || text.size() > 16) return std::nullopt;
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value, 16);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

}  // namespace vprec
