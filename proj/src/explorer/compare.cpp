#include "vprec/compare.hpp"

#include <cmath>
#include <optional>

#include "vprec/hexfloat.hpp"

namespace vprec {

std::vector<std::string_view> tokenize(std::string_view text) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
  };
  while (pos < text.size()) {
    while (pos < text.size() && is_space(text[pos])) ++pos;
    const std::size_t start = pos;
    while (pos < text.size() && !is_space(text[pos])) ++pos;
    if (pos > start) tokens.push_back(text.substr(start, pos - start));
  }
  return tokens;
}

namespace {

std::string describe(std::size_t index, std::string_view c, std::string_view r) {
  return "token " + std::to_string(index) + ": candidate '" + std::string(c) +
         "' vs reference '" + std::string(r) + "'";
}

bool within(double c, double r, const Tolerance& tol) {
  if (std::isnan(r) || std::isnan(c)) return std::isnan(r) && std::isnan(c);
  if (std::isinf(r) || std::isinf(c)) return c == r;
  const double bound = std::max(tol.absolute, tol.relative * std::abs(r));
  return std::abs(c - r) <= bound;
}

}  // namespace

Verdict compare_numeric(std::string_view candidate, std::string_view reference,
                        const Tolerance& tolerance) {
  const auto cand = tokenize(candidate);
  const auto ref = tokenize(reference);
  if (cand.size() != ref.size()) {
    return {false, "token count mismatch: candidate " + std::to_string(cand.size()) +
                       ", reference " + std::to_string(ref.size())};
  }
  for (std::size_t i = 0; i < cand.size(); ++i) {
    const auto c = parse_number(cand[i]);
    const auto r = parse_number(ref[i]);
    if (c.has_value() != r.has_value()) return {false, describe(i, cand[i], ref[i])};
    if (!c) {
      if (cand[i] != ref[i]) return {false, describe(i, cand[i], ref[i])};
      continue;
    }
    if (!within(*c, *r, tolerance)) return {false, describe(i, cand[i], ref[i])};
  }
  return {true, {}};
}

}  // namespace vprec
