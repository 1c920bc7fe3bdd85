#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace vprec {

struct Tolerance {
  double relative = 0.0;
  double absolute = 0.0;
};

struct Verdict {
  bool accepted = false;
  std::string diagnostic;  // first offending token pair, or why the streams differ
};

/// Whitespace-separated tokens.
std::vector<std::string_view> tokenize(std::string_view text);

/// Accepts iff both streams have the same token layout and every numeric pair
/// satisfies |c - r| <= max(absolute, relative * |r|). NaN matches only NaN,
/// infinities must match including sign, and non-numeric tokens (labels,
/// sentinels) must be identical.
Verdict compare_numeric(std::string_view candidate, std::string_view reference,
                        const Tolerance& tolerance);

}  // namespace vprec
