#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vprec/config.hpp"
#include "vprec/profile.hpp"

namespace vprec {

struct ReportRow {
  std::size_t rank = 0;  // 1-based
  MathFunction function = MathFunction::sin;
  std::uint64_t id = 0;
  std::uint64_t calls = 0;
  int operands = 1;
  std::array<Interval, 2> inputs{};
  std::array<std::optional<double>, 2> input_dynamic_range{};
  Interval output{};
  std::optional<int> output_exponent_span;
  int p_original = 52;
  int p_optimized = 52;
  int r_optimized = 11;
  SiteMode mode = SiteMode::vprec;
};

struct Report {
  std::vector<ReportRow> rows;
  std::vector<std::string> warnings;
};

/// log2(max) - log2(min) over nonzero finite magnitudes; unset when undefined.
std::optional<double> dynamic_range(const Interval& magnitudes) noexcept;

/// ilogb(max |out|) - ilogb(min |out|); unset when no nonzero finite output.
std::optional<int> exponent_span(const Interval& magnitudes) noexcept;

/// Top `top_n` profiled sites by frequency, then sites known only to the
/// config (with zero calls and a warning). Throws std::invalid_argument if top_n is 0.
Report build_report(std::span<const CallSiteRecord> profile, const PrecisionConfig& config,
                    std::size_t top_n);

std::string csv_header();
std::string write_csv(const Report& report);

struct Charts {
  std::string counts;
  std::string dynamic_range;
  std::string precision;
};

inline constexpr std::array<int, 2> kPrecisionReferenceLines{23, 28};

/// SVG bar charts; every bar and reference line carries its value in a
/// data-value attribute.
Charts render_charts(const Report& report);

struct SinCosPair {
  std::uint64_t sin_id = 0;
  std::uint64_t cos_id = 0;
};

/// Heuristic: sin/cos sites in the same object with equal call counts and
/// bit-identical operand intervals probably share an argument stream.
std::vector<SinCosPair> suggest_sincos(std::span<const CallSiteRecord> profile);

}  // namespace vprec
