#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vprec/format.hpp"
#include "vprec/math_function.hpp"
#include "vprec/profile.hpp"

namespace vprec {

inline constexpr std::string_view kConfigHeader = "#vprec-libm-config v1";

enum class SiteMode : std::uint8_t { vprec, passthrough };

std::string_view to_string(SiteMode mode) noexcept;

struct ConfigEntry {
  std::uint64_t id = 0;
  MathFunction function = MathFunction::sin;
  FloatFormat format = FloatFormat::binary64();
  SiteMode mode = SiteMode::vprec;

  friend bool operator==(const ConfigEntry&, const ConfigEntry&) = default;
};

/// Per-call-site output formats for execute mode. Sites without an entry use
/// `default_format`.
struct PrecisionConfig {
  FloatFormat default_format = FloatFormat::binary64();
  std::vector<ConfigEntry> entries;

  const ConfigEntry* find(std::uint64_t id) const noexcept;
  ConfigEntry* find(std::uint64_t id) noexcept;

  friend bool operator==(const PrecisionConfig&, const PrecisionConfig&) = default;
};

void write_config(std::ostream& out, const PrecisionConfig& config);
std::string write_config(const PrecisionConfig& config);

/// Throws ParseError on unknown keys, out-of-range p/r and duplicate ids.
PrecisionConfig parse_config(std::istream& in);
PrecisionConfig parse_config(std::string_view text);
PrecisionConfig load_config(const std::filesystem::path& path);

/// One binary64 (p=52, r=11) vprec entry per distinct call-site.
PrecisionConfig initial_config(std::span<const CallSiteRecord> profile);

}  // namespace vprec
