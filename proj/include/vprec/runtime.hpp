#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "vprec/callsite.hpp"
#include "vprec/config.hpp"
#include "vprec/format.hpp"
#include "vprec/math_function.hpp"
#include "vprec/profile.hpp"

namespace vprec {

enum class Mode : std::uint8_t { passthrough, profile, execute };

std::string_view to_string(Mode mode) noexcept;
std::optional<Mode> parse_mode(std::string_view text) noexcept;

inline constexpr const char* kEnvMode = "VPREC_LIBM_MODE";
inline constexpr const char* kEnvProfileFile = "VPREC_LIBM_PROFILE_FILE";
inline constexpr const char* kEnvConfigFile = "VPREC_LIBM_CONFIG_FILE";
inline constexpr const char* kEnvNewSitesFile = "VPREC_LIBM_NEWSITES_FILE";
inline constexpr const char* kEnvStackFrames = "VPREC_LIBM_STACK_FRAMES";
inline constexpr const char* kDefaultProfileFile = "vprec-libm.profile";

struct RuntimeSettings {
  Mode mode = Mode::passthrough;
  std::filesystem::path profile_path = kDefaultProfileFile;
  std::filesystem::path new_sites_path;  // empty: no side log
  int stack_frames = 0;
  PrecisionConfig config;
};

/// Reads the VPREC_LIBM_* variables. Throws std::runtime_error for an unknown
/// mode, a bad frame count, or a missing/unparsable config in execute mode.
RuntimeSettings settings_from_environment();

/// The genuine implementations that results are delegated to.
struct GenuineFunctions {
  using Unary = double (*)(double);
  using Binary = double (*)(double, double);
  using SinCos = void (*)(double, double*, double*);

  std::array<Unary, kMathFunctionCount> unary{};
  std::array<Binary, kMathFunctionCount> binary{};
  SinCos sincos = nullptr;

  /// The math library this binary is linked against.
  static GenuineFunctions host();

  /// Name of the first missing entry point, if any.
  std::optional<std::string_view> missing() const noexcept;
};

/// The reduced-format evaluation path: extended evaluation rounded into `fmt`.
double execute_in_format(MathFunction f, double x, std::optional<double> y,
                         const FloatFormat& fmt);
void execute_sincos_in_format(double x, double* s, double* c, const FloatFormat& fmt);

/// Per-process interception state. Mode and config are immutable after
/// construction; profile updates are serialized by a single lock.
class Runtime {
 public:
  Runtime(RuntimeSettings settings, GenuineFunctions genuine);

  Mode mode() const noexcept { return settings_.mode; }
  const RuntimeSettings& settings() const noexcept { return settings_; }
  const GenuineFunctions& genuine() const noexcept { return genuine_; }

  double call(MathFunction f, double x, const void* return_address);
  double call(MathFunction f, double x, double y, const void* return_address);
  void call_sincos(double x, double* s, double* c, const void* return_address);

  /// Snapshot sorted by descending call count, ties by id.
  std::vector<CallSiteRecord> profile_records() const;

  /// Writes the profile atomically. Failures are reported on stderr and
  /// returned as false; they never terminate the subject. A process that made
  /// no calls leaves an existing profile untouched.
  bool flush_profile() const noexcept;

  /// The format a site executes with, or nullopt for a passthrough site.
  std::optional<FloatFormat> format_for(const CallSiteId& site, MathFunction f);

 private:
  void record(const CallSiteId& site, MathFunction f, std::span<const double> operands,
              std::span<const double> results);
  void note_new_site(const CallSiteId& site, MathFunction f);

  RuntimeSettings settings_;
  GenuineFunctions genuine_;
  SiteResolver resolver_;
  std::unordered_map<std::uint64_t, ConfigEntry> entries_;

  mutable std::mutex profile_mutex_;
  std::unordered_map<std::uint64_t, CallSiteRecord> profile_;

  std::mutex new_sites_mutex_;
  std::unordered_set<std::uint64_t> new_sites_;
};

}  // namespace vprec
