#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vprec/compare.hpp"
#include "vprec/config.hpp"
#include "vprec/profile.hpp"

namespace vprec {

struct SearchOutcome {
  int value = 0;          // minimal passing value, or `hi` when even `hi` fails
  int trials = 0;         // including the initial check at `hi`
  bool feasible = false;  // whether `hi` passed
};

/// Minimal v in [lo, hi] with passes(v), assuming monotonicity. Checks `hi`
/// first, then keeps "hi passes, lo - 1 fails".
SearchOutcome search_minimal(const std::function<bool(int)>& passes, int lo, int hi);

inline constexpr int kMaxTrialsPerSite = 7;

struct TrialResult {
  bool pass = false;
  std::chrono::milliseconds wall{0};
};

/// One full subject run under a candidate configuration.
class TrialRunner {
 public:
  virtual ~TrialRunner() = default;
  virtual TrialResult run(const PrecisionConfig& config) = 0;
};

struct ExploreOptions {
  int range_margin = 1;
  bool explore_range = false;
  bool certificates = true;
  std::optional<std::size_t> max_sites;
};

struct TrialLogEntry {
  std::uint64_t site = 0;
  int precision = 0;
  bool pass = false;
  std::chrono::milliseconds wall{0};
};

std::string format_trial_log(std::span<const TrialLogEntry> log);

struct Certificate {
  std::optional<bool> below_fails;  // unset when p* = 0
  bool at_passes = false;

  bool holds() const noexcept { return below_fails.value_or(true) && at_passes; }
};

struct SiteOutcome {
  std::uint64_t id = 0;
  MathFunction function = MathFunction::sin;
  std::uint64_t calls = 0;
  bool explored = false;
  int precision = 52;
  int range_bits = 11;
  SiteMode mode = SiteMode::vprec;
  int precision_trials = 0;
  int range_trials = 0;
  std::optional<Certificate> certificate;
};

struct ExplorationResult {
  PrecisionConfig config;
  std::vector<SiteOutcome> sites;  // visit order
  std::vector<TrialLogEntry> trial_log;
  std::vector<std::string> warnings;
  bool validation_passed = false;
};

/// The per-site search over an already profiled subject. Sites are visited in
/// frequency order; decided sites keep their minima, undecided ones stay at 52.
ExplorationResult explore_sites(std::span<const CallSiteRecord> profile, TrialRunner& runner,
                                const ExploreOptions& options);

std::string exploration_json(const ExplorationResult& result);

/// Subject process driver: runs the subject under the interposer and judges
/// its standard output against a reference output.
struct SubjectSetup {
  std::string command;  // run through /bin/sh -c
  std::filesystem::path workdir;
  std::filesystem::path interposer;
  std::optional<std::string> checker;  // external check; numeric comparison otherwise
  Tolerance tolerance;
  std::chrono::milliseconds timeout{0};
};

/// Raised when the subject cannot be profiled or its reference run fails.
class SetupError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SubjectRunner final : public TrialRunner {
 public:
  SubjectRunner(SubjectSetup setup, std::filesystem::path reference_output);
  TrialResult run(const PrecisionConfig& config) override;

 private:
  SubjectSetup setup_;
  std::filesystem::path reference_;
  std::string reference_text_;
  std::uint64_t counter_ = 0;
};

/// Runs the subject in execute mode under an all-binary64 config and keeps the
/// output at `output`. Throws SetupError on a nonzero exit.
void reference_run(const SubjectSetup& setup, const std::filesystem::path& output);

/// Runs the subject in profile mode and returns the parsed records.
std::vector<CallSiteRecord> profile_run(const SubjectSetup& setup,
                                        const std::filesystem::path& profile_path);

/// Interposer location: explicit path, then VPREC_LIBM_LIBRARY, then the build tree.
std::filesystem::path locate_interposer(const std::optional<std::filesystem::path>& explicit_path);

}  // namespace vprec
