#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vprec/math_function.hpp"

namespace vprec {

inline constexpr std::string_view kProfileHeader = "#vprec-libm-profile v1";

/// Raised for malformed profile or config files; line() is 1-based, 0 when the
/// error is not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& message);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Closed interval over observed finite values. Empty while min > max.
/// Between signed zeros, -0 is the smaller endpoint, so updates commute bitwise.
struct Interval {
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();

  bool empty() const noexcept { return min > max; }
  void include(double v) noexcept {
    if (v < min || (v == min && __builtin_signbit(v))) min = v;
    if (v > max || (v == max && !__builtin_signbit(v))) max = v;
  }
  void merge(const Interval& other) noexcept {
    if (other.empty()) return;
    include(other.min);
    include(other.max);
  }
  bool contains(double v) const noexcept { return v >= min && v <= max; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Bitwise equality, so signed zeros and endpoint encodings are compared exactly.
bool bit_equal(const Interval& a, const Interval& b) noexcept;

/// Per-call-site profile. NaN and infinite values are excluded from the
/// intervals and tallied per call in nan_count/inf_count instead. The
/// magnitude intervals cover nonzero finite |x| and feed range/dynamic-range
/// analysis.
struct CallSiteRecord {
  MathFunction function = MathFunction::sin;
  std::uint64_t id = 0;
  std::uint64_t call_count = 0;
  std::uint64_t nan_count = 0;
  std::uint64_t inf_count = 0;
  std::array<Interval, 2> inputs{};
  Interval output{};
  std::array<Interval, 2> input_magnitudes{};
  Interval output_magnitude{};
  std::string object = "?";
  std::uint64_t offset = 0;

  /// Records one call. For sincos both results feed the single output interval.
  void observe(std::span<const double> operands, std::span<const double> results) noexcept;

  /// Union of intervals and sum of counters; commutative and associative.
  void merge(const CallSiteRecord& other);

  bool bit_identical(const CallSiteRecord& other) const noexcept;
};

/// Descending call_count, ties by ascending id.
void sort_by_frequency(std::vector<CallSiteRecord>& records);

/// Collapses records sharing an id, keeping first-occurrence order.
std::vector<CallSiteRecord> merge_duplicates(std::span<const CallSiteRecord> records);

std::string format_record(const CallSiteRecord& record);
void write_profile(std::ostream& out, std::span<const CallSiteRecord> records);
std::string write_profile(std::span<const CallSiteRecord> records);

std::vector<CallSiteRecord> parse_profile(std::istream& in);
std::vector<CallSiteRecord> parse_profile(std::string_view text);
std::vector<CallSiteRecord> load_profile(const std::filesystem::path& path);

/// Minimal exponent width whose normal range covers every observed nonzero
/// output magnitude; 1 when nothing nonzero was observed.
int derive_range_bits(const CallSiteRecord& record) noexcept;

/// Writes `contents` to a sibling temporary and renames it over `path`.
/// Throws std::runtime_error on failure.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace vprec
