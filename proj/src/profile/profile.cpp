#include "vprec/profile.hpp"

#include <unistd.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "fields.hpp"
#include "vprec/detail/float_bits.hpp"
#include "vprec/format.hpp"
#include "vprec/hexfloat.hpp"

namespace vprec {

ParseError::ParseError(std::size_t line, const std::string& message)
    : std::runtime_error(line == 0 ? message : "line " + std::to_string(line) + ": " + message),
      line_(line) {}

bool bit_equal(const Interval& a, const Interval& b) noexcept {
  return detail::to_bits(a.min) == detail::to_bits(b.min) &&
         detail::to_bits(a.max) == detail::to_bits(b.max);
}

void CallSiteRecord::observe(std::span<const double> operands,
                             std::span<const double> results) noexcept {
  ++call_count;
  bool saw_nan = false;
  bool saw_inf = false;
  const auto note = [&](double v, Interval& values, Interval& magnitudes) {
    if (std::isnan(v)) {
      saw_nan = true;
    } else if (std::isinf(v)) {
      saw_inf = true;
    } else {
      values.include(v);
      if (v != 0.0) magnitudes.include(detail::abs_bits(v));
    }
  };
  const std::size_t n = std::min<std::size_t>(operands.size(), inputs.size());
  for (std::size_t i = 0; i < n; ++i) note(operands[i], inputs[i], input_magnitudes[i]);
  for (const double r : results) note(r, output, output_magnitude);
  if (saw_nan) ++nan_count;
  if (saw_inf) ++inf_count;
}

void CallSiteRecord::merge(const CallSiteRecord& other) {
  call_count += other.call_count;
  nan_count += other.nan_count;
  inf_count += other.inf_count;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    inputs[i].merge(other.inputs[i]);
    input_magnitudes[i].merge(other.input_magnitudes[i]);
  }
  output.merge(other.output);
  output_magnitude.merge(other.output_magnitude);
  // Keep a deterministic location so merging stays order-independent.
  if (std::tie(other.object, other.offset) < std::tie(object, offset)) {
    object = other.object;
    offset = other.offset;
  }
  if (other.function < function) function = other.function;
}

bool CallSiteRecord::bit_identical(const CallSiteRecord& other) const noexcept {
  if (function != other.function || id != other.id || call_count != other.call_count ||
      nan_count != other.nan_count || inf_count != other.inf_count ||
      object != other.object || offset != other.offset) {
    return false;
  }
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (!bit_equal(inputs[i], other.inputs[i]) ||
        !bit_equal(input_magnitudes[i], other.input_magnitudes[i])) {
      return false;
    }
  }
  return bit_equal(output, other.output) && bit_equal(output_magnitude, other.output_magnitude);
}

void sort_by_frequency(std::vector<CallSiteRecord>& records) {
  std::stable_sort(records.begin(), records.end(),
                   [](const CallSiteRecord& a, const CallSiteRecord& b) {
                     if (a.call_count != b.call_count) return a.call_count > b.call_count;
                     return a.id < b.id;
                   });
}

std::vector<CallSiteRecord> merge_duplicates(std::span<const CallSiteRecord> records) {
  std::vector<CallSiteRecord> merged;
  std::unordered_map<std::uint64_t, std::size_t> index;
  for (const auto& record : records) {
    const auto [it, inserted] = index.try_emplace(record.id, merged.size());
    if (inserted) {
      merged.push_back(record);
    } else {
      merged[it->second].merge(record);
    }
  }
  return merged;
}

namespace {

std::string format_interval(const Interval& iv) {
  return format_hexfloat(iv.min) + ":" + format_hexfloat(iv.max);
}

Interval parse_interval(std::string_view text, std::size_t line, std::string_view key) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw ParseError(line, "interval '" + std::string(key) + "' lacks ':'");
  }
  const auto lo = parse_hexfloat(text.substr(0, colon));
  const auto hi = parse_hexfloat(text.substr(colon + 1));
  if (!lo || !hi || std::isnan(*lo) || std::isnan(*hi)) {
    throw ParseError(line, "bad interval endpoint in '" + std::string(key) + "'");
  }
  Interval iv{*lo, *hi};
  if (!iv.empty() && (std::isinf(iv.min) || std::isinf(iv.max))) {
    throw ParseError(line, "interval '" + std::string(key) + "' has an infinite endpoint");
  }
  if (iv.empty() && !(iv.min == Interval{}.min && iv.max == Interval{}.max)) {
    throw ParseError(line, "interval '" + std::string(key) + "' has min > max");
  }
  return iv;
}

std::uint64_t parse_count(std::string_view text, std::size_t line, std::string_view key) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError(line, "bad count for '" + std::string(key) + "'");
  }
  return value;
}

// Older or hand-written profiles may omit the magnitude fields; recover what
// the endpoints imply. An interval straddling zero only bounds the largest.
Interval magnitudes_from_endpoints(const Interval& iv) {
  Interval mag;
  if (iv.empty()) return mag;
  for (const double v : {iv.min, iv.max}) {
    if (v != 0.0) mag.include(detail::abs_bits(v));
  }
  return mag;
}

CallSiteRecord parse_record(std::string_view line, std::size_t line_no) {
  const auto fields = detail::split_fields(line, line_no);
  std::map<std::string_view, std::string_view> kv(fields.begin(), fields.end());
  const auto take = [&](std::string_view key, bool required) -> std::optional<std::string_view> {
    const auto it = kv.find(key);
    if (it == kv.end()) {
      if (required) throw ParseError(line_no, "missing field '" + std::string(key) + "'");
      return std::nullopt;
    }
    const auto value = it->second;
    kv.erase(it);
    return value;
  };

  CallSiteRecord r;
  const auto func = parse_math_function(*take("func", true));
  if (!func) throw ParseError(line_no, "unknown function");
  r.function = *func;
  const auto id = parse_hex64(*take("id", true));
  if (!id) throw ParseError(line_no, "bad id");
  r.id = *id;
  r.call_count = parse_count(*take("calls", true), line_no, "calls");
  r.nan_count = parse_count(*take("nan", true), line_no, "nan");
  r.inf_count = parse_count(*take("inf", true), line_no, "inf");
  if (r.nan_count > r.call_count || r.inf_count > r.call_count) {
    throw ParseError(line_no, "nan/inf count exceeds call count");
  }

  const int n = arity(r.function);
  for (int i = 0; i < 2; ++i) {
    const std::string key = "in" + std::to_string(i);
    const auto value = take(key, i < n);
    if (value && i >= n) throw ParseError(line_no, "unexpected field '" + key + "'");
    if (value) r.inputs[i] = parse_interval(*value, line_no, key);
    const std::string mag_key = key + "abs";
    const auto mag = take(mag_key, false);
    if (mag && i >= n) throw ParseError(line_no, "unexpected field '" + mag_key + "'");
    r.input_magnitudes[i] = mag ? parse_interval(*mag, line_no, mag_key)
                                : magnitudes_from_endpoints(r.inputs[i]);
  }
  r.output = parse_interval(*take("out", true), line_no, "out");
  const auto out_mag = take("outabs", false);
  r.output_magnitude = out_mag ? parse_interval(*out_mag, line_no, "outabs")
                               : magnitudes_from_endpoints(r.output);
  if (const auto obj = take("obj", false)) r.object = std::string(*obj);
  if (const auto off = take("off", false)) {
    const auto value = parse_hex64(*off);
    if (!value) throw ParseError(line_no, "bad offset");
    r.offset = *value;
  }
  if (!kv.empty()) {
    throw ParseError(line_no, "unknown field '" + std::string(kv.begin()->first) + "'");
  }
  return r;
}

}  // namespace

std::string format_record(const CallSiteRecord& r) {
  std::string line;
  line.reserve(256);
  line += "func=";
  line += name(r.function);
  line += " id=" + format_hex64(r.id);
  line += " calls=" + std::to_string(r.call_count);
  line += " nan=" + std::to_string(r.nan_count);
  line += " inf=" + std::to_string(r.inf_count);
  const int n = arity(r.function);
  for (int i = 0; i < n; ++i) line += " in" + std::to_string(i) + "=" + format_interval(r.inputs[i]);
  line += " out=" + format_interval(r.output);
  for (int i = 0; i < n; ++i) {
    line += " in" + std::to_string(i) + "abs=" + format_interval(r.input_magnitudes[i]);
  }
  line += " outabs=" + format_interval(r.output_magnitude);
  line += " obj=" + (r.object.empty() ? std::string("?") : r.object);
  line += " off=" + format_hex64(r.offset);
  return line;
}

void write_profile(std::ostream& out, std::span<const CallSiteRecord> records) {
  out << kProfileHeader << '\n';
  for (const auto& r : records) out << format_record(r) << '\n';
}

std::string write_profile(std::span<const CallSiteRecord> records) {
  std::ostringstream out;
  write_profile(out, records);
  return out.str();
}

std::vector<CallSiteRecord> parse_profile(std::istream& in) {
  std::string raw;
  std::size_t line_no = 0;
  if (!std::getline(in, raw)) throw ParseError(1, "missing profile header");
  ++line_no;
  const auto header = detail::trim_line(raw);
  if (header != kProfileHeader) {
    if (header.starts_with("#vprec-libm-profile")) {
      throw ParseError(1, "unsupported profile version '" + std::string(header) + "'");
    }
    throw ParseError(1, "not a vprec-libm profile");
  }
  std::vector<CallSiteRecord> records;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = detail::trim_line(raw);
    if (line.empty() || line.front() == '#') continue;
    records.push_back(parse_record(line, line_no));
  }
  return records;
}

std::vector<CallSiteRecord> parse_profile(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_profile(in);
}

std::vector<CallSiteRecord> load_profile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open profile " + path.string());
  return parse_profile(in);
}

int derive_range_bits(const CallSiteRecord& record) noexcept {
  const Interval& mag = record.output_magnitude;
  if (mag.empty()) return 1;
  const int lowest = std::ilogb(mag.min);
  const int highest = std::ilogb(mag.max);
  for (int r = FloatFormat::kMinExponentBits; r <= FloatFormat::kMaxExponentBits; ++r) {
    const FloatFormat fmt(r, FloatFormat::kMaxPrecisionBits);
    if (lowest >= fmt.emin() && highest <= fmt.emax()) return r;
  }
  return FloatFormat::kMaxExponentBits;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw std::runtime_error("cannot rename onto " + path.string());
  }
}

}  // namespace vprec
