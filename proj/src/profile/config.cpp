#include "vprec/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "fields.hpp"
#include "vprec/hexfloat.hpp"

namespace vprec {

std::string_view to_string(SiteMode mode) noexcept {
  return mode == SiteMode::vprec ? "vprec" : "passthrough";
}

const ConfigEntry* PrecisionConfig::find(std::uint64_t id) const noexcept {
  for (const auto& e : entries) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

ConfigEntry* PrecisionConfig::find(std::uint64_t id) noexcept {
  for (auto& e : entries) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

void write_config(std::ostream& out, const PrecisionConfig& config) {
  out << kConfigHeader << '\n';
  out << "default p=" << config.default_format.precision_bits()
      << " r=" << config.default_format.exponent_bits() << '\n';
  for (const auto& e : config.entries) {
    out << "site id=" << format_hex64(e.id) << " func=" << name(e.function)
        << " p=" << e.format.precision_bits() << " r=" << e.format.exponent_bits()
        << " mode=" << to_string(e.mode) << '\n';
  }
}

std::string write_config(const PrecisionConfig& config) {
  std::ostringstream out;
  write_config(out, config);
  return out.str();
}

namespace {

int parse_int(std::string_view text, std::size_t line, std::string_view what) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError(line, "bad integer for " + std::string(what));
  }
  return value;
}

FloatFormat parse_format(std::string_view p_text, std::string_view r_text, std::size_t line,
                         const std::string& entry) {
  const int p = parse_int(p_text, line, entry + " p");
  const int r = parse_int(r_text, line, entry + " r");
  if (!FloatFormat::valid(r, p)) {
    throw ParseError(line, entry + ": format p=" + std::to_string(p) + " r=" +
                               std::to_string(r) + " outside p in [0,52], r in [1,11]");
  }
  return {r, p};
}

}  // namespace

PrecisionConfig parse_config(std::istream& in) {
  std::string raw;
  if (!std::getline(in, raw)) throw ParseError(1, "missing config header");
  const auto header = detail::trim_line(raw);
  if (header != kConfigHeader) {
    if (header.starts_with("#vprec-libm-config")) {
      throw ParseError(1, "unsupported config version '" + std::string(header) + "'");
    }
    throw ParseError(1, "not a vprec-libm config");
  }

  PrecisionConfig config;
  bool have_default = false;
  std::unordered_set<std::uint64_t> seen;
  std::size_t line_no = 1;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = detail::trim_line(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = detail::split_fields(line, line_no, 1);
    const std::string_view kind = fields.front().first;

    if (kind == "default") {
      if (have_default) throw ParseError(line_no, "duplicate default line");
      std::string_view p, r;
      for (std::size_t i = 1; i < fields.size(); ++i) {
        const auto& [key, value] = fields[i];
        if (key == "p") p = value;
        else if (key == "r") r = value;
        else throw ParseError(line_no, "unknown key '" + std::string(key) + "' in default");
      }
      if (p.empty() || r.empty()) throw ParseError(line_no, "default needs p and r");
      config.default_format = parse_format(p, r, line_no, "default");
      have_default = true;
    } else if (kind == "site") {
      std::string_view id_text, func_text, p, r, mode_text;
      for (std::size_t i = 1; i < fields.size(); ++i) {
        const auto& [key, value] = fields[i];
        if (key == "id") id_text = value;
        else if (key == "func") func_text = value;
        else if (key == "p") p = value;
        else if (key == "r") r = value;
        else if (key == "mode") mode_text = value;
        else throw ParseError(line_no, "unknown key '" + std::string(key) + "' in site");
      }
      if (id_text.empty() || func_text.empty() || p.empty() || r.empty() || mode_text.empty()) {
        throw ParseError(line_no, "site needs id, func, p, r and mode");
      }
      ConfigEntry entry;
      const auto id = parse_hex64(id_text);
      if (!id) throw ParseError(line_no, "bad site id '" + std::string(id_text) + "'");
      entry.id = *id;
      const std::string label = "site " + format_hex64(entry.id);
      const auto func = parse_math_function(func_text);
      if (!func) throw ParseError(line_no, label + ": unknown function");
      entry.function = *func;
      entry.format = parse_format(p, r, line_no, label);
      if (mode_text == "vprec") entry.mode = SiteMode::vprec;
      else if (mode_text == "passthrough") entry.mode = SiteMode::passthrough;
      else throw ParseError(line_no, label + ": unknown mode '" + std::string(mode_text) + "'");
      if (!seen.insert(entry.id).second) throw ParseError(line_no, label + ": duplicate id");
      config.entries.push_back(entry);
    } else {
      throw ParseError(line_no, "unknown directive '" + std::string(kind) + "'");
    }
  }
  if (!have_default) throw ParseError(0, "config lacks a default line");
  return config;
}

PrecisionConfig parse_config(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_config(in);
}

PrecisionConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  return parse_config(in);
}

PrecisionConfig initial_config(std::span<const CallSiteRecord> profile) {
  PrecisionConfig config;
  for (const auto& record : merge_duplicates(profile)) {
    config.entries.push_back(
        {record.id, record.function, FloatFormat::binary64(), SiteMode::vprec});
  }
  return config;
}

}  // namespace vprec
