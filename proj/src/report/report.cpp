#include "vprec/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <unordered_set>

#include "vprec/hexfloat.hpp"

namespace vprec {

std::optional<double> dynamic_range(const Interval& magnitudes) noexcept {
  if (magnitudes.empty() || !(magnitudes.min > 0.0) || !std::isfinite(magnitudes.max)) {
    return std::nullopt;
  }
  return std::log2(magnitudes.max) - std::log2(magnitudes.min);
}

std::optional<int> exponent_span(const Interval& magnitudes) noexcept {
  if (magnitudes.empty() || !(magnitudes.min > 0.0) || !std::isfinite(magnitudes.max)) {
    return std::nullopt;
  }
  return std::ilogb(magnitudes.max) - std::ilogb(magnitudes.min);
}

Report build_report(std::span<const CallSiteRecord> profile, const PrecisionConfig& config,
                    std::size_t top_n) {
  if (top_n == 0) throw std::invalid_argument("top_n must be at least 1");
  auto records = merge_duplicates(profile);
  sort_by_frequency(records);

  Report report;
  const auto fill_config = [&](ReportRow& row) {
    if (const ConfigEntry* e = config.find(row.id)) {
      row.p_optimized = e->format.precision_bits();
      row.r_optimized = e->format.exponent_bits();
      row.mode = e->mode;
    } else {
      row.p_optimized = config.default_format.precision_bits();
      row.r_optimized = config.default_format.exponent_bits();
    }
  };

  std::unordered_set<std::uint64_t> profiled;
  for (const auto& r : records) profiled.insert(r.id);

  for (std::size_t i = 0; i < records.size() && i < top_n; ++i) {
    const auto& rec = records[i];
    ReportRow row;
    row.rank = i + 1;
    row.function = rec.function;
    row.id = rec.id;
    row.calls = rec.call_count;
    row.operands = arity(rec.function);
    for (int k = 0; k < row.operands; ++k) {
      row.inputs[k] = rec.inputs[k];
      row.input_dynamic_range[k] = dynamic_range(rec.input_magnitudes[k]);
    }
    row.output = rec.output;
    row.output_exponent_span = exponent_span(rec.output_magnitude);
    fill_config(row);
    report.rows.push_back(row);
  }

  for (const auto& entry : config.entries) {
    if (profiled.contains(entry.id)) continue;
    ReportRow row;
    row.rank = report.rows.size() + 1;
    row.function = entry.function;
    row.id = entry.id;
    row.operands = arity(entry.function);
    fill_config(row);
    report.rows.push_back(row);
    report.warnings.push_back("site " + format_hex64(entry.id) +
                              " is configured but absent from the profile");
  }
  return report;
}

namespace {

std::string shortest(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string hex_or_empty(const Interval& iv, bool upper) {
  if (iv.empty()) return {};
  return format_hexfloat(upper ? iv.max : iv.min);
}

}  // namespace

std::string csv_header() {
  return "rank,func,id,calls,in0_min,in0_max,in0_dynamic_range,in1_min,in1_max,"
         "in1_dynamic_range,out_min,out_max,out_exponent_span,p_original,p_optimized,"
         "r_optimized,mode\n";
}

std::string write_csv(const Report& report) {
  std::string out = csv_header();
  for (const auto& row : report.rows) {
    out += std::to_string(row.rank) + "," + std::string(name(row.function)) + "," +
           format_hex64(row.id) + "," + std::to_string(row.calls);
    for (int k = 0; k < 2; ++k) {
      const bool used = k < row.operands;
      out += "," + (used ? hex_or_empty(row.inputs[k], false) : std::string());
      out += "," + (used ? hex_or_empty(row.inputs[k], true) : std::string());
      out += ",";
      if (used && row.input_dynamic_range[k]) out += shortest(*row.input_dynamic_range[k]);
    }
    out += "," + hex_or_empty(row.output, false) + "," + hex_or_empty(row.output, true) + ",";
    if (row.output_exponent_span) out += std::to_string(*row.output_exponent_span);
    out += "," + std::to_string(row.p_original) + "," + std::to_string(row.p_optimized) + "," +
           std::to_string(row.r_optimized) + "," + std::string(to_string(row.mode)) + "\n";
  }
  return out;
}

namespace {

constexpr double kLeft = 64.0;
constexpr double kTop = 36.0;
constexpr double kPlotHeight = 240.0;
constexpr double kBottom = 72.0;
constexpr double kSlot = 24.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

class BarChart {
 public:
  BarChart(std::string title, std::string y_label, double y_max, std::size_t slots)
      : title_(std::move(title)), y_label_(std::move(y_label)), y_max_(y_max > 0 ? y_max : 1.0),
        width_(kLeft + kSlot * static_cast<double>(std::max<std::size_t>(slots, 1)) + 24.0) {}

  double y(double v) const { return kTop + kPlotHeight * (1.0 - v / y_max_); }

  void bar(std::size_t slot, int lane, int lanes, double value, const std::string& cls,
           std::uint64_t site, std::string_view raw) {
    const double w = (kSlot - 6.0) / lanes;
    const double x = kLeft + kSlot * static_cast<double>(slot) + 3.0 + w * lane;
    const double top = y(value);
    body_ += "  <rect class=\"bar " + cls + "\" data-site=\"" + format_hex64(site) +
             "\" data-value=\"" + std::string(raw) + "\" x=\"" + num(x) + "\" y=\"" + num(top) +
             "\" width=\"" + num(w) + "\" height=\"" + num(kTop + kPlotHeight - top) + "\"/>\n";
  }

  void label(std::size_t slot, const std::string& text) {
    const double x = kLeft + kSlot * (static_cast<double>(slot) + 0.5);
    const double yy = kTop + kPlotHeight + 8.0;
    body_ += "  <text class=\"site-label\" x=\"" + num(x) + "\" y=\"" + num(yy) +
             "\" transform=\"rotate(60 " + num(x) + " " + num(yy) + ")\">" + text + "</text>\n";
  }

  void reference_line(int value) {
    const std::string yy = num(y(value));
    body_ += "  <line class=\"reference\" data-value=\"" + std::to_string(value) + "\" x1=\"" +
             num(kLeft) + "\" x2=\"" + num(width_ - 16.0) + "\" y1=\"" + yy + "\" y2=\"" + yy +
             "\"/>\n";
  }

  std::string svg() const {
    const double height = kTop + kPlotHeight + kBottom;
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width_) +
                      "\" height=\"" + num(height) + "\" data-y-max=\"" + shortest(y_max_) +
                      "\">\n";
    out +=
        "  <style>.bar{fill:#4c72b0}.bar.original{fill:#c8c8c8}.reference{stroke:#c44e52;"
        "stroke-dasharray:4 3}.axis{stroke:#000}text{font:10px sans-serif}</style>\n";
    out += "  <text class=\"title\" x=\"" + num(kLeft) + "\" y=\"16\">" + title_ + "</text>\n";
    out += "  <text class=\"y-label\" x=\"12\" y=\"" + num(kTop + kPlotHeight / 2) +
           "\" transform=\"rotate(-90 12 " + num(kTop + kPlotHeight / 2) + ")\">" + y_label_ +
           "</text>\n";
    const std::string base = num(kTop + kPlotHeight);
    out += "  <line class=\"axis x-axis\" x1=\"" + num(kLeft) + "\" x2=\"" + num(width_ - 16.0) +
           "\" y1=\"" + base + "\" y2=\"" + base + "\"/>\n";
    out += "  <line class=\"axis y-axis\" x1=\"" + num(kLeft) + "\" x2=\"" + num(kLeft) +
           "\" y1=\"" + num(kTop) + "\" y2=\"" + base + "\"/>\n";
    for (int i = 0; i <= 4; ++i) {
      const double v = y_max_ * i / 4.0;
      out += "  <text class=\"tick\" x=\"" + num(kLeft - 4.0) + "\" y=\"" + num(y(v) + 3.0) +
             "\" text-anchor=\"end\">" + shortest(std::round(v * 100.0) / 100.0) + "</text>\n";
    }
    return out + body_ + "</svg>\n";
  }

 private:
  std::string title_;
  std::string y_label_;
  double y_max_;
  double width_;
  std::string body_;
};

std::string site_label(const ReportRow& row) {
  return std::to_string(row.rank) + "_" + std::string(name(row.function));
}

}  // namespace

Charts render_charts(const Report& report) {
  const auto& rows = report.rows;
  Charts charts;

  double max_calls = 0.0;
  double max_range = 0.0;
  for (const auto& row : rows) {
    max_calls = std::max(max_calls, static_cast<double>(row.calls));
    for (const auto& r : row.input_dynamic_range) {
      if (r) max_range = std::max(max_range, *r);
    }
  }

  BarChart counts("Calls per call-site", "calls", max_calls, rows.size());
  BarChart ranges("Input dynamic range", "log2 range", max_range, rows.size());
  BarChart precision("Output precision", "bits", 60.0, rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const auto label = site_label(row);
    counts.bar(i, 0, 1, static_cast<double>(row.calls), "calls", row.id,
               std::to_string(row.calls));
    counts.label(i, label);
    for (int k = 0; k < row.operands; ++k) {
      if (const auto& r = row.input_dynamic_range[k]) {
        ranges.bar(i, k, row.operands, *r, "in" + std::to_string(k), row.id, shortest(*r));
      }
    }
    ranges.label(i, label);
    precision.bar(i, 0, 2, row.p_original, "original", row.id, std::to_string(row.p_original));
    precision.bar(i, 1, 2, row.p_optimized, "optimized", row.id,
                  std::to_string(row.p_optimized));
    precision.label(i, label);
  }
  for (int line : kPrecisionReferenceLines) precision.reference_line(line);

  charts.counts = counts.svg();
  charts.dynamic_range = ranges.svg();
  charts.precision = precision.svg();
  return charts;
}

std::vector<SinCosPair> suggest_sincos(std::span<const CallSiteRecord> profile) {
  auto records = merge_duplicates(profile);
  sort_by_frequency(records);
  std::vector<SinCosPair> pairs;
  std::unordered_set<std::uint64_t> used;
  for (const auto& s : records) {
    if (s.function != MathFunction::sin || s.inputs[0].empty()) continue;
    for (const auto& c : records) {
      if (c.function != MathFunction::cos || used.contains(c.id)) continue;
      if (c.call_count != s.call_count || c.object != s.object) continue;
      if (!bit_equal(c.inputs[0], s.inputs[0])) continue;
      pairs.push_back({s.id, c.id});
      used.insert(c.id);
      break;
    }
  }
  return pairs;
}

}  // namespace vprec
