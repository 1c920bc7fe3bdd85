#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vprec/profile.hpp"

namespace vprec::detail {

using Field = std::pair<std::string_view, std::string_view>;

/// Splits a record line into space-separated key=value fields. Tokens after
/// `skip_words` leading bare words must contain '='.
inline std::vector<Field> split_fields(std::string_view line, std::size_t line_no,
                                       std::size_t skip_words = 0) {
  std::vector<Field> fields;
  std::size_t pos = 0;
  std::size_t index = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    if (pos >= line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
    const std::string_view token = line.substr(pos, end - pos);
    pos = end;
    if (index++ < skip_words) {
      fields.emplace_back(token, std::string_view{});
      continue;
    }
    const auto eq = token.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw ParseError(line_no, "expected key=value, got '" + std::string(token) + "'");
    }
    for (std::size_t i = skip_words; i < fields.size(); ++i) {
      if (fields[i].first == token.substr(0, eq)) {
        throw ParseError(line_no, "duplicate key '" + std::string(token.substr(0, eq)) + "'");
      }
    }
    fields.emplace_back(token.substr(0, eq), token.substr(eq + 1));
  }
  return fields;
}

inline std::string_view trim_line(std::string_view line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
    line.remove_suffix(1);
  }
  return line;
}

}  // namespace vprec::detail
