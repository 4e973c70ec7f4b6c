// SPDX-License-Identifier: Apache-2.0
//
// Small parsing helpers shared by the INI-backed loaders.

#pragma once

#include <algorithm>
#include <charconv>
#include <string>
#include <string_view>
#include <vector>

#include "soilrange/error.hpp"

namespace soilrange::detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

/// "section/key" -> "section.key" for error messages.
inline std::string dotted(std::string key) {
  std::replace(key.begin(), key.end(), '/', '.');
  return key;
}

inline double parse_double(std::string_view text, const std::string& field) {
  text = trim(text);
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw Error(ErrorCode::InvalidValue, "expected a number, got '" + std::string(text) + "'",
                field);
  }
  return value;
}

inline int parse_int(std::string_view text, const std::string& field) {
  text = trim(text);
  int value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw Error(ErrorCode::InvalidValue, "expected an integer, got '" + std::string(text) + "'",
                field);
  }
  return value;
}

inline bool parse_bool(std::string_view text, const std::string& field) {
  text = trim(text);
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw Error(ErrorCode::InvalidValue, "expected a boolean, got '" + std::string(text) + "'", field);
}

/// Splits on any of `separators`, dropping empty tokens.
inline std::vector<std::string_view> split(std::string_view text, std::string_view separators) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto next = text.find_first_of(separators, pos);
    const auto token = trim(text.substr(pos, next == std::string_view::npos ? next : next - pos));
    if (!token.empty()) out.push_back(token);
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

/// Whitespace- or comma-separated numbers.
inline std::vector<double> parse_list(std::string_view text, const std::string& field) {
  std::vector<double> values;
  for (auto token : split(text, " \t,")) values.push_back(parse_double(token, field));
  return values;
}

}  // namespace soilrange::detail
