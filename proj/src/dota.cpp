// Copyright 2026 The jiou Authors
// SPDX-License-Identifier: Apache-2.0

#include "jiou/dota.hpp"

#include <cctype>
#include <charconv>
#include <string>

namespace jiou {
namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

template <typename T>
bool parse_number(std::string_view token, T& out) {
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

bool is_dota_metadata(std::string_view line) {
  const auto tokens = split_ws(line);
  if (tokens.empty()) return true;
  return tokens.front().starts_with("imagesource") || tokens.front().starts_with("gsd");
}

DotaRecord parse_dota_record(std::string_view line, std::size_t line_number) {
  const auto tokens = split_ws(line);
  if (tokens.size() != 10) {
    throw ParseError(line_number,
                     "expected 10 fields (8 coordinates, category, difficulty), got " +
                         std::to_string(tokens.size()));
  }
  DotaRecord record;
  record.line = line_number;
  for (int i = 0; i < 8; ++i) {
    double value = 0.0;
    if (!parse_number(tokens[i], value)) {
      throw ParseError(line_number, "non-numeric coordinate '" + std::string(tokens[i]) + "'");
    }
    record.quad.corners(i % 2, i / 2) = value;
  }
  record.category = std::string(tokens[8]);
  if (!parse_number(tokens[9], record.difficulty)) {
    throw ParseError(line_number, "non-integer difficulty '" + std::string(tokens[9]) + "'");
  }
  return record;
}

DotaFile read_dota(std::istream& in) {
  DotaFile file;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_dota_metadata(line)) continue;
    try {
      file.records.push_back(parse_dota_record(line, line_number));
    } catch (const ParseError& e) {
      file.errors.push_back(e);
    }
  }
  return file;
}

}  // namespace jiou
