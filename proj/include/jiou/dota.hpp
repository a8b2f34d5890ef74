// Copyright 2026 The jiou Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "jiou/errors.hpp"
#include "jiou/obb.hpp"

namespace jiou {

/// One object line of a DOTA annotation file:
/// "x1 y1 x2 y2 x3 y3 x4 y4 category difficulty".
struct DotaRecord {
  CornerQuadd quad;
  std::string category;
  int difficulty = 0;
  std::size_t line = 0;
};

/// Parses a single object line. Throws ParseError naming `line_number`.
DotaRecord parse_dota_record(std::string_view line, std::size_t line_number = 1);

/// True for lines that carry no object ("imagesource:...", "gsd:...", blank).
bool is_dota_metadata(std::string_view line);

struct DotaFile {
  std::vector<DotaRecord> records;
  std::vector<ParseError> errors;
};

/// Reads a whole annotation stream. Malformed lines are collected in
/// `errors` and skipped; metadata lines are ignored.
DotaFile read_dota(std::istream& in);

}  // namespace jiou
