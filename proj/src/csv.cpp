// Copyright 2026 The jiou Authors
// SPDX-License-Identifier: Apache-2.0

#include "jiou/csv.hpp"

#include <cstdio>

namespace jiou {

std::string format_real(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.9g", value);
  return buffer;
}

void write_csv_row(std::ostream& out, std::initializer_list<std::string> fields) {
  bool first = true;
  for (const std::string& field : fields) {
    if (!first) out << ',';
    out << field;
    first = false;
  }
  out << '\n';
}

}  // namespace jiou
