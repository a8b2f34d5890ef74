// Copyright 2026 The jiou Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <initializer_list>
#include <ostream>
#include <string>

namespace jiou {

/// Fixed 9-significant-digit rendering used by every CSV and report.
std::string format_real(double value);

/// Writes the values joined by commas followed by a newline.
void write_csv_row(std::ostream& out, std::initializer_list<std::string> fields);

}  // namespace jiou
