// Copyright 2026 The ifaa authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef IFAA_CSV_HPP
#define IFAA_CSV_HPP

#include <string>
#include <string_view>
#include <vector>

namespace ifaa {

// Shortest decimal string that parses back to the same double. All tabular
// output goes through this so reruns are byte-identical.
std::string format_double(double v);

// Locale-independent full-cell numeric parse (plain or scientific notation).
// `context` names the cell in error messages, e.g. "row 3, column 'taxonA'".
double parse_double_cell(std::string_view cell, const std::string& context);

long long parse_int_cell(std::string_view cell, const std::string& context);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // excludes header
};

// Plain comma-separated reader: no quoting, cells trimmed of surrounding
// whitespace, CR tolerated. Rejects ragged rows.
CsvTable read_csv(const std::string& path);

void write_text_file(const std::string& path, const std::string& contents);

}  // namespace ifaa

#endif  // IFAA_CSV_HPP
