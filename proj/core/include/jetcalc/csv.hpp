// Copyright 2026 The jetcalc Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace jetcalc::csv {

/// Shortest decimal form that parses back to the identical double.
std::string format(double value);

/// Parses a double written by format(); throws ParseError on junk.
double parse_double(std::string_view text);

long long parse_integer(std::string_view text);

/// Splits one CSV line on commas. No quoting: every field this project
/// writes is a number or an identifier.
std::vector<std::string_view> split(std::string_view line);

/// Writes comma-joined fields followed by '\n'.
void write_row(std::ostream& out, const std::vector<std::string>& fields);

/// Reads the next line that is neither empty nor a '#' comment.
bool next_data_line(std::istream& in, std::string& line);

}  // namespace jetcalc::csv
