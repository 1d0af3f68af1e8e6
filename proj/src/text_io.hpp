// Copyright 2026 The zipfls Authors.
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

// Small text helpers shared by the CSV and JSON writers.

#ifndef ZIPFLS_SRC_TEXT_IO_HPP_
#define ZIPFLS_SRC_TEXT_IO_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace zipfls::detail {

// Shortest form that round-trips is not required; 17 significant digits is.
std::string format_double(double x);

// "-" writes to stdout.
void write_text(const std::string& path, std::string_view content);
std::string read_text(const std::string& path);

std::vector<std::string> split_lines(std::string_view text);
std::vector<std::string_view> split_fields(std::string_view line);
// Throws IoError with `context` on malformed numbers.
double parse_double(std::string_view field, const std::string& context);
bool looks_numeric(std::string_view field);

}  // namespace zipfls::detail

#endif  // ZIPFLS_SRC_TEXT_IO_HPP_
