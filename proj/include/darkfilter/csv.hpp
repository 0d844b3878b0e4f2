// Copyright 2026 The darkfilter Authors
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

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace darkfilter {

using CsvCell = std::variant<std::int64_t, double, std::string>;

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<CsvCell>> rows;

    void add(std::vector<CsvCell> row);
};

namespace schema {
inline const std::vector<std::string> trajectory{"n", "survival", "q_n", "string_re", "string_im"};
inline const std::vector<std::string> spectrum{"re", "im", "modulus", "kind"};
inline const std::vector<std::string> charges{"angle_rad", "weight"};
inline const std::vector<std::string> scaling{"L", "n_eps_sim", "n_eps_theory", "variant"};
}  // namespace schema

/// Shortest round-trip-safe rendering with 17 significant digits.
std::string format_double(double value);

std::string render_csv(const CsvTable& table);

/// Writes `table` to `path`; IO failures are rethrown with the OS message.
void write_csv(const std::filesystem::path& path, const CsvTable& table);

/// Writes `text` verbatim (binary mode, so line endings stay '\n').
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace darkfilter
