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

#include <vector>

#include "darkfilter/types.hpp"

namespace darkfilter {

// Local spin-1 states are encoded as base-3 digits: m = +1 -> 0, m = 0 -> 1,
// m = -1 -> 2. Site j (1-based) carries weight 3^(j-1), so site 1 is the
// least significant digit.
inline constexpr int kDigitPlus = 0;
inline constexpr int kDigitZero = 1;
inline constexpr int kDigitMinus = 2;

inline constexpr int digit_to_m(int digit) { return 1 - digit; }
inline constexpr int m_to_digit(int m) { return 1 - m; }

/// `computational` is a plain basis |1>..|dim> with no spin structure (used
/// for random-matrix generators).
enum class BasisKind { full, sector, tower, computational };

const char* to_string(BasisKind kind);

/// Describes which coordinate system a vector or operator lives in.
struct Basis {
    BasisKind kind = BasisKind::full;
    int sites = 0;
    int magnetization = 0;  // sector kind only
    Index size = 0;         // computational kind only

    static Basis full(int sites);
    static Basis sector(int sites, int magnetization);
    static Basis tower(int sites);
    static Basis computational(Index dim);

    Index dimension() const;
    bool operator==(const Basis&) const = default;
};

Index pow3(int sites);

/// Digit (0, 1, 2) of `state` at 1-based `site`.
int site_digit(Index state, int site);

int total_magnetization(Index state, int sites);

/// Full-space indices of every configuration with total S^z = M, ascending.
std::vector<Index> sector_states(int sites, int magnetization);

/// Number of configurations of `sites` spin-1 sites with total S^z = M.
Index sector_dimension(int sites, int magnetization);

/// Full-space index of a configuration given per-site m values (site 1 first).
Index encode_configuration(const std::vector<int>& m_values);

/// Per-site m values (site 1 first) of a full-space index.
std::vector<int> decode_configuration(Index state, int sites);

}  // namespace darkfilter
