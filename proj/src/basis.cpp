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

#include "darkfilter/basis.hpp"

#include <algorithm>
#include <cstdlib>

namespace darkfilter {

const char* to_string(BasisKind kind) {
    switch (kind) {
        case BasisKind::full:
            return "full";
        case BasisKind::sector:
            return "sector";
        case BasisKind::tower:
            return "tower";
        case BasisKind::computational:
            return "computational";
    }
    return "?";
}

Basis Basis::full(int sites) { return Basis{BasisKind::full, sites, 0}; }

Basis Basis::sector(int sites, int magnetization) {
    if (std::abs(magnetization) > sites) {
        throw ValidationError("sector magnetization out of range");
    }
    return Basis{BasisKind::sector, sites, magnetization};
}

Basis Basis::tower(int sites) { return Basis{BasisKind::tower, sites, 0}; }

Basis Basis::computational(Index dim) {
    if (dim < 1) throw ValidationError("basis dimension must be positive");
    return Basis{BasisKind::computational, 0, 0, dim};
}

Index Basis::dimension() const {
    switch (kind) {
        case BasisKind::full:
            return pow3(sites);
        case BasisKind::sector:
            return sector_dimension(sites, magnetization);
        case BasisKind::tower:
            return sites + 1;
        case BasisKind::computational:
            return size;
    }
    return 0;
}

Index pow3(int sites) {
    if (sites < 0 || sites > 39) throw ValidationError("site count out of range for base-3 encoding");
    Index p = 1;
    for (int i = 0; i < sites; ++i) p *= 3;
    return p;
}

int site_digit(Index state, int site) {
    for (int i = 1; i < site; ++i) state /= 3;
    return static_cast<int>(state % 3);
}

int total_magnetization(Index state, int sites) {
    int m = 0;
    for (int j = 0; j < sites; ++j) {
        m += digit_to_m(static_cast<int>(state % 3));
        state /= 3;
    }
    return m;
}

std::vector<Index> sector_states(int sites, int magnetization) {
    std::vector<Index> out;
    const Index dim = pow3(sites);
    for (Index s = 0; s < dim; ++s) {
        if (total_magnetization(s, sites) == magnetization) out.push_back(s);
    }
    return out;
}

Index sector_dimension(int sites, int magnetization) {
    if (std::abs(magnetization) > sites) return 0;
    // Trinomial coefficient via the recursion over sites.
    std::vector<Index> counts(2 * sites + 1, 0);
    counts[sites] = 1;
    for (int j = 0; j < sites; ++j) {
        std::vector<Index> next(counts.size(), 0);
        for (std::size_t k = 0; k < counts.size(); ++k) {
            if (counts[k] == 0) continue;
            for (int dm = -1; dm <= 1; ++dm) {
                const auto t = static_cast<std::ptrdiff_t>(k) + dm;
                if (t >= 0 && t < static_cast<std::ptrdiff_t>(next.size())) next[t] += counts[k];
            }
        }
        counts = std::move(next);
    }
    return counts[magnetization + sites];
}

Index encode_configuration(const std::vector<int>& m_values) {
    Index idx = 0;
    Index weight = 1;
    for (int m : m_values) {
        if (m < -1 || m > 1) throw ValidationError("spin-1 m value must be -1, 0 or +1");
        idx += weight * m_to_digit(m);
        weight *= 3;
    }
    return idx;
}

std::vector<int> decode_configuration(Index state, int sites) {
    std::vector<int> m(sites);
    for (int j = 0; j < sites; ++j) {
        m[j] = digit_to_m(static_cast<int>(state % 3));
        state /= 3;
    }
    return m;
}

}  // namespace darkfilter
