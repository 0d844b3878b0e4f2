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
#include <optional>
#include <string>
#include <vector>

#include "darkfilter/filtration.hpp"
#include "darkfilter/spectral.hpp"
#include "darkfilter/spin_model.hpp"

namespace darkfilter {

enum class TargetKind { none, tar1, tar2 };

const char* to_string(TargetKind t);

/// How theta0 is chosen; `fixed` uses ExperimentSpec::theta0_value.
enum class Theta0Rule { fixed, orthogonal, optimal, parity };

const char* to_string(Theta0Rule r);

/// h tau = pi * p / q.
struct HTau {
    long p = 1;
    long q = 1;

    double value() const { return kPi * static_cast<double>(p) / static_cast<double>(q); }
    bool operator==(const HTau&) const = default;
};

struct GoeSpec {
    int dim = 64;
    std::uint64_t seed = 0;

    bool operator==(const GoeSpec&) const = default;
};

struct ExperimentSpec {
    std::string name;
    ChainParams chain;
    TargetKind target = TargetKind::none;
    Theta0Rule theta0_rule = Theta0Rule::fixed;
    double theta0_value = 0.0;
    std::optional<HTau> h_tau;
    std::optional<double> h_tau_radians;  // non-resonant runs only
    long n_steps = 1000;
    double epsilon = 0.01;
    Engine engine = Engine::tower;
    double lambda = 0.0;
    std::optional<std::uint64_t> seed;
    std::optional<GoeSpec> goe;
    std::optional<std::pair<int, int>> L_range;
    std::optional<ScalingVariant> variant;
    int cap = kDefaultFullSpaceCap;
    double degeneracy_tol = kDefaultDegeneracyTol;

    /// theta0 for chain length `sites` under the configured rule.
    double theta0(int sites) const;
    /// h tau for chain length `sites` (explicit value, or the target's
    /// resonance default).
    double h_tau_at(int sites) const;
    /// Period tau = (h tau) / h.
    double tau_at(int sites) const;

    bool operator==(const ExperimentSpec&) const = default;
};

/// Parses and validates a JSON spec document, applying defaults. Throws
/// ValidationError naming the offending key.
ExperimentSpec parse_config(const std::string& document);

/// Canonical JSON text; parse_config(serialize_config(s)) == s.
std::string serialize_config(const ExperimentSpec& spec);

/// Re-runs every cross-field check (used after CLI overrides).
void validate_spec(const ExperimentSpec& spec);

}  // namespace darkfilter
