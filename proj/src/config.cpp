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

#include "darkfilter/config.hpp"

#include <array>
#include <cmath>
#include <nlohmann/json.hpp>

namespace darkfilter {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr std::array kAllowedKeys{"name",    "L",       "J",      "h",     "D",       "J2",      "J3",
                                  "target",  "theta0",  "h_tau",  "h_tau_radians", "n_steps", "epsilon",
                                  "engine",  "lambda",  "seed",   "goe",   "L_range", "variant", "cap",
                                  "degeneracy_tol"};

std::string allowed_list() {
    std::string s;
    for (const char* k : kAllowedKeys) s += (s.empty() ? "" : ", ") + std::string(k);
    return s;
}

[[noreturn]] void bad(const std::string& key, const std::string& what) {
    throw ValidationError("config key '" + key + "': " + what);
}

double get_number(const json& doc, const std::string& key) {
    const json& v = doc.at(key);
    if (!v.is_number()) bad(key, "must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) bad(key, "must be finite");
    return d;
}

long long get_integer(const json& doc, const std::string& key) {
    const json& v = doc.at(key);
    if (!v.is_number_integer()) bad(key, "must be an integer");
    return v.get<long long>();
}

std::uint64_t get_seed(const json& v, const std::string& key) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
        bad(key, "must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

std::string get_string(const json& doc, const std::string& key) {
    const json& v = doc.at(key);
    if (!v.is_string()) bad(key, "must be a string");
    return v.get<std::string>();
}

std::pair<long long, long long> get_pair(const json& doc, const std::string& key) {
    const json& v = doc.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer()) {
        bad(key, "must be a two-element integer array");
    }
    return {v[0].get<long long>(), v[1].get<long long>()};
}

}  // namespace

const char* to_string(TargetKind t) {
    switch (t) {
        case TargetKind::none: return "none";
        case TargetKind::tar1: return "tar1";
        case TargetKind::tar2: return "tar2";
    }
    return "?";
}

const char* to_string(Theta0Rule r) {
    switch (r) {
        case Theta0Rule::fixed: return "fixed";
        case Theta0Rule::orthogonal: return "orthogonal";
        case Theta0Rule::optimal: return "optimal";
        case Theta0Rule::parity: return "parity";
    }
    return "?";
}

double ExperimentSpec::theta0(int sites) const {
    switch (theta0_rule) {
        case Theta0Rule::fixed: return theta0_value;
        case Theta0Rule::orthogonal: return tar1_orthogonal_angle(sites);
        case Theta0Rule::optimal: return tar2_optimal_angle(sites);
        case Theta0Rule::parity: return kTwoPi / (sites + 1);
    }
    return 0.0;
}

double ExperimentSpec::h_tau_at(int sites) const {
    if (h_tau_radians) return *h_tau_radians;
    if (h_tau) return h_tau->value();
    switch (target) {
        case TargetKind::tar1: return kPi / sites;
        case TargetKind::tar2: return kPi / (sites - 1);
        case TargetKind::none: break;
    }
    throw ValidationError("config key 'h_tau': required when no target is set");
}

double ExperimentSpec::tau_at(int sites) const {
    if (chain.h == 0.0) throw ValidationError("config key 'h': must be nonzero to convert h*tau into a period");
    return h_tau_at(sites) / chain.h;
}

void validate_spec(const ExperimentSpec& s) {
    s.chain.validate();
    if (s.n_steps < 0) bad("n_steps", "must be non-negative");
    if (!(s.epsilon > 0.0 && s.epsilon <= 1.0)) bad("epsilon", "must lie in (0, 1]");
    if (s.lambda < 0.0 || !std::isfinite(s.lambda)) bad("lambda", "must be a non-negative number");
    if (!(s.degeneracy_tol > 0.0)) bad("degeneracy_tol", "must be positive");
    if (s.cap < 2 || s.cap > 12) bad("cap", "must lie in [2, 12]");
    if (s.engine == Engine::tower && s.chain.J2 != 0.0) {
        bad("engine", "the tower engine requires J2 = 0; use engine \"full\"");
    }
    if (s.engine == Engine::full && s.chain.sites > s.cap) {
        bad("L", "full engine limited to L <= cap (" + std::to_string(s.cap) + ")");
    }
    if (s.lambda > 0.0 && s.engine == Engine::tower) {
        bad("lambda", "removal noise lives in the full Hilbert space; use engine \"full\"");
    }
    if (s.h_tau && (s.h_tau->p <= 0 || s.h_tau->q <= 0)) bad("h_tau", "p and q must be positive");
    if (s.h_tau && s.h_tau_radians) bad("h_tau_radians", "conflicts with h_tau");
    if (s.h_tau_radians && s.target != TargetKind::none) {
        bad("h_tau_radians", "a target needs exact resonance; give h_tau as a rational [p, q] multiple of pi");
    }
    if (s.target == TargetKind::tar2 && s.chain.sites < 3 && !s.L_range) bad("L", "tar2 needs L >= 3");
    if (s.L_range) {
        const auto [lo, hi] = *s.L_range;
        if (lo < 2 || hi < lo) bad("L_range", "must satisfy 2 <= lo <= hi");
        if (hi > 30) bad("L_range", "upper end limited to 30");
        if (s.target == TargetKind::tar2 && lo < 3) bad("L_range", "tar2 needs L >= 3");
    }
    if (s.goe && s.goe->dim < 4) bad("goe", "dim must be at least 4");
}

ExperimentSpec parse_config(const std::string& document) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ValidationError("config must be a JSON object");
    if (doc.empty() || (!doc.contains("L") && !doc.contains("L_range") && !doc.contains("goe"))) {
        throw ValidationError("config is missing required keys: give 'L' (or 'L_range' for sweeps, 'goe' for the "
                              "random-matrix demo)");
    }
    for (const auto& [key, value] : doc.items()) {
        bool known = false;
        for (const char* k : kAllowedKeys) known = known || key == k;
        if (!known) throw ValidationError("unknown config key '" + key + "' (allowed: " + allowed_list() + ")");
    }

    ExperimentSpec s;
    if (doc.contains("name")) s.name = get_string(doc, "name");
    if (doc.contains("L_range")) {
        const auto [lo, hi] = get_pair(doc, "L_range");
        s.L_range = std::pair<int, int>(static_cast<int>(lo), static_cast<int>(hi));
        s.chain.sites = static_cast<int>(lo);
    }
    if (doc.contains("L")) {
        const long long L = get_integer(doc, "L");
        if (L < 2 || L > 30) bad("L", "must lie in [2, 30]");
        s.chain.sites = static_cast<int>(L);
    }
    if (doc.contains("J")) s.chain.J = get_number(doc, "J");
    if (doc.contains("h")) s.chain.h = get_number(doc, "h");
    if (doc.contains("D")) s.chain.D = get_number(doc, "D");
    if (doc.contains("J2")) s.chain.J2 = get_number(doc, "J2");
    if (doc.contains("J3")) s.chain.J3 = get_number(doc, "J3");
    if (doc.contains("target")) {
        const std::string t = get_string(doc, "target");
        if (t == "tar1") s.target = TargetKind::tar1;
        else if (t == "tar2") s.target = TargetKind::tar2;
        else if (t == "none") s.target = TargetKind::none;
        else bad("target", "must be \"tar1\", \"tar2\" or \"none\"");
    }
    s.theta0_rule = s.target == TargetKind::tar1   ? Theta0Rule::orthogonal
                    : s.target == TargetKind::tar2 ? Theta0Rule::optimal
                                                   : Theta0Rule::fixed;
    if (doc.contains("theta0")) {
        const json& v = doc.at("theta0");
        if (v.is_number()) {
            s.theta0_rule = Theta0Rule::fixed;
            s.theta0_value = get_number(doc, "theta0");
        } else if (v.is_string()) {
            const std::string r = v.get<std::string>();
            if (r == "orthogonal") s.theta0_rule = Theta0Rule::orthogonal;
            else if (r == "optimal") s.theta0_rule = Theta0Rule::optimal;
            else if (r == "parity") s.theta0_rule = Theta0Rule::parity;
            else bad("theta0", "must be a number or one of \"orthogonal\", \"optimal\", \"parity\"");
        } else {
            bad("theta0", "must be a number or a rule name");
        }
    }
    if (doc.contains("h_tau")) {
        const auto [p, q] = get_pair(doc, "h_tau");
        s.h_tau = HTau{static_cast<long>(p), static_cast<long>(q)};
    }
    if (doc.contains("h_tau_radians")) s.h_tau_radians = get_number(doc, "h_tau_radians");
    if (doc.contains("n_steps")) s.n_steps = static_cast<long>(get_integer(doc, "n_steps"));
    if (doc.contains("epsilon")) s.epsilon = get_number(doc, "epsilon");
    if (doc.contains("engine")) {
        const std::string e = get_string(doc, "engine");
        if (e == "full") s.engine = Engine::full;
        else if (e == "tower") s.engine = Engine::tower;
        else bad("engine", "must be \"full\" or \"tower\"");
    }
    if (doc.contains("lambda")) s.lambda = get_number(doc, "lambda");
    if (doc.contains("seed")) s.seed = get_seed(doc.at("seed"), "seed");
    if (doc.contains("goe")) {
        const json& g = doc.at("goe");
        if (!g.is_object()) bad("goe", "must be an object with 'dim' and 'seed'");
        for (const auto& [key, value] : g.items()) {
            if (key != "dim" && key != "seed") bad("goe", "unknown key '" + key + "' (allowed: dim, seed)");
        }
        if (!g.contains("seed")) bad("goe", "'seed' is required for the random-matrix sample");
        GoeSpec goe;
        if (g.contains("dim")) {
            if (!g.at("dim").is_number_integer()) bad("goe", "'dim' must be an integer");
            goe.dim = g.at("dim").get<int>();
        }
        goe.seed = get_seed(g.at("seed"), "goe.seed");
        s.goe = goe;
    }
    if (doc.contains("variant")) {
        try {
            s.variant = scaling_variant_from_string(get_string(doc, "variant"));
        } catch (const ValidationError& e) {
            bad("variant", e.what());
        }
    }
    if (doc.contains("cap")) s.cap = static_cast<int>(get_integer(doc, "cap"));
    if (doc.contains("degeneracy_tol")) s.degeneracy_tol = get_number(doc, "degeneracy_tol");

    if (!s.h_tau && !s.h_tau_radians && !s.L_range) {
        if (s.target == TargetKind::tar1) s.h_tau = HTau{1, s.chain.sites};
        if (s.target == TargetKind::tar2) s.h_tau = HTau{1, s.chain.sites - 1};
    }
    validate_spec(s);
    return s;
}

std::string serialize_config(const ExperimentSpec& s) {
    ordered_json j;
    if (!s.name.empty()) j["name"] = s.name;
    j["L"] = s.chain.sites;
    j["J"] = s.chain.J;
    j["h"] = s.chain.h;
    j["D"] = s.chain.D;
    j["J2"] = s.chain.J2;
    j["J3"] = s.chain.J3;
    j["target"] = to_string(s.target);
    if (s.theta0_rule == Theta0Rule::fixed) {
        j["theta0"] = s.theta0_value;
    } else {
        j["theta0"] = to_string(s.theta0_rule);
    }
    if (s.h_tau) j["h_tau"] = {s.h_tau->p, s.h_tau->q};
    if (s.h_tau_radians) j["h_tau_radians"] = *s.h_tau_radians;
    j["n_steps"] = s.n_steps;
    j["epsilon"] = s.epsilon;
    j["engine"] = to_string(s.engine);
    j["lambda"] = s.lambda;
    if (s.seed) j["seed"] = *s.seed;
    if (s.goe) j["goe"] = {{"dim", s.goe->dim}, {"seed", s.goe->seed}};
    if (s.L_range) j["L_range"] = {s.L_range->first, s.L_range->second};
    if (s.variant) j["variant"] = to_string(*s.variant);
    j["cap"] = s.cap;
    j["degeneracy_tol"] = s.degeneracy_tol;
    return j.dump(2) + "\n";
}

}  // namespace darkfilter
