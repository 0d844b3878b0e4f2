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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "darkfilter/config.hpp"
#include "darkfilter/csv.hpp"

using namespace darkfilter;

namespace {

std::string error_of(const std::string& doc) {
    try {
        parse_config(doc);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Config, MinimalGhzSpecGetsDefaults) {
    const ExperimentSpec s = parse_config(R"({"L": 6, "target": "tar1"})");
    ASSERT_TRUE(s.h_tau.has_value());
    EXPECT_EQ(s.h_tau->p, 1);
    EXPECT_EQ(s.h_tau->q, 6);
    EXPECT_NEAR(s.h_tau_at(6), kPi / 6, 1e-15);
    EXPECT_EQ(s.chain.J, 1.0);
    EXPECT_EQ(s.chain.D, 0.1);
    EXPECT_EQ(s.epsilon, 0.01);
    EXPECT_EQ(s.theta0_rule, Theta0Rule::orthogonal);
    EXPECT_NEAR(s.theta0(6), kPi / 6, 1e-15);
}

TEST(Config, CatSpecDefaultsToOptimalAngle) {
    const ExperimentSpec s = parse_config(R"({"L": 14, "target": "tar2"})");
    EXPECT_EQ(s.h_tau->q, 13);
    EXPECT_EQ(s.theta0_rule, Theta0Rule::optimal);
}

TEST(Config, EmptyDocumentListsRequiredKeys) {
    const std::string e = error_of("{}");
    EXPECT_NE(e.find("L"), std::string::npos);
    EXPECT_NE(e.find("goe"), std::string::npos);
}

TEST(Config, UnknownKeyIsNamed) {
    EXPECT_NE(error_of(R"({"L": 6, "colour": 3})").find("colour"), std::string::npos);
}

TEST(Config, TowerEngineRejectsNextNeighbourCoupling) {
    EXPECT_NE(error_of(R"({"L": 6, "J2": 0.02, "engine": "tower"})").find("engine"), std::string::npos);
}

TEST(Config, IrrationalPeriodRejectedForTargets) {
    EXPECT_NE(error_of(R"({"L": 6, "target": "tar1", "h_tau_radians": 0.5})").find("h_tau_radians"), std::string::npos);
    EXPECT_EQ(error_of(R"({"L": 6, "h_tau_radians": 0.5})"), "");
}

TEST(Config, NoiseRequiresFullEngine) {
    EXPECT_NE(error_of(R"({"L": 6, "lambda": 0.01})").find("lambda"), std::string::npos);
}

TEST(Config, BadTypesNameTheKey) {
    EXPECT_NE(error_of(R"({"L": "six"})").find("L"), std::string::npos);
    EXPECT_NE(error_of(R"({"L": 6, "h_tau": [1]})").find("h_tau"), std::string::npos);
    EXPECT_NE(error_of(R"({"goe": {"dim": 8}})").find("seed"), std::string::npos);
    EXPECT_NE(error_of("[1, 2]"), "");
    EXPECT_NE(error_of("{not json"), "");
}

TEST(Config, RoundTrip) {
    for (const char* doc :
         {R"({"L": 6, "target": "tar1"})", R"({"L": 14, "target": "tar2", "theta0": 0.25, "n_steps": 3000, "J3": 0.1})",
          R"({"L": 8, "target": "tar2", "engine": "full", "J2": 0.02, "lambda": 0.01, "seed": 18446744073709551615})",
          R"({"L_range": [6, 12], "target": "tar1", "variant": "tar1-orthogonal"})",
          R"({"goe": {"dim": 32, "seed": 5}, "name": "g"})", R"({"L": 5, "h_tau_radians": 0.731, "degeneracy_tol": 1e-7})"}) {
        const ExperimentSpec s = parse_config(doc);
        const std::string text = serialize_config(s);
        EXPECT_EQ(parse_config(text), s) << doc;
        EXPECT_EQ(serialize_config(parse_config(text)), text);
    }
}

TEST(Csv, SeventeenSignificantDigits) {
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(format_double(1.0), "1");
    EXPECT_EQ(format_double(-2.5e-20), "-2.4999999999999999e-20");
    EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Csv, RendersHeaderAndRows) {
    CsvTable t{schema::charges, {}};
    t.add({0.5, 0.25});
    t.add({1.0, 0.75});
    EXPECT_EQ(render_csv(t), "angle_rad,weight\n0.5,0.25\n1,0.75\n");
    EXPECT_THROW(t.add({1.0}), std::invalid_argument);
}

TEST(Csv, SchemasMatchContract) {
    const auto join = [](const std::vector<std::string>& h) {
        std::string s;
        for (const auto& x : h) s += (s.empty() ? "" : ",") + x;
        return s;
    };
    EXPECT_EQ(join(schema::trajectory), "n,survival,q_n,string_re,string_im");
    EXPECT_EQ(join(schema::spectrum), "re,im,modulus,kind");
    EXPECT_EQ(join(schema::charges), "angle_rad,weight");
    EXPECT_EQ(join(schema::scaling), "L,n_eps_sim,n_eps_theory,variant");
}

TEST(Csv, WriteFailureIsReported) {
    CsvTable t{schema::charges, {}};
    EXPECT_THROW(write_csv("/nonexistent-dir/x.csv", t), std::runtime_error);
    const auto path = std::filesystem::temp_directory_path() / "darkfilter_csv_test.csv";
    write_csv(path, t);
    std::ifstream is(path, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    EXPECT_EQ(ss.str(), "angle_rad,weight\n");
    std::filesystem::remove(path);
}
