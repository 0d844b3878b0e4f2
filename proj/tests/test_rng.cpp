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

#include "darkfilter/experiments.hpp"
#include "darkfilter/rng.hpp"

using namespace darkfilter;

// Known-answer vectors published with the Random123 library.
TEST(Philox, KnownAnswerZero) {
    const auto out = Philox4x32::encrypt({0, 0, 0, 0}, {0, 0});
    EXPECT_EQ(out, (Philox4x32::Block{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(Philox, KnownAnswerOnes) {
    const auto out = Philox4x32::encrypt({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
    EXPECT_EQ(out, (Philox4x32::Block{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(Philox, KnownAnswerPi) {
    const auto out = Philox4x32::encrypt({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
    EXPECT_EQ(out, (Philox4x32::Block{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(Philox, StreamIsSeedDetermined) {
    Philox4x32 a(42), b(42), c(43);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u32();
        EXPECT_EQ(x, b.next_u32());
        differs = differs || x != c.next_u32();
    }
    EXPECT_TRUE(differs);
}

TEST(Philox, UniformsInUnitInterval) {
    Philox4x32 g(5);
    for (int i = 0; i < 10000; ++i) {
        const double u = g.next_uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
}

TEST(Philox, NormalMoments) {
    Philox4x32 g(11);
    const int n = 200000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = g.next_normal();
        s += x;
        s2 += x * x;
    }
    EXPECT_NEAR(s / n, 0.0, 0.01);
    EXPECT_NEAR(s2 / n, 1.0, 0.01);
}

TEST(RandomMatrix, OffDiagonalVarianceIsInverseDimension) {
    const int d = 256;
    const Eigen::MatrixXd h = goe_sample(d, 2024);
    EXPECT_LT((h - h.transpose()).cwiseAbs().maxCoeff(), 0.0 + 1e-300);
    double off = 0.0, diag = 0.0;
    for (int i = 0; i < d; ++i) {
        diag += h(i, i) * h(i, i);
        for (int j = i + 1; j < d; ++j) off += h(i, j) * h(i, j);
    }
    off /= d * (d - 1) / 2.0;
    diag /= d;
    EXPECT_NEAR(off * d, 1.0, 0.05);
    EXPECT_NEAR(diag * d, 2.0, 0.4);
}

TEST(RandomMatrix, SameSeedSameSample) {
    EXPECT_EQ(goe_sample(16, 9), goe_sample(16, 9));
    EXPECT_NE(goe_sample(16, 9), goe_sample(16, 10));
}

TEST(RandomMatrix, UnitVectorNormalised) {
    const CVector v = random_unit_vector(100, 3);
    EXPECT_NEAR(v.norm(), 1.0, 1e-14);
    EXPECT_EQ(v, random_unit_vector(100, 3));
}
