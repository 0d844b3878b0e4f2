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

#include <array>
#include <cstdint>

namespace darkfilter {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123).
///
/// The stream is a pure function of (seed, counter), which makes every
/// sampled quantity reproducible across platforms and thread layouts.
/// Normal deviates use an explicit Box-Muller transform rather than
/// std::normal_distribution, whose output is implementation-defined.
class Philox4x32 {
   public:
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr const char* kName = "philox4x32-10";

    explicit Philox4x32(std::uint64_t seed);

    /// One application of the bijection; exposed for known-answer tests.
    static Block encrypt(Block counter, Key key);

    std::uint32_t next_u32();
    /// Uniform in (0, 1], 53-bit resolution.
    double next_uniform();
    double next_normal();

    std::uint64_t seed() const { return seed_; }

   private:
    void refill();

    std::uint64_t seed_;
    Key key_;
    Block counter_{};
    Block buffer_{};
    int used_ = 4;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace darkfilter
