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

#include <unsupported/Eigen/KroneckerProduct>

#include "darkfilter/spin_model.hpp"

using namespace darkfilter;

namespace {

// Single-site matrices in the (+, 0, -) ordering.
CMatrix spin_plus() {
    CMatrix s = CMatrix::Zero(3, 3);
    s(0, 1) = std::sqrt(2.0);
    s(1, 2) = std::sqrt(2.0);
    return s;
}

CMatrix spin_z() {
    CMatrix s = CMatrix::Zero(3, 3);
    s(0, 0) = 1.0;
    s(2, 2) = -1.0;
    return s;
}

// Site 1 is the least significant digit, so it sits rightmost in the product.
CMatrix on_sites(int sites, const std::vector<std::pair<int, CMatrix>>& ops) {
    CMatrix out = CMatrix::Identity(1, 1);
    for (int site = sites; site >= 1; --site) {
        CMatrix factor = CMatrix::Identity(3, 3);
        for (const auto& [s, m] : ops) {
            if (s == site) factor = m;
        }
        CMatrix next = Eigen::kroneckerProduct(out, factor);
        out = next;
    }
    return out;
}

CMatrix kron_hamiltonian(const ChainParams& p) {
    const Index dim = pow3(p.sites);
    const CMatrix sp = spin_plus();
    const CMatrix sm = sp.adjoint();
    const CMatrix sz = spin_z();
    CMatrix h = CMatrix::Zero(dim, dim);
    const std::array<double, 3> couplings{p.J, p.J2, p.J3};
    for (int range = 1; range <= 3; ++range) {
        for (int i = 1; i + range <= p.sites; ++i) {
            const int k = i + range;
            h += 0.5 * couplings[range - 1] * (on_sites(p.sites, {{i, sp}, {k, sm}}) + on_sites(p.sites, {{i, sm}, {k, sp}}));
        }
    }
    for (int i = 1; i <= p.sites; ++i) {
        h += p.h * on_sites(p.sites, {{i, sz}}) + p.D * on_sites(p.sites, {{i, sz * sz}});
    }
    return h;
}

}  // namespace

TEST(SpinModel, AssembledHamiltonianMatchesKroneckerConstruction) {
    for (int L : {2, 3, 4, 5}) {
        ChainParams p;
        p.sites = L;
        p.J = 0.7;
        p.h = 1.3;
        p.D = -0.4;
        p.J2 = 0.11;
        p.J3 = 0.23;
        const CMatrix expected = kron_hamiltonian(p);
        const CMatrix got = build_hamiltonian(p).to_dense();
        EXPECT_LT((got - expected).cwiseAbs().maxCoeff(), 1e-13) << "L=" << L;
    }
}

TEST(SpinModel, AllCouplingsOffGivesZeroOperator) {
    ChainParams p;
    p.sites = 4;
    p.J = p.h = p.D = 0.0;
    EXPECT_EQ(build_hamiltonian(p).to_dense().cwiseAbs().maxCoeff(), 0.0);
}

TEST(SpinModel, ConservesMagnetizationWithLongRangeTerms) {
    ChainParams p;
    p.sites = 6;
    p.J2 = 0.05;
    p.J3 = 0.1;
    EXPECT_LT(magnetization_commutator_defect(build_hamiltonian(p)), 1e-12);
}

TEST(SpinModel, TwoSiteTowerStateByHand) {
    ChainParams p;
    p.sites = 2;
    const ScarTower tower = build_tower(p);
    CVector expected = CVector::Zero(9);
    expected(encode_configuration({-1, +1})) = 1.0 / std::sqrt(2.0);
    expected(encode_configuration({+1, -1})) = -1.0 / std::sqrt(2.0);
    EXPECT_NEAR(std::abs(expected.dot(tower.states[1].amplitudes)), 1.0, 1e-14);
    EXPECT_NEAR(tower.energies[1], 0.2, 1e-14);
    EXPECT_NEAR(tower_energy(p, 0), -1.8, 1e-14);
}

TEST(SpinModel, TowerIsExactWithThirdNeighbourCoupling) {
    for (int L = 4; L <= 8; ++L) {
        ChainParams p;
        p.sites = L;
        p.J3 = 0.1;
        EXPECT_LT(sga_residual(p), 1e-10) << "L=" << L;
        const ScarTower tower = build_tower(p);
        EXPECT_LT(tower_residual(build_hamiltonian(p), tower), 1e-10) << "L=" << L;
        EXPECT_LT(tower_orthonormality_defect(tower), 1e-12) << "L=" << L;
    }
}

TEST(SpinModel, NextNeighbourCouplingBreaksAlgebraButKeepsEdges) {
    ChainParams p;
    p.sites = 6;
    p.J2 = 0.02;
    EXPECT_GT(sga_residual(p), 1e-4);
    const ManyBodyOperator h = build_hamiltonian(p);
    ChainParams clean = p;
    clean.J2 = 0.0;
    const ScarTower tower = build_tower(clean);
    EXPECT_LT(eigenstate_residual(h, tower.states.front()), 1e-10);
    EXPECT_LT(eigenstate_residual(h, tower.states.back()), 1e-10);
    EXPECT_GT(eigenstate_residual(h, tower.states[3]), 1e-4);
}

TEST(SpinModel, TowerStatesAvoidZeroAndCountRaisedSites) {
    ChainParams p;
    p.sites = 5;
    const ScarTower tower = build_tower(p);
    for (int n = 0; n <= p.sites; ++n) {
        const CVector& v = tower.states[n].amplitudes;
        for (Index s = 0; s < v.size(); ++s) {
            if (std::abs(v(s)) < 1e-14) continue;
            const auto m = decode_configuration(s, p.sites);
            EXPECT_EQ(std::count(m.begin(), m.end(), 0), 0);
            EXPECT_EQ(std::count(m.begin(), m.end(), 1), n);
        }
    }
}

TEST(SpinModel, ProtocolStatesProjectOntoTowerCoefficients) {
    const int L = 6;
    ChainParams p;
    p.sites = L;
    const ScarTower tower = build_tower(p);
    const double theta0 = 0.37;
    const ProtocolStates ps = protocol_states(L, theta0);
    const CVector r = removal_tower_coefficients(L);
    const CVector i = initial_tower_coefficients(L, theta0);
    CVector pr(L + 1), pi(L + 1);
    for (int n = 0; n <= L; ++n) {
        EXPECT_NEAR(std::abs(r(n)), std::sqrt(binomial(L, n) / std::pow(2.0, L)), 1e-14);
        pr(n) = tower.states[n].amplitudes.dot(ps.removal.amplitudes);
        pi(n) = tower.states[n].amplitudes.dot(ps.initial.amplitudes);
    }
    // Equal up to one global phase each; both states lie inside the tower.
    EXPECT_NEAR(std::abs(r.dot(pr)), 1.0, 1e-13);
    EXPECT_NEAR(std::abs(i.dot(pi)), 1.0, 1e-13);
    EXPECT_NEAR(pr.norm(), 1.0, 1e-13);
    EXPECT_NEAR(ps.removal.norm(), 1.0, 1e-12);
    EXPECT_NEAR(ps.initial.norm(), 1.0, 1e-12);
}

TEST(SpinModel, StringOperatorIsProductOfSiteFlips) {
    const int L = 3;
    CMatrix x = CMatrix::Zero(3, 3);
    x(0, 2) = x(2, 0) = x(1, 1) = 1.0;
    const CMatrix expected = on_sites(L, {{1, x}, {2, x}, {3, x}});
    const CMatrix got = string_operator(L).to_dense();
    EXPECT_LT((got - expected).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LT((got * got - CMatrix::Identity(27, 27)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(SpinModel, TowerStringOperatorMatchesFullSpace) {
    const int L = 5;
    ChainParams p;
    p.sites = L;
    const CMatrix b = build_tower(p).as_matrix();
    const CMatrix projected = b.adjoint() * string_operator(L).to_dense() * b;
    EXPECT_LT((projected - tower_string_operator(L).to_dense()).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_NEAR(std::abs(projected(0, 0)), 0.0, 1e-15);
}

TEST(SpinModel, SectorSplitCoversOperator) {
    ChainParams p;
    p.sites = 4;
    p.J3 = 0.1;
    const ManyBodyOperator h = sz_sector_split(build_hamiltonian(p));
    Index covered = 0;
    for (const auto& b : h.blocks) covered += static_cast<Index>(b.states.size());
    EXPECT_EQ(covered, pow3(4));
    EXPECT_EQ(h.blocks.size(), 9u);
}

TEST(SpinModel, RejectsOversizedFullSpace) {
    ChainParams p;
    p.sites = 11;
    EXPECT_THROW(build_hamiltonian(p, 10), ValidationError);
}
