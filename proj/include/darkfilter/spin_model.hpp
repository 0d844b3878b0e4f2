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

#include <optional>
#include <vector>

#include "darkfilter/basis.hpp"
#include "darkfilter/types.hpp"

namespace darkfilter {

/// Couplings of the open spin-1 XY chain
///   H = J sum (Sx Sx + Sy Sy)_{i,i+1} + h sum Sz + D sum Sz^2
///     + J2 sum (Sx Sx + Sy Sy)_{i,i+2} + J3 sum (Sx Sx + Sy Sy)_{i,i+3}.
struct ChainParams {
    int sites = 6;
    double J = 1.0;
    double h = 1.0;
    double D = 0.1;
    double J2 = 0.0;
    double J3 = 0.0;

    /// Throws ValidationError unless sites >= 2 and every coupling is finite.
    void validate() const;
    bool operator==(const ChainParams&) const = default;
};

/// Largest chain for which full-space operators are assembled.
inline constexpr int kDefaultFullSpaceCap = 10;

/// Dense square block of an operator restricted to one S^z sector.
struct SectorBlock {
    int magnetization = 0;
    std::vector<Index> states;  // full-space indices, ascending
    CMatrix matrix;
};

struct ManyBodyOperator {
    Basis basis;
    SparseOperator matrix;
    bool hermitian = false;
    std::vector<SectorBlock> blocks;  // filled by sz_sector_split

    Index dimension() const { return matrix.rows(); }
    bool is_blocked() const { return !blocks.empty(); }
    CVector apply(const CVector& v) const { return matrix * v; }
    /// max |A - A^dagger| over stored entries.
    double hermiticity_defect() const;
    CMatrix to_dense() const;
};

struct StateVector {
    Basis basis;
    CVector amplitudes;

    double norm() const { return amplitudes.norm(); }
    Index dimension() const { return amplitudes.size(); }
};

/// Bi-magnon tower |B_n> = N (Q^+)^n |Omega>, n = 0..L, on the full basis.
struct ScarTower {
    ChainParams params;
    std::vector<StateVector> states;
    std::vector<double> energies;  // E_n = (D - h) L + 2 n h
    ManyBodyOperator raising;      // Q^+

    int sites() const { return params.sites; }
    /// Columns are the tower states in the full basis.
    CMatrix as_matrix() const;
};

/// Tower energy E_n = (D - h) L + 2 n h.
double tower_energy(const ChainParams& p, int n);

ManyBodyOperator build_hamiltonian(const ChainParams& p, int full_space_cap = kDefaultFullSpaceCap);

/// Total S^z on the full basis (diagonal).
ManyBodyOperator total_sz(int sites);

/// max |[A, S^z_total]| over entries; zero iff A conserves magnetization.
double magnetization_commutator_defect(const ManyBodyOperator& op);

/// Q^+ = (1/2) sum_j e^{i pi j} (S_j^+)^2.
ManyBodyOperator bimagnon_raising(int sites, int full_space_cap = kDefaultFullSpaceCap);

ScarTower build_tower(const ChainParams& p, int full_space_cap = kDefaultFullSpaceCap);

/// || [H, Q^+] |Omega> - 2h Q^+ |Omega> ||.
double sga_residual(const ChainParams& p, int full_space_cap = kDefaultFullSpaceCap);

/// max_n || H |B_n> - E_n |B_n> ||.
double tower_residual(const ManyBodyOperator& hamiltonian, const ScarTower& tower);

/// || H |B_n> - <B_n|H|B_n> |B_n> || for one tower member (eigenstate test
/// without assuming the unperturbed energy).
double eigenstate_residual(const ManyBodyOperator& hamiltonian, const StateVector& state);

/// max |G - 1| for the Gram matrix of the tower states.
double tower_orthonormality_defect(const ScarTower& tower);

struct ProtocolStates {
    StateVector removal;  // (x)_j (|+> - e^{i pi j} |->) / sqrt 2
    StateVector initial;  // (x)_j (|+> + e^{i(j pi + theta0)} |->) / sqrt 2
};

ProtocolStates protocol_states(int sites, double theta0, int full_space_cap = kDefaultFullSpaceCap);

/// Removal-state coefficients on the tower, e^{i n pi} sqrt(C(L,n) / 2^L).
CVector removal_tower_coefficients(int sites);
/// Initial-state coefficients on the tower, e^{i (L - n) theta0} sqrt(C(L,n) / 2^L).
CVector initial_tower_coefficients(int sites, double theta0);

/// prod_i X_i with X = |+><-| + |-><+| + |0><0|, on the full basis.
ManyBodyOperator string_operator(int sites, int full_space_cap = kDefaultFullSpaceCap);

/// prod_i X_i restricted to the tower: X |B_n> = (-1)^{L(L+1)/2} |B_{L-n}>.
ManyBodyOperator tower_string_operator(int sites);

/// Splits an S^z-conserving operator into dense sector blocks keyed by M.
/// Throws ValidationError if the operator couples different sectors
/// (tolerance 1e-12).
ManyBodyOperator sz_sector_split(const ManyBodyOperator& op);

/// Maps tower-basis coefficients to a full-basis state via the tower states.
StateVector embed_tower_state(const ScarTower& tower, const CVector& coefficients);

double binomial(int n, int k);

}  // namespace darkfilter
