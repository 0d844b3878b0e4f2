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

#include "darkfilter/spin_model.hpp"

#include <cmath>
#include <map>
#include <string>

namespace darkfilter {
namespace {

using Triplet = Eigen::Triplet<cplx, std::int64_t>;

void check_cap(int sites, int cap) {
    if (sites < 1) throw ValidationError("site count must be positive");
    if (sites > cap) {
        throw ValidationError("L=" + std::to_string(sites) + " exceeds the full-space cap of " +
                              std::to_string(cap));
    }
}

SparseOperator from_triplets(Index dim, const std::vector<Triplet>& triplets) {
    SparseOperator m(dim, dim);
    m.setFromTriplets(triplets.begin(), triplets.end());
    m.makeCompressed();
    return m;
}

// Adds the XY exchange (S_i^+ S_k^- + S_i^- S_k^+)/2 for bonds of range `range`.
// For spin-1 every allowed single raising/lowering has amplitude sqrt 2, so
// each hop contributes exactly `coupling`.
void add_xy_bonds(std::vector<Triplet>& out, int sites, int range, double coupling) {
    if (coupling == 0.0 || range >= sites) return;
    const Index dim = pow3(sites);
    std::vector<Index> weight(sites + 1, 1);
    for (int j = 1; j <= sites; ++j) weight[j] = weight[j - 1] * 3;
    for (Index s = 0; s < dim; ++s) {
        for (int i = 1; i + range <= sites; ++i) {
            const int k = i + range;
            const int di = site_digit(s, i);
            const int dk = site_digit(s, k);
            // S_i^+ S_k^-: raise i (digit decreases), lower k (digit increases).
            if (di > 0 && dk < 2) {
                const Index t = s - weight[i - 1] + weight[k - 1];
                out.emplace_back(t, s, cplx(coupling, 0.0));
            }
            if (di < 2 && dk > 0) {
                const Index t = s + weight[i - 1] - weight[k - 1];
                out.emplace_back(t, s, cplx(coupling, 0.0));
            }
        }
    }
}

}  // namespace

void ChainParams::validate() const {
    if (sites < 2) throw ValidationError("chain needs at least 2 sites (L >= 2)");
    for (double c : {J, h, D, J2, J3}) {
        if (!std::isfinite(c)) throw ValidationError("couplings must be finite");
    }
}

double ManyBodyOperator::hermiticity_defect() const {
    const SparseOperator diff = matrix - SparseOperator(matrix.adjoint());
    double worst = 0.0;
    for (Index r = 0; r < diff.outerSize(); ++r) {
        for (SparseOperator::InnerIterator it(diff, r); it; ++it) worst = std::max(worst, std::abs(it.value()));
    }
    return worst;
}

CMatrix ManyBodyOperator::to_dense() const { return CMatrix(matrix); }

CMatrix ScarTower::as_matrix() const {
    CMatrix m(states.front().dimension(), static_cast<Index>(states.size()));
    for (std::size_t n = 0; n < states.size(); ++n) m.col(static_cast<Index>(n)) = states[n].amplitudes;
    return m;
}

double tower_energy(const ChainParams& p, int n) { return (p.D - p.h) * p.sites + 2.0 * n * p.h; }

ManyBodyOperator build_hamiltonian(const ChainParams& p, int full_space_cap) {
    p.validate();
    check_cap(p.sites, full_space_cap);
    const Index dim = pow3(p.sites);
    std::vector<Triplet> triplets;
    triplets.reserve(static_cast<std::size_t>(dim) * (1 + 2 * 3 * p.sites / 2));
    for (Index s = 0; s < dim; ++s) {
        double diag = 0.0;
        Index rest = s;
        for (int j = 0; j < p.sites; ++j) {
            const int m = digit_to_m(static_cast<int>(rest % 3));
            rest /= 3;
            diag += p.h * m + p.D * m * m;
        }
        if (diag != 0.0) triplets.emplace_back(s, s, cplx(diag, 0.0));
    }
    add_xy_bonds(triplets, p.sites, 1, p.J);
    add_xy_bonds(triplets, p.sites, 2, p.J2);
    add_xy_bonds(triplets, p.sites, 3, p.J3);
    ManyBodyOperator op{Basis::full(p.sites), from_triplets(dim, triplets), true, {}};
    if (op.hermiticity_defect() >= 1e-12) throw NumericalError("assembled Hamiltonian is not Hermitian");
    return op;
}

ManyBodyOperator total_sz(int sites) {
    const Index dim = pow3(sites);
    std::vector<Triplet> triplets;
    for (Index s = 0; s < dim; ++s) {
        const int m = total_magnetization(s, sites);
        if (m != 0) triplets.emplace_back(s, s, cplx(m, 0.0));
    }
    return ManyBodyOperator{Basis::full(sites), from_triplets(dim, triplets), true, {}};
}

double magnetization_commutator_defect(const ManyBodyOperator& op) {
    if (op.basis.kind != BasisKind::full) throw ValidationError("commutator check needs a full-basis operator");
    const int L = op.basis.sites;
    double worst = 0.0;
    for (Index r = 0; r < op.matrix.outerSize(); ++r) {
        const int mr = total_magnetization(r, L);
        for (SparseOperator::InnerIterator it(op.matrix, r); it; ++it) {
            const int mc = total_magnetization(it.col(), L);
            worst = std::max(worst, std::abs(it.value()) * std::abs(mr - mc));
        }
    }
    return worst;
}

ManyBodyOperator bimagnon_raising(int sites, int full_space_cap) {
    check_cap(sites, full_space_cap);
    const Index dim = pow3(sites);
    std::vector<Triplet> triplets;
    Index weight = 1;
    for (int j = 1; j <= sites; ++j) {
        // (S^+)^2 |-> = 2 |+>; with the 1/2 prefactor the amplitude is e^{i pi j}.
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        for (Index s = 0; s < dim; ++s) {
            if ((s / weight) % 3 == kDigitMinus) triplets.emplace_back(s - 2 * weight, s, cplx(sign, 0.0));
        }
        weight *= 3;
    }
    return ManyBodyOperator{Basis::full(sites), from_triplets(dim, triplets), false, {}};
}

ScarTower build_tower(const ChainParams& p, int full_space_cap) {
    p.validate();
    check_cap(p.sites, full_space_cap);
    ScarTower tower;
    tower.params = p;
    tower.raising = bimagnon_raising(p.sites, full_space_cap);
    const Index dim = pow3(p.sites);
    CVector v = CVector::Zero(dim);
    v(dim - 1) = 1.0;  // |Omega> = all sites in |->
    for (int n = 0; n <= p.sites; ++n) {
        if (n > 0) v = tower.raising.apply(v);
        const double nrm = v.norm();
        if (nrm == 0.0) throw NumericalError("tower construction produced a null vector");
        v /= nrm;
        tower.states.push_back(StateVector{Basis::full(p.sites), v});
        tower.energies.push_back(tower_energy(p, n));
    }
    return tower;
}

double sga_residual(const ChainParams& p, int full_space_cap) {
    const ManyBodyOperator H = build_hamiltonian(p, full_space_cap);
    const ManyBodyOperator Q = bimagnon_raising(p.sites, full_space_cap);
    const Index dim = pow3(p.sites);
    CVector omega = CVector::Zero(dim);
    omega(dim - 1) = 1.0;
    const CVector q_omega = Q.apply(omega);
    const CVector comm = H.apply(q_omega) - Q.apply(H.apply(omega));
    return (comm - 2.0 * p.h * q_omega).norm();
}

double tower_residual(const ManyBodyOperator& hamiltonian, const ScarTower& tower) {
    double worst = 0.0;
    for (std::size_t n = 0; n < tower.states.size(); ++n) {
        const CVector& b = tower.states[n].amplitudes;
        worst = std::max(worst, (hamiltonian.apply(b) - tower.energies[n] * b).norm());
    }
    return worst;
}

double eigenstate_residual(const ManyBodyOperator& hamiltonian, const StateVector& state) {
    const CVector hv = hamiltonian.apply(state.amplitudes);
    const cplx e = state.amplitudes.dot(hv) / state.amplitudes.squaredNorm();
    return (hv - e * state.amplitudes).norm();
}

double tower_orthonormality_defect(const ScarTower& tower) {
    const CMatrix b = tower.as_matrix();
    const CMatrix gram = b.adjoint() * b;
    return (gram - CMatrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

ProtocolStates protocol_states(int sites, double theta0, int full_space_cap) {
    check_cap(sites, full_space_cap);
    const Index dim = pow3(sites);
    ProtocolStates out{StateVector{Basis::full(sites), CVector::Zero(dim)},
                       StateVector{Basis::full(sites), CVector::Zero(dim)}};
    const double amp = std::pow(2.0, -0.5 * sites);
    // Only |+> and |-> are populated: enumerate the 2^L bit patterns,
    // bit j-1 set meaning site j is |->.
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << sites); ++mask) {
        Index idx = 0;
        Index weight = 1;
        cplx r = amp;
        cplx z = amp;
        for (int j = 1; j <= sites; ++j) {
            const bool minus = (mask >> (j - 1)) & 1u;
            if (minus) {
                idx += kDigitMinus * weight;
                const double alt = (j % 2 == 0) ? 1.0 : -1.0;  // e^{i pi j}
                r *= -alt;
                z *= alt * std::polar(1.0, theta0);
            }
            weight *= 3;
        }
        out.removal.amplitudes(idx) = r;
        out.initial.amplitudes(idx) = z;
    }
    return out;
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

CVector removal_tower_coefficients(int sites) {
    CVector c(sites + 1);
    for (int n = 0; n <= sites; ++n) {
        const double mag = std::sqrt(binomial(sites, n) / std::pow(2.0, sites));
        c(n) = (n % 2 == 0 ? 1.0 : -1.0) * mag;
    }
    return c;
}

CVector initial_tower_coefficients(int sites, double theta0) {
    CVector c(sites + 1);
    for (int n = 0; n <= sites; ++n) {
        const double mag = std::sqrt(binomial(sites, n) / std::pow(2.0, sites));
        c(n) = std::polar(mag, (sites - n) * theta0);
    }
    return c;
}

ManyBodyOperator string_operator(int sites, int full_space_cap) {
    check_cap(sites, full_space_cap);
    const Index dim = pow3(sites);
    std::vector<Triplet> triplets;
    triplets.reserve(dim);
    for (Index s = 0; s < dim; ++s) {
        Index t = 0;
        Index rest = s;
        Index weight = 1;
        for (int j = 0; j < sites; ++j) {
            const int d = static_cast<int>(rest % 3);
            rest /= 3;
            t += weight * (d == kDigitZero ? kDigitZero : 2 - d);
            weight *= 3;
        }
        triplets.emplace_back(t, s, cplx(1.0, 0.0));
    }
    return ManyBodyOperator{Basis::full(sites), from_triplets(dim, triplets), true, {}};
}

ManyBodyOperator tower_string_operator(int sites) {
    const long pairs = static_cast<long>(sites) * (sites + 1) / 2;
    const double sign = (pairs % 2 == 0) ? 1.0 : -1.0;
    std::vector<Triplet> triplets;
    for (int n = 0; n <= sites; ++n) triplets.emplace_back(sites - n, n, cplx(sign, 0.0));
    return ManyBodyOperator{Basis::tower(sites), from_triplets(sites + 1, triplets), true, {}};
}

ManyBodyOperator sz_sector_split(const ManyBodyOperator& op) {
    if (op.basis.kind != BasisKind::full) throw ValidationError("sector split needs a full-basis operator");
    const double defect = magnetization_commutator_defect(op);
    if (defect >= 1e-12) {
        throw ValidationError("operator does not commute with total S^z (defect " + std::to_string(defect) + ")");
    }
    const int L = op.basis.sites;
    ManyBodyOperator out = op;
    out.blocks.clear();
    for (int M = -L; M <= L; ++M) {
        SectorBlock block;
        block.magnetization = M;
        block.states = sector_states(L, M);
        const auto n = static_cast<Index>(block.states.size());
        block.matrix = CMatrix::Zero(n, n);
        std::map<Index, Index> local;
        for (Index k = 0; k < n; ++k) local.emplace(block.states[k], k);
        for (Index k = 0; k < n; ++k) {
            for (SparseOperator::InnerIterator it(op.matrix, block.states[k]); it; ++it) {
                block.matrix(k, local.at(it.col())) = it.value();
            }
        }
        out.blocks.push_back(std::move(block));
    }
    return out;
}

StateVector embed_tower_state(const ScarTower& tower, const CVector& coefficients) {
    if (coefficients.size() != static_cast<Index>(tower.states.size())) {
        throw ValidationError("tower coefficient vector has the wrong length");
    }
    CVector v = CVector::Zero(tower.states.front().dimension());
    for (Index n = 0; n < coefficients.size(); ++n) v += coefficients(n) * tower.states[n].amplitudes;
    return StateVector{tower.states.front().basis, v};
}

}  // namespace darkfilter
