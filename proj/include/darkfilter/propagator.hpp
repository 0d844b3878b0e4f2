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

#include <functional>
#include <vector>

#include "darkfilter/spin_model.hpp"

namespace darkfilter {

/// Eigen-decomposition of one invariant block of a Hermitian generator.
/// Exactly one of `real_vectors` / `complex_vectors` is populated unless the
/// block is diagonal in the ambient basis, in which case both are empty.
struct SpectralBlock {
    std::vector<Index> states;  // ambient indices spanned by this block
    Eigen::MatrixXd real_vectors;
    CMatrix complex_vectors;
    Eigen::VectorXd energies;

    Index size() const { return static_cast<Index>(states.size()); }
    bool diagonal() const { return real_vectors.size() == 0 && complex_vectors.size() == 0; }
};

/// U(tau) = exp(-i H tau) held as a list of spectral blocks.
///
/// Eigen-coordinates are the concatenation of the blocks' eigenvector
/// coefficients, in block order. Ambient indices not covered by any block
/// are outside the propagated subspace; states must have no weight there.
class Propagator {
   public:
    Propagator(Basis basis, double tau, std::vector<SpectralBlock> blocks);

    const Basis& basis() const { return basis_; }
    double tau() const { return tau_; }
    Index dimension() const { return basis_.dimension(); }
    /// Number of eigen-coordinates (= covered ambient dimension).
    Index rank() const { return rank_; }
    const std::vector<SpectralBlock>& blocks() const { return blocks_; }

    CVector to_eigenbasis(const CVector& v) const;
    CVector from_eigenbasis(const CVector& c) const;
    /// e^{-i E_k tau} per eigen-coordinate.
    const CVector& phases() const { return phases_; }
    const Eigen::VectorXd& energies() const { return energies_; }
    /// E_k tau reduced into [0, 2pi).
    Eigen::VectorXd eigenphase_angles() const;
    /// Eigenvector k in the ambient basis.
    CVector eigenvector(Index k) const;

    CVector apply(const CVector& v) const;
    /// U^n v, using exact phases e^{-i n E tau}.
    CVector apply_power(const CVector& v, long n) const;
    CMatrix dense() const;

    /// Weight of v outside the covered ambient indices.
    double uncovered_weight(const CVector& v) const;
    /// max |V^dagger V - 1| over blocks (probe estimate for blocks above
    /// `exact_limit`).
    double unitarity_defect(Index exact_limit = 2048) const;

   private:
    Basis basis_;
    double tau_;
    std::vector<SpectralBlock> blocks_;
    Index rank_ = 0;
    std::vector<Index> offsets_;
    CVector phases_;
    Eigen::VectorXd energies_;
};

/// U = exp(-i H tau) by Hermitian eigendecomposition of each magnetization
/// block. `keep_sector` may restrict which sectors are built (all by default).
Propagator propagator(const ManyBodyOperator& hamiltonian, double tau,
                      const std::function<bool(int)>& keep_sector = {});

/// Propagator for an arbitrary dense Hermitian matrix (one block).
Propagator dense_propagator(const Eigen::MatrixXd& hamiltonian, double tau);

/// Diagonal propagator on the tower basis, U = diag(e^{-i E_n tau}).
Propagator tower_propagator(const ChainParams& p, double tau);

}  // namespace darkfilter
