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

#include "darkfilter/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace darkfilter {
namespace {

constexpr std::uint64_t kProbeSeed = 0x5eed5eedULL;

CVector phase_vector(const Eigen::VectorXd& energies, double tau, long steps = 1) {
    CVector out(energies.size());
    for (Index k = 0; k < energies.size(); ++k) {
        const double angle = wrap_angle(static_cast<double>(steps) * wrap_angle(energies(k) * tau));
        out(k) = std::polar(1.0, -angle);
    }
    return out;
}

}  // namespace

Propagator::Propagator(Basis basis, double tau, std::vector<SpectralBlock> blocks)
    : basis_(basis), tau_(tau), blocks_(std::move(blocks)) {
    if (!std::isfinite(tau)) throw ValidationError("period must be finite");
    for (const auto& b : blocks_) {
        offsets_.push_back(rank_);
        if (b.energies.size() != b.size()) throw ValidationError("spectral block energy count mismatch");
        rank_ += b.size();
    }
    energies_.resize(rank_);
    for (std::size_t i = 0; i < blocks_.size(); ++i) energies_.segment(offsets_[i], blocks_[i].size()) = blocks_[i].energies;
    phases_ = phase_vector(energies_, tau_);
}

CVector Propagator::to_eigenbasis(const CVector& v) const {
    CVector out(rank_);
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        const auto& b = blocks_[i];
        CVector local(b.size());
        for (Index k = 0; k < b.size(); ++k) local(k) = v(b.states[k]);
        if (b.real_vectors.size() > 0) {
            const Eigen::VectorXd re = b.real_vectors.transpose() * local.real();
            const Eigen::VectorXd im = b.real_vectors.transpose() * local.imag();
            out.segment(offsets_[i], b.size()).real() = re;
            out.segment(offsets_[i], b.size()).imag() = im;
        } else if (b.complex_vectors.size() > 0) {
            out.segment(offsets_[i], b.size()) = b.complex_vectors.adjoint() * local;
        } else {
            out.segment(offsets_[i], b.size()) = local;
        }
    }
    return out;
}

CVector Propagator::from_eigenbasis(const CVector& c) const {
    CVector out = CVector::Zero(dimension());
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        const auto& b = blocks_[i];
        const auto seg = c.segment(offsets_[i], b.size());
        CVector local;
        if (b.real_vectors.size() > 0) {
            local.resize(b.size());
            local.real() = b.real_vectors * seg.real();
            local.imag() = b.real_vectors * seg.imag();
        } else if (b.complex_vectors.size() > 0) {
            local = b.complex_vectors * seg;
        } else {
            local = seg;
        }
        for (Index k = 0; k < b.size(); ++k) out(b.states[k]) = local(k);
    }
    return out;
}

Eigen::VectorXd Propagator::eigenphase_angles() const {
    Eigen::VectorXd out(rank_);
    for (Index k = 0; k < rank_; ++k) out(k) = wrap_angle(energies_(k) * tau_);
    return out;
}

CVector Propagator::eigenvector(Index k) const {
    CVector e = CVector::Zero(rank_);
    e(k) = 1.0;
    return from_eigenbasis(e);
}

CVector Propagator::apply(const CVector& v) const {
    return from_eigenbasis(phases_.cwiseProduct(to_eigenbasis(v)));
}

CVector Propagator::apply_power(const CVector& v, long n) const {
    return from_eigenbasis(phase_vector(energies_, tau_, n).cwiseProduct(to_eigenbasis(v)));
}

CMatrix Propagator::dense() const {
    const Index dim = dimension();
    CMatrix u = CMatrix::Zero(dim, dim);
    for (Index k = 0; k < rank_; ++k) {
        const CVector e = eigenvector(k);
        u.noalias() += phases_(k) * e * e.adjoint();
    }
    return u;
}

double Propagator::uncovered_weight(const CVector& v) const {
    std::vector<char> covered(static_cast<std::size_t>(dimension()), 0);
    for (const auto& b : blocks_) {
        for (Index s : b.states) covered[s] = 1;
    }
    double w = 0.0;
    for (Index s = 0; s < v.size(); ++s) {
        if (!covered[s]) w += std::norm(v(s));
    }
    return w;
}

double Propagator::unitarity_defect(Index exact_limit) const {
    double worst = 0.0;
    std::uint64_t probe = kProbeSeed;
    for (const auto& b : blocks_) {
        if (b.diagonal()) continue;
        const Index n = b.size();
        if (n <= exact_limit) {
            if (b.real_vectors.size() > 0) {
                const Eigen::MatrixXd g = b.real_vectors.transpose() * b.real_vectors;
                worst = std::max(worst, (g - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff());
            } else {
                const CMatrix g = b.complex_vectors.adjoint() * b.complex_vectors;
                worst = std::max(worst, (g - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff());
            }
            continue;
        }
        // Large blocks: || V^T V x - x || on a few deterministic probes.
        for (int t = 0; t < 3; ++t) {
            Eigen::VectorXd x(n);
            for (Index k = 0; k < n; ++k) {
                probe = probe * 6364136223846793005ULL + 1442695040888963407ULL;
                x(k) = static_cast<double>(probe >> 11) * 0x1.0p-53 - 0.5;
            }
            x.normalize();
            Eigen::VectorXd y;
            if (b.real_vectors.size() > 0) {
                y = b.real_vectors.transpose() * (b.real_vectors * x);
            } else {
                y = (b.complex_vectors.adjoint() * (b.complex_vectors * x.cast<cplx>())).real();
            }
            worst = std::max(worst, (y - x).cwiseAbs().maxCoeff());
        }
    }
    return worst;
}

Propagator propagator(const ManyBodyOperator& hamiltonian, double tau, const std::function<bool(int)>& keep_sector) {
    if (!hamiltonian.hermitian) throw ValidationError("propagator requires a Hermitian generator");
    const Basis basis = hamiltonian.basis;
    std::vector<SpectralBlock> blocks;

    if (basis.kind != BasisKind::full) {
        // Single dense block.
        const CMatrix dense = hamiltonian.to_dense();
        SpectralBlock b;
        for (Index s = 0; s < dense.rows(); ++s) b.states.push_back(s);
        if (dense.imag().cwiseAbs().maxCoeff() == 0.0) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense.real());
            b.real_vectors = es.eigenvectors();
            b.energies = es.eigenvalues();
        } else {
            Eigen::SelfAdjointEigenSolver<CMatrix> es(dense);
            b.complex_vectors = es.eigenvectors();
            b.energies = es.eigenvalues();
        }
        blocks.push_back(std::move(b));
        return Propagator(basis, tau, std::move(blocks));
    }

    if (magnetization_commutator_defect(hamiltonian) >= 1e-12) {
        throw ValidationError("Hamiltonian does not conserve total S^z; sector blocking impossible");
    }
    const int L = basis.sites;
    for (int M = -L; M <= L; ++M) {
        if (keep_sector && !keep_sector(M)) continue;
        SpectralBlock b;
        b.states = sector_states(L, M);
        const Index n = b.size();
        std::map<Index, Index> local;
        for (Index k = 0; k < n; ++k) local.emplace(b.states[k], k);
        Eigen::MatrixXd re = Eigen::MatrixXd::Zero(n, n);
        Eigen::MatrixXd im = Eigen::MatrixXd::Zero(n, n);
        for (Index k = 0; k < n; ++k) {
            for (SparseOperator::InnerIterator it(hamiltonian.matrix, b.states[k]); it; ++it) {
                const Index c = local.at(it.col());
                re(k, c) = it.value().real();
                im(k, c) = it.value().imag();
            }
        }
        if (n == 1) {
            b.energies = re.diagonal();
        } else if (im.cwiseAbs().maxCoeff() == 0.0) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(re);
            b.real_vectors = es.eigenvectors();
            b.energies = es.eigenvalues();
        } else {
            CMatrix h(n, n);
            h.real() = re;
            h.imag() = im;
            Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
            b.complex_vectors = es.eigenvectors();
            b.energies = es.eigenvalues();
        }
        blocks.push_back(std::move(b));
    }
    return Propagator(basis, tau, std::move(blocks));
}

Propagator dense_propagator(const Eigen::MatrixXd& hamiltonian, double tau) {
    if ((hamiltonian - hamiltonian.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
        throw ValidationError("dense generator is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hamiltonian);
    SpectralBlock b;
    for (Index s = 0; s < hamiltonian.rows(); ++s) b.states.push_back(s);
    b.real_vectors = es.eigenvectors();
    b.energies = es.eigenvalues();
    std::vector<SpectralBlock> blocks;
    blocks.push_back(std::move(b));
    return Propagator(Basis::computational(hamiltonian.rows()), tau, std::move(blocks));
}

Propagator tower_propagator(const ChainParams& p, double tau) {
    p.validate();
    SpectralBlock b;
    b.energies.resize(p.sites + 1);
    for (int n = 0; n <= p.sites; ++n) {
        b.states.push_back(n);
        b.energies(n) = tower_energy(p, n);
    }
    std::vector<SpectralBlock> blocks;
    blocks.push_back(std::move(b));
    return Propagator(Basis::tower(p.sites), tau, std::move(blocks));
}

}  // namespace darkfilter
