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

#include "darkfilter/filtration.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace darkfilter {
namespace {

constexpr double kUnitarityTol = 1e-10;
constexpr double kNormTol = 1e-12;
constexpr double kCoverageTol = 1e-20;
constexpr double kSingularBasis = 1e14;

void require_same_basis(const Basis& a, const Basis& b, const char* what) {
    if (!(a == b)) throw ValidationError(std::string(what) + " lives in a different basis than the propagator");
}

std::string group_label(const DegenerateGroup& g, int j) {
    std::ostringstream os;
    os << "Phi^(";
    for (std::size_t i = 0; i < g.members.size(); ++i) os << (i ? "," : "") << g.members[i];
    os << ")_" << j;
    return os.str();
}

// Generalized cross product: w_k = (-1)^k det(rows with column k removed).
CVector cofactor_vector(const CMatrix& rows) {
    const Index m = rows.rows();
    const Index n = rows.cols();
    CVector w(n);
    for (Index k = 0; k < n; ++k) {
        CMatrix minor(m, n - 1);
        for (Index c = 0, d = 0; c < n; ++c) {
            if (c == k) continue;
            minor.col(d++) = rows.col(c);
        }
        const cplx det = m == 0 ? cplx(1.0) : minor.fullPivLu().determinant();
        w(k) = (k % 2 == 0 ? 1.0 : -1.0) * det;
    }
    return w;
}

// Columns: dark coefficient vectors in the group's eigenvector basis.
CMatrix dark_coefficients_determinant(const CVector& a) {
    const Index g = a.size();
    Index pivot = 0;
    a.cwiseAbs().maxCoeff(&pivot);
    std::vector<Index> order(static_cast<std::size_t>(g));
    std::iota(order.begin(), order.end(), Index{0});
    std::swap(order[0], order[static_cast<std::size_t>(pivot)]);

    CMatrix permuted_out(g, g - 1);
    // Rows hold <psi_r|C_k> and <Phi_i|C_k> over the permuted eigenvectors.
    CMatrix rows(1, g);
    for (Index k = 0; k < g; ++k) rows(0, k) = std::conj(a(order[static_cast<std::size_t>(k)]));
    for (Index j = 1; j < g; ++j) {
        const CMatrix head = rows.leftCols(j + 1);
        CVector w = CVector::Zero(g);
        w.head(j + 1) = cofactor_vector(head);
        const double nrm = w.norm();
        if (nrm == 0.0) throw NumericalError("determinant construction produced a null dark state");
        w /= nrm;
        permuted_out.col(j - 1) = w;
        rows.conservativeResize(rows.rows() + 1, Eigen::NoChange);
        rows.row(rows.rows() - 1) = w.adjoint();
    }
    CMatrix out(g, g - 1);
    for (Index k = 0; k < g; ++k) out.row(order[static_cast<std::size_t>(k)]) = permuted_out.row(k);
    return out;
}

CMatrix dark_coefficients_complement(const CVector& a) {
    const Index g = a.size();
    const CMatrix column = a;
    const Eigen::HouseholderQR<CMatrix> qr(column);
    const CMatrix q = qr.householderQ() * CMatrix::Identity(g, g);
    return q.rightCols(g - 1);
}

}  // namespace

const char* to_string(Engine engine) { return engine == Engine::full ? "full" : "tower"; }

const char* to_string(ZetaKind kind) {
    switch (kind) {
        case ZetaKind::dark: return "dark";
        case ZetaKind::bright: return "bright";
        case ZetaKind::trivial_zero: return "zero";
    }
    return "?";
}

void FiltrationSetup::validate() const {
    if (!propagator) throw ValidationError("filtration setup has no propagator");
    require_same_basis(removal.basis, basis(), "removal state");
    if (removal.dimension() != propagator->dimension()) throw ValidationError("removal state has the wrong dimension");
    const double defect = propagator->unitarity_defect();
    if (!(defect < kUnitarityTol)) {
        throw NumericalError("propagator unitarity defect " + std::to_string(defect) + " exceeds tolerance");
    }
    if (std::abs(removal.norm() - 1.0) > kNormTol) throw ValidationError("removal state is not normalized");
    if (propagator->uncovered_weight(removal.amplitudes) > kCoverageTol) {
        throw ValidationError("removal state has weight outside the propagated sectors");
    }
}

double resonance_period(double ea, double eb, int k) {
    if (!std::isfinite(ea) || !std::isfinite(eb)) throw ValidationError("energies must be finite");
    if (k < 1) throw ValidationError("resonance order must be positive");
    const double gap = std::abs(eb - ea);
    if (gap == 0.0) throw AlreadyDegenerate("levels are already degenerate; any period resonates");
    return kTwoPi * k / gap;
}

double period_from_h_tau(double h, long p, long q) {
    if (h == 0.0 || !std::isfinite(h)) throw ValidationError("h must be finite and nonzero to fix h*tau");
    if (q <= 0 || p <= 0) throw ValidationError("h*tau must be a positive rational multiple of pi");
    return kPi * static_cast<double>(p) / static_cast<double>(q) / h;
}

FilterProblem reduced_setup(const ChainParams& p, double tau, double theta0) {
    p.validate();
    if (p.J2 != 0.0) throw ValidationError("the tower engine requires J2 = 0 (the tower is not an eigenbasis otherwise)");
    auto u = std::make_shared<const Propagator>(tower_propagator(p, tau));
    const Basis b = Basis::tower(p.sites);
    FilterProblem out{FiltrationSetup{u, StateVector{b, removal_tower_coefficients(p.sites)}, Engine::tower},
                      StateVector{b, initial_tower_coefficients(p.sites, theta0)}};
    out.setup.validate();
    return out;
}

FilterProblem reduced_setup(const ScarTower& tower, double tau, double theta0) {
    return reduced_setup(tower.params, tau, theta0);
}

FilterProblem full_setup(const ChainParams& p, double tau, double theta0, bool all_sectors, int full_space_cap) {
    p.validate();
    const ManyBodyOperator h = sz_sector_split(build_hamiltonian(p, full_space_cap));
    const int L = p.sites;
    auto keep = [L, all_sectors](int m) { return all_sectors || ((m + L) % 2 == 0); };
    auto u = std::make_shared<const Propagator>(propagator(h, tau, keep));
    ProtocolStates states = protocol_states(L, theta0, full_space_cap);
    FilterProblem out{FiltrationSetup{u, std::move(states.removal), Engine::full}, std::move(states.initial)};
    out.setup.validate();
    return out;
}

FiltrationSetup with_removal(const FiltrationSetup& setup, const CVector& removal) {
    const double nrm = removal.norm();
    if (!(nrm > 0.0)) throw ValidationError("removal state must be nonzero");
    FiltrationSetup out{setup.propagator, StateVector{setup.basis(), removal / nrm}, setup.engine};
    out.validate();
    return out;
}

CVector TargetState::at(long n) const {
    CVector v = CVector::Zero(basis.dimension());
    for (const auto& c : components) {
        const double angle = wrap_angle(static_cast<double>(n) * wrap_angle(c.angle_per_step));
        v += std::polar(1.0, -angle) * c.vector;
    }
    return v;
}

TargetState TargetState::fixed(const StateVector& state) {
    return TargetState{state.basis, {TargetComponent{state.amplitudes / state.norm(), 0.0}}};
}

TargetState tar1_target(int sites) {
    if (sites < 2) throw ValidationError("chain needs at least two sites");
    CVector v = CVector::Zero(sites + 1);
    v(sites) = 1.0 / std::sqrt(2.0);
    v(0) = -(sites % 2 == 0 ? 1.0 : -1.0) / std::sqrt(2.0);
    return TargetState{Basis::tower(sites), {TargetComponent{v, 0.0}}};
}

TargetState tar2_target(int sites, double theta0, double tau, double h) {
    if (sites < 2) throw ValidationError("chain needs at least two sites");
    const double sign = sites % 2 == 0 ? 1.0 : -1.0;
    const double rl = std::sqrt(static_cast<double>(sites));
    const double nrm = std::sqrt(sites + 1.0);
    CVector phi1 = CVector::Zero(sites + 1);
    CVector phi2 = CVector::Zero(sites + 1);
    phi1(0) = -sign * rl / nrm;
    phi1(sites - 1) = -1.0 / nrm;
    phi2(1) = sign / nrm;
    phi2(sites) = rl / nrm;
    const double s = 1.0 / std::sqrt(2.0);
    return TargetState{Basis::tower(sites),
                       {TargetComponent{std::polar(s, theta0) * phi1, 0.0},
                        TargetComponent{-s * phi2, 2.0 * h * tau}}};
}

TargetState embed_target(const TargetState& target, const ScarTower& tower) {
    if (target.basis.kind != BasisKind::tower || target.basis.sites != tower.sites()) {
        throw ValidationError("target is not expressed in this tower basis");
    }
    TargetState out{tower.states.front().basis, {}};
    for (const auto& c : target.components) {
        out.components.push_back({embed_tower_state(tower, c.vector).amplitudes, c.angle_per_step});
    }
    return out;
}

Trajectory run_filtration(const FiltrationSetup& setup, const StateVector& initial, long n_steps,
                          const FiltrationOptions& options) {
    if (n_steps < 0) throw ValidationError("number of periods must be non-negative");
    if (!setup.propagator) throw ValidationError("filtration setup has no propagator");
    const Propagator& u = *setup.propagator;
    require_same_basis(initial.basis, u.basis(), "initial state");
    if (initial.dimension() != u.dimension()) throw ValidationError("initial state has the wrong dimension");
    if (std::abs(initial.norm() - 1.0) > 1e-10) throw ValidationError("initial state is not normalized");
    if (u.uncovered_weight(initial.amplitudes) > kCoverageTol) {
        throw ValidationError("initial state has weight outside the propagated sectors");
    }
    if (options.target) require_same_basis(options.target->basis, u.basis(), "target state");
    if (options.observable) require_same_basis(options.observable->basis, u.basis(), "observable");

    const CVector r = u.to_eigenbasis(setup.removal.amplitudes);
    std::vector<CVector> target_parts;
    if (options.target) {
        for (const auto& c : options.target->components) target_parts.push_back(u.to_eigenbasis(c.vector));
    }
    std::vector<long> checkpoints = options.checkpoints;
    std::sort(checkpoints.begin(), checkpoints.end());

    Trajectory out;
    const auto reserve = static_cast<std::size_t>(n_steps + 1);
    out.survival.reserve(reserve);
    if (options.target) out.fidelity.reserve(reserve);
    if (options.observable) out.string_value.reserve(reserve);

    CVector psi = u.to_eigenbasis(initial.amplitudes);
    const CVector& phases = u.phases();
    auto cp = checkpoints.begin();
    for (long n = 0;; ++n) {
        const double s = psi.squaredNorm();
        if (!(s >= kDepletionFloor)) {
            out.depleted = true;
            break;
        }
        out.survival.push_back(s);
        if (options.target) {
            cplx amp = 0.0;
            const auto& comps = options.target->components;
            for (std::size_t k = 0; k < comps.size(); ++k) {
                const double angle = wrap_angle(static_cast<double>(n) * wrap_angle(comps[k].angle_per_step));
                amp += std::polar(1.0, angle) * target_parts[k].dot(psi);
            }
            out.fidelity.push_back(std::norm(amp) / s);
        }
        const bool want_checkpoint = cp != checkpoints.end() && *cp == n;
        if (options.observable || want_checkpoint) {
            const CVector ambient = u.from_eigenbasis(psi);
            if (options.observable) out.string_value.push_back(ambient.dot(options.observable->apply(ambient)) / s);
            if (want_checkpoint) out.checkpoints.emplace(n, StateVector{u.basis(), ambient / std::sqrt(s)});
        }
        while (cp != checkpoints.end() && *cp <= n) ++cp;
        if (n == n_steps) break;
        if (options.stop_fidelity && !out.fidelity.empty() && out.fidelity.back() >= *options.stop_fidelity) break;
        psi = phases.cwiseProduct(psi);
        psi -= r * r.dot(psi);
    }
    return out;
}

CMatrix DegenerateGroup::basis(const Propagator& u) const {
    CMatrix out(u.dimension(), degeneracy());
    for (int k = 0; k < degeneracy(); ++k) out.col(k) = u.eigenvector(members[static_cast<std::size_t>(k)]);
    return out;
}

DegeneracyReport degeneracy_groups(const Propagator& u, double tol) {
    if (!(tol > 0.0)) throw ValidationError("degeneracy tolerance must be positive");
    const Eigen::VectorXd angles = u.eigenphase_angles();
    std::vector<Index> order(static_cast<std::size_t>(angles.size()));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return angles(a) < angles(b); });

    DegeneracyReport report;
    for (Index k : order) {
        if (!report.groups.empty()) {
            auto& last = report.groups.back();
            if (angles(k) - angles(last.members.back()) < tol) {
                last.members.push_back(k);
                continue;
            }
        }
        report.groups.push_back(DegenerateGroup{angles(k), {k}});
    }
    // Close the circle: angles just below 2pi join the group at 0.
    if (report.groups.size() > 1) {
        auto& first = report.groups.front();
        auto& last = report.groups.back();
        if (angles(first.members.front()) + kTwoPi - angles(last.members.back()) < tol) {
            first.members.insert(first.members.begin(), last.members.begin(), last.members.end());
            first.angle = last.angle;
            report.groups.pop_back();
        }
    }
    for (auto& g : report.groups) std::sort(g.members.begin(), g.members.end());
    std::sort(report.groups.begin(), report.groups.end(),
              [](const DegenerateGroup& a, const DegenerateGroup& b) { return a.angle < b.angle; });

    const std::size_t ng = report.groups.size();
    for (std::size_t i = 0; ng > 1 && i < ng; ++i) {
        const auto& a = report.groups[i];
        const auto& b = report.groups[(i + 1) % ng];
        const double gap = angular_distance(a.angle, b.angle);
        if (gap < 10.0 * tol) {
            std::ostringstream os;
            os << "eigenphases " << a.angle << " and " << b.angle << " are separated by only " << gap
               << "; grouping is tolerance-sensitive";
            report.warnings.push_back(os.str());
        }
    }
    return report;
}

void DarkSubspace::append(const DarkSubspace& other) {
    if (other.count() == 0) return;
    if (count() == 0) {
        const auto keep_basis = basis;
        *this = other;
        if (keep_basis.dimension() == other.basis.dimension()) basis = keep_basis;
        return;
    }
    require_same_basis(other.basis, basis, "dark subspace");
    CMatrix merged(vectors.rows(), vectors.cols() + other.vectors.cols());
    merged << vectors, other.vectors;
    vectors = std::move(merged);
    angles.insert(angles.end(), other.angles.begin(), other.angles.end());
    labels.insert(labels.end(), other.labels.begin(), other.labels.end());
    group_of.insert(group_of.end(), other.group_of.begin(), other.group_of.end());
}

DarkSubspace dark_states(const DegenerateGroup& group, const Propagator& u, const StateVector& removal,
                         DarkMethod method, int group_index) {
    require_same_basis(removal.basis, u.basis(), "removal state");
    const CVector r = u.to_eigenbasis(removal.amplitudes);
    const Index g = group.degeneracy();
    CVector a(g);
    for (Index k = 0; k < g; ++k) a(k) = r(group.members[static_cast<std::size_t>(k)]);

    CMatrix coeffs;
    if (a.norm() < kZeroProjection) {
        coeffs = CMatrix::Identity(g, g);
    } else if (g > 1) {
        coeffs = method == DarkMethod::determinant ? dark_coefficients_determinant(a) : dark_coefficients_complement(a);
    }

    DarkSubspace out{u.basis(), CMatrix(u.dimension(), coeffs.cols()), {}, {}, {}};
    if (coeffs.cols() == 0) return out;
    out.vectors = group.basis(u) * coeffs;
    for (Index j = 0; j < coeffs.cols(); ++j) {
        out.angles.push_back(group.angle);
        out.labels.push_back(group_label(group, static_cast<int>(j) + 1));
        out.group_of.push_back(group_index);
    }
    return out;
}

DarkSubspace find_dark_subspace(const Propagator& u, const StateVector& removal, DarkMethod method, double tol) {
    const DegeneracyReport report = degeneracy_groups(u, tol);
    DarkSubspace out{u.basis(), CMatrix(u.dimension(), 0), {}, {}, {}};
    for (std::size_t i = 0; i < report.groups.size(); ++i) {
        out.append(dark_states(report.groups[i], u, removal, method, static_cast<int>(i)));
    }
    return out;
}

std::vector<double> principal_angle_sines(const CMatrix& a, const CMatrix& b) {
    if (a.cols() != b.cols() || a.rows() != b.rows()) return {};
    if (a.cols() == 0) return {};
    const CMatrix residual = b - a * (a.adjoint() * b);
    const Eigen::JacobiSVD<CMatrix> svd(residual);
    const Eigen::VectorXd s = svd.singularValues();
    return std::vector<double>(s.data(), s.data() + s.size());
}

CMatrix filtration_matrix(const FiltrationSetup& setup) {
    const Propagator& u = *setup.propagator;
    if (u.dimension() > kMaxDenseSpectrumDim) throw ValidationError("dimension too large for a dense filtration matrix");
    const CVector& r = setup.removal.amplitudes;
    const CMatrix dense_u = u.dense();
    return dense_u - r * (r.adjoint() * dense_u);
}

std::vector<cplx> FiltrationSpectrum::bright() const {
    std::vector<cplx> out;
    for (Index k = 0; k < eigenvalues.size(); ++k) {
        if (kinds[static_cast<std::size_t>(k)] == ZetaKind::bright) out.push_back(eigenvalues(k));
    }
    return out;
}

int FiltrationSpectrum::count(ZetaKind kind) const {
    return static_cast<int>(std::count(kinds.begin(), kinds.end(), kind));
}

CVector FiltrationSpectrum::reconstruct(long n) const {
    CVector c = CVector::Zero(eigenvalues.size());
    for (Index k = 0; k < eigenvalues.size(); ++k) {
        cplx zn = 1.0;
        for (long i = 0; i < n; ++i) zn *= eigenvalues(k);
        c(k) = overlaps(k) * zn;
    }
    return propagator->from_eigenbasis(right * c);
}

FiltrationSpectrum spectral_decomposition(const FiltrationSetup& setup, const StateVector& initial) {
    const Propagator& u = *setup.propagator;
    if (u.rank() > kMaxDenseSpectrumDim) throw ValidationError("propagated subspace too large for a dense eigensolve");
    require_same_basis(initial.basis, u.basis(), "initial state");
    if (u.uncovered_weight(initial.amplitudes) > kCoverageTol) {
        throw ValidationError("initial state has weight outside the propagated sectors");
    }
    // F restricted to the propagated subspace, in U's eigen-coordinates.
    const CVector r = u.to_eigenbasis(setup.removal.amplitudes);
    CMatrix f = u.phases().asDiagonal().toDenseMatrix();
    f -= r * (r.adjoint() * f);

    const Eigen::ComplexEigenSolver<CMatrix> solver(f);
    if (solver.info() != Eigen::Success) throw NumericalError("eigensolver failed on the filtration operator");

    FiltrationSpectrum out;
    out.propagator = setup.propagator;
    out.eigenvalues = solver.eigenvalues();
    out.right = solver.eigenvectors();
    for (Index k = 0; k < out.right.cols(); ++k) out.right.col(k).normalize();

    const Eigen::JacobiSVD<CMatrix> svd(out.right);
    const Eigen::VectorXd sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    out.condition = smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
    if (!(out.condition < kSingularBasis)) {
        throw NumericalError("filtration operator is numerically non-diagonalizable (condition " +
                             std::to_string(out.condition) + ")");
    }
    out.degraded = out.condition > kIllConditioned;

    const CMatrix inverse = out.right.fullPivLu().inverse();
    out.left = inverse.adjoint();
    out.overlaps = inverse * u.to_eigenbasis(initial.amplitudes);
    for (Index k = 0; k < out.eigenvalues.size(); ++k) {
        const double m = std::abs(out.eigenvalues(k));
        out.kinds.push_back(m > kDarkModulus ? ZetaKind::dark : m < kZeroModulus ? ZetaKind::trivial_zero : ZetaKind::bright);
    }
    return out;
}

StateVector long_time_state(const DarkSubspace& dark, const StateVector& initial, long n) {
    require_same_basis(initial.basis, dark.basis, "initial state");
    CVector v = CVector::Zero(initial.dimension());
    for (int k = 0; k < dark.count(); ++k) {
        const cplx c = dark.vectors.col(k).dot(initial.amplitudes);
        const double angle = wrap_angle(static_cast<double>(n) * dark.angles[static_cast<std::size_t>(k)]);
        v += std::polar(1.0, -angle) * c * dark.vectors.col(k);
    }
    const double nrm = v.norm();
    if (nrm < 1e-14) throw NumericalError("initial state has no dark component; nothing survives filtration");
    return StateVector{initial.basis, v / nrm};
}

FiltrationTime filtration_time(const Trajectory& trajectory, double epsilon) {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw ValidationError("epsilon must lie in (0, 1]");
    if (!trajectory.has_fidelity()) throw ValidationError("trajectory carries no fidelity record");
    FiltrationTime out;
    for (std::size_t n = 0; n < trajectory.fidelity.size(); ++n) {
        const double q = trajectory.fidelity[n];
        if (!out.n_eps && q >= 1.0 - epsilon) out.n_eps = static_cast<long>(n);
        if (q > out.max_fidelity) {
            out.max_fidelity = q;
            out.argmax = static_cast<long>(n);
        }
    }
    return out;
}

}  // namespace darkfilter
