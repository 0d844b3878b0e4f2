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

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "darkfilter/propagator.hpp"
#include "darkfilter/spin_model.hpp"

namespace darkfilter {

enum class Engine { full, tower };

const char* to_string(Engine engine);

/// One period of the protocol: F = (1 - |r><r|) U(tau).
struct FiltrationSetup {
    std::shared_ptr<const Propagator> propagator;
    StateVector removal;
    Engine engine = Engine::full;

    double tau() const { return propagator->tau(); }
    const Basis& basis() const { return propagator->basis(); }
    /// Unitarity of U within 1e-10, unit-norm removal within 1e-12, removal
    /// inside the propagated subspace. Throws NumericalError / ValidationError.
    void validate() const;
};

/// A setup together with the initial state it is meant to filter.
struct FilterProblem {
    FiltrationSetup setup;
    StateVector initial;
};

/// Raised by resonance_period when the two levels already coincide.
class AlreadyDegenerate : public ValidationError {
   public:
    using ValidationError::ValidationError;
};

/// tau = 2 pi k / |Eb - Ea|, so that e^{-i Ea tau} = e^{-i Eb tau}.
double resonance_period(double ea, double eb, int k = 1);

/// Period for h tau = pi p / q.
double period_from_h_tau(double h, long p, long q);

/// (L+1)-dimensional problem on the bi-magnon tower. Requires J2 == 0.
FilterProblem reduced_setup(const ChainParams& p, double tau, double theta0);
FilterProblem reduced_setup(const ScarTower& tower, double tau, double theta0);

/// Full-space problem: sector-blocked propagator restricted to the
/// magnetization sectors M = 2n - L touched by the protocol product states
/// (or every sector when `all_sectors`).
FilterProblem full_setup(const ChainParams& p, double tau, double theta0, bool all_sectors = false,
                         int full_space_cap = kDefaultFullSpaceCap);

/// Replaces the removal state of a setup (renormalized) and re-validates.
FiltrationSetup with_removal(const FiltrationSetup& setup, const CVector& removal);

/// Target |Psi(n)> = sum_k v_k e^{-i n w_k}; static targets have w = 0.
struct TargetComponent {
    CVector vector;
    double angle_per_step = 0.0;
};

struct TargetState {
    Basis basis;
    std::vector<TargetComponent> components;

    CVector at(long n) const;
    static TargetState fixed(const StateVector& state);
};

/// (|B_L> - e^{i L pi} |B_0>) / sqrt 2, tower basis.
TargetState tar1_target(int sites);
/// (|Phi_1> e^{i theta0} - |Phi_2> e^{-i n tau dE01}) / sqrt 2, tower basis,
/// with dE01 = 2h.
TargetState tar2_target(int sites, double theta0, double tau, double h);
/// Maps a tower-basis target onto the full basis.
TargetState embed_target(const TargetState& target, const ScarTower& tower);

struct Trajectory {
    std::vector<double> survival;     // ||F^n psi0||^2, n = 0..steps
    std::vector<double> fidelity;     // Q_n, when a target was given
    std::vector<cplx> string_value;   // <psi_n|X|psi_n>, when an observable was given
    std::map<long, StateVector> checkpoints;  // normalized psi_n
    bool depleted = false;

    long steps() const { return static_cast<long>(survival.size()) - 1; }
    bool has_fidelity() const { return !fidelity.empty(); }
    bool has_observable() const { return !string_value.empty(); }
};

struct FiltrationOptions {
    std::optional<TargetState> target;
    const ManyBodyOperator* observable = nullptr;  // not owned
    std::vector<long> checkpoints;
    /// Stop once the fidelity first reaches this value.
    std::optional<double> stop_fidelity;
};

/// Survival weight below which the run stops as fully depleted.
inline constexpr double kDepletionFloor = 1e-300;

Trajectory run_filtration(const FiltrationSetup& setup, const StateVector& initial, long n_steps,
                          const FiltrationOptions& options = {});

struct DegenerateGroup {
    double angle = 0.0;           // E tau mod 2pi; the eigenvalue is e^{-i angle}
    std::vector<Index> members;   // eigen-coordinate indices of the propagator
    int degeneracy() const { return static_cast<int>(members.size()); }
    /// Orthonormal eigenvectors of the group, ambient basis, one per column.
    CMatrix basis(const Propagator& u) const;
};

struct DegeneracyReport {
    std::vector<DegenerateGroup> groups;  // ordered by angle
    std::vector<std::string> warnings;
};

inline constexpr double kDefaultDegeneracyTol = 1e-9;

DegeneracyReport degeneracy_groups(const Propagator& u, double tol = kDefaultDegeneracyTol);

enum class DarkMethod { determinant, complement };

struct DarkSubspace {
    Basis basis;
    CMatrix vectors;                 // orthonormal columns, ambient basis
    std::vector<double> angles;      // E_delta tau mod 2pi
    std::vector<std::string> labels;
    std::vector<int> group_of;       // index into the DegeneracyReport

    int count() const { return static_cast<int>(vectors.cols()); }
    cplx eigenvalue(int k) const { return std::polar(1.0, -angles[k]); }
    void append(const DarkSubspace& other);
};

/// Overlap norm below which the removal state counts as orthogonal to a group.
inline constexpr double kZeroProjection = 1e-12;

DarkSubspace dark_states(const DegenerateGroup& group, const Propagator& u, const StateVector& removal,
                         DarkMethod method, int group_index = 0);

/// Dark states of every group, concatenated.
DarkSubspace find_dark_subspace(const Propagator& u, const StateVector& removal, DarkMethod method,
                                double tol = kDefaultDegeneracyTol);

/// Sines of the principal angles between the column spans of two
/// orthonormal bases (largest first); empty if the dimensions differ.
std::vector<double> principal_angle_sines(const CMatrix& a, const CMatrix& b);

enum class ZetaKind { dark, bright, trivial_zero };

const char* to_string(ZetaKind kind);

inline constexpr double kDarkModulus = 1.0 - 1e-8;
inline constexpr double kZeroModulus = 1e-12;
inline constexpr double kIllConditioned = 1e10;
inline constexpr Index kMaxDenseSpectrumDim = 4096;

/// Eigen-decomposition of F with biorthogonal left/right vectors,
/// normalized so <l_k|r_k> = 1.
/// Vectors are stored in the eigen-coordinates of `propagator`.
struct FiltrationSpectrum {
    std::shared_ptr<const Propagator> propagator;
    CVector eigenvalues;
    CMatrix right;               // |zeta_k^r>, unit-norm columns
    CMatrix left;                // |zeta_k^l>, columns, <l_k|r_k> = 1
    std::vector<ZetaKind> kinds;
    CVector overlaps;            // eta_k = <l_k|psi0>
    double condition = 1.0;      // 2-norm condition number of `right`
    bool degraded = false;       // condition above kIllConditioned

    std::vector<cplx> bright() const;
    int count(ZetaKind kind) const;
    /// sum_k eta_k zeta_k^n |r_k>, unnormalized, ambient basis.
    CVector reconstruct(long n) const;
};

FiltrationSpectrum spectral_decomposition(const FiltrationSetup& setup, const StateVector& initial);

/// Dense F = (1 - |r><r|) U.
CMatrix filtration_matrix(const FiltrationSetup& setup);

/// Normalized sum_delta e^{-i n angle_delta} <Phi_delta|psi0> |Phi_delta>.
/// Throws NumericalError if psi0 has no dark component.
StateVector long_time_state(const DarkSubspace& dark, const StateVector& initial, long n);

struct FiltrationTime {
    std::optional<long> n_eps;  // smallest n with Q_n >= 1 - eps
    double max_fidelity = 0.0;
    long argmax = 0;
};

FiltrationTime filtration_time(const Trajectory& trajectory, double epsilon);

}  // namespace darkfilter
