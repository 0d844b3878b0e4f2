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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "darkfilter/config.hpp"
#include "darkfilter/csv.hpp"
#include "darkfilter/filtration.hpp"
#include "darkfilter/spectral.hpp"

namespace darkfilter {

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

enum class Command { tower_check, filter_run, dark_states, bright_spectrum, scaling_sweep, table1, perturb, goe_demo, zeta_scan };

const char* to_string(Command c);
std::optional<Command> command_from_string(const std::string& name);
std::vector<std::string> command_names();

/// In-memory result of one run: the tables that get written, a JSON results
/// object and the invariant checks.
struct RunReport {
    std::vector<std::pair<std::string, CsvTable>> tables;  // file name, contents
    std::string results_json = "{}";
    std::vector<Check> checks;

    bool ok() const;
    void check(std::string name, bool passed, std::string detail = {});
};

struct RunArtifacts {
    std::filesystem::path directory;
    std::vector<std::filesystem::path> files;  // CSVs, then metadata.json
    std::string metadata;                      // metadata.json text
    std::vector<Check> checks;
    double wall_seconds = 0.0;                 // not part of metadata.json

    bool ok() const;
};

/// Runs `command`, writes its tables plus metadata.json into `out`.
RunArtifacts run_experiment(Command command, const ExperimentSpec& spec, const std::filesystem::path& out);

/// Same as run_experiment without touching the filesystem.
RunReport run_report(Command command, const ExperimentSpec& spec);

// Drivers. Each validates its inputs first and throws ValidationError on bad
// specs; invariant failures are reported as failed checks.

struct TowerCheckRow {
    int sites = 0;
    double sga = 0.0;
    double eigen = 0.0;         // max over tower states
    double orthonormality = 0.0;
};

std::vector<TowerCheckRow> tower_check(const ExperimentSpec& spec);

struct TargetRun {
    int sites = 0;
    double theta0 = 0.0;
    double tau = 0.0;
    Trajectory trajectory;
    FiltrationTime time;
    std::optional<double> string_law_deviation;  // max over n >= n_eps (tar2)
    std::optional<long> string_law_from;
};

/// Filters toward the configured target (tar1 or tar2) at chain length `sites`.
/// `string_from` additionally evaluates the tar2 string law from that step.
TargetRun run_target(const ExperimentSpec& spec, int sites, bool record_string = true,
                     std::optional<long> string_from = std::nullopt);

/// Max over n in [from, end] of | |<X>_n| - |cos(theta0 + 2 n h tau)| |.
double string_law_deviation(const Trajectory& trajectory, double theta0, double h_tau, long from);

struct DarkStateRow {
    std::string label;
    double angle = 0.0;
    double removal_overlap = 0.0;   // |<psi_r|Phi>|
    double eigen_residual = 0.0;    // |U Phi - e^{-i angle} Phi|
    double orthonormality = 0.0;    // max over the set
};

struct DarkStateReport {
    DegeneracyReport groups;
    DarkSubspace determinant;
    DarkSubspace complement;
    double max_principal_sine = 0.0;
    std::vector<DarkStateRow> rows;
    double max_removal_overlap = 0.0;
    double max_eigen_residual = 0.0;
    double orthonormality = 0.0;
};

DarkStateReport dark_state_report(const FiltrationSetup& setup, double tol = kDefaultDegeneracyTol);

struct Table1Row {
    HTau h_tau;
    int expected = 0;
    DarkStateReport report;
    std::optional<StateVector> long_time;  // n = 0 long-time state, if psi0 has a dark part
};

/// Resonances scanned by `table1` with their expected dark counts.
std::vector<std::pair<HTau, int>> table1_cases();

std::vector<Table1Row> table1_scan(const ExperimentSpec& spec);

struct BrightAnalysis {
    ChargePicture charges;
    BrightSpectrum secular;
    BrightSpectrum dense;
    FiltrationSpectrum spectrum;
    double cross_distance = 0.0;       // secular vs dense
    double max_force_residual = 0.0;
    bool roots_in_hull = true;
    double reconstruction_error = 0.0;  // relative, n <= 50
};

BrightAnalysis bright_analysis(const FiltrationSetup& setup, const StateVector& initial,
                               double tol = kDefaultDegeneracyTol);

struct ScalingPoint {
    int sites = 0;
    double theta0 = 0.0;
    std::optional<long> simulated;
    double predicted = 0.0;
};

struct ScalingSweep {
    ScalingVariant variant = ScalingVariant::tar1_orthogonal;
    std::vector<ScalingPoint> points;
};

ScalingSweep sweep_n_epsilon(const ExperimentSpec& spec);

/// Least-squares slope of log2(simulated n_eps) against L over [lo, hi].
double log2_slope(const ScalingSweep& sweep, int lo, int hi);

struct Plateau {
    long begin = 0;
    long end = 0;  // exit time
    double height = 0.0;
    bool exited = false;  // false when the window reaches the end of the run
};

/// Longest window where the 5-point-smoothed |dQ/dn| stays below `slope_tol`.
std::optional<Plateau> detect_plateau(const std::vector<double>& q, double slope_tol = 1e-5);

struct PerturbRun {
    TargetRun run;
    std::optional<Plateau> plateau;
    double edge_residual = 0.0;  // B_0 / B_L eigenstate residual under the perturbed H
};

PerturbRun perturbation_study(const ExperimentSpec& spec);

/// Seeded unit vector with i.i.d. complex Gaussian entries.
CVector random_unit_vector(Index dim, std::uint64_t seed);

/// Real symmetric sample: diagonal variance 2/dim, off-diagonal variance 1/dim.
Eigen::MatrixXd goe_sample(int dim, std::uint64_t seed);

struct GoeRun {
    Eigen::MatrixXd hamiltonian;
    double tau = 0.0;
    double dark_weight = 0.0;     // |<Phi|psi0>|^2
    double dark_residual = 0.0;   // max(|U Phi - e^{-i Emin tau} Phi|, |<r|Phi>|)
    Index dark_index = 0;         // eigenvalue of F closest to e^{-i Emin tau}
    double zeta_d = 0.0;          // largest modulus among the other eigenvalues
    long converged_from = 0;      // first n with |zeta_d|^{2n} < 1e-8
    double max_late_error = 0.0;  // max |survival - dark_weight| for n >= converged_from
    Trajectory trajectory;
    FiltrationSpectrum spectrum;
};

/// Longest run goe_demo will attempt to reach the bright-decay bound.
inline constexpr long kGoeMaxSteps = 10'000'000;

/// Runs max(n_steps, converged_from + 100) steps; ValidationError when that
/// exceeds kGoeMaxSteps.
GoeRun goe_demo(const GoeSpec& goe, long n_steps);

struct ZetaRow {
    int sites = 0;
    int w = 0;
    int w_eff = 0;
    DominantBright dominant;
    BrightSpectrum bright;
};

std::vector<ZetaRow> zeta_vs_L_scan(const ExperimentSpec& spec);

}  // namespace darkfilter
