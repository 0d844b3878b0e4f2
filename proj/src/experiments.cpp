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

#include "darkfilter/experiments.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <nlohmann/json.hpp>
#include <sstream>

#include "darkfilter/rng.hpp"
#include "darkfilter/version.hpp"

namespace darkfilter {
namespace {

using nlohmann::ordered_json;

constexpr double kInvariantTol = 1e-10;
constexpr double kSubspaceTol = 1e-8;
constexpr double kRootTol = 1e-8;
constexpr double kMonotoneSlack = 1e-12;
constexpr double kScalingBand = 0.30;
constexpr double kGoeBrightFloor = 1e-8;
constexpr double kGoeTol = 1e-6;

std::vector<int> sites_of(const ExperimentSpec& spec) {
    std::vector<int> out;
    if (spec.L_range) {
        for (int L = spec.L_range->first; L <= spec.L_range->second; ++L) out.push_back(L);
    } else {
        out.push_back(spec.chain.sites);
    }
    return out;
}

ChainParams chain_at(const ExperimentSpec& spec, int sites) {
    ChainParams p = spec.chain;
    p.sites = sites;
    return p;
}

std::string sci(double v) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
}

FilterProblem problem_for(const ExperimentSpec& spec, int sites, double theta0) {
    const ChainParams p = chain_at(spec, sites);
    const double tau = spec.tau_at(sites);
    if (spec.engine == Engine::tower) return reduced_setup(p, tau, theta0);
    FilterProblem prob = full_setup(p, tau, theta0, spec.lambda > 0.0, spec.cap);
    if (spec.lambda > 0.0) {
        if (!spec.seed) throw ValidationError("config key 'seed': required when lambda > 0 (removal noise is random)");
        const CVector nu = random_unit_vector(prob.setup.propagator->dimension(), *spec.seed);
        prob.setup = with_removal(prob.setup, prob.setup.removal.amplitudes + spec.lambda * nu);
    }
    return prob;
}

TargetState target_for(const ExperimentSpec& spec, int sites, double theta0, double tau) {
    TargetState t = spec.target == TargetKind::tar1 ? tar1_target(sites) : tar2_target(sites, theta0, tau, spec.chain.h);
    if (spec.engine == Engine::tower) return t;
    ChainParams tp = chain_at(spec, sites);
    tp.J2 = 0.0;
    return embed_target(t, build_tower(tp, spec.cap));
}

bool survival_monotone(const Trajectory& t) {
    for (std::size_t n = 1; n < t.survival.size(); ++n) {
        if (t.survival[n] > t.survival[n - 1] * (1.0 + kMonotoneSlack)) return false;
    }
    return true;
}

bool fidelity_bounded(const Trajectory& t) {
    return std::all_of(t.fidelity.begin(), t.fidelity.end(),
                       [](double q) { return q >= 0.0 && q <= 1.0 + kInvariantTol; });
}

// Every step up to `dense_until`, then steps growing by 1% plus the last one.
CsvTable trajectory_table(const Trajectory& t, long dense_until = std::numeric_limits<long>::max()) {
    CsvTable table{schema::trajectory, {}};
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const long last = t.steps();
    for (long n = 0; n <= last;) {
        const auto i = static_cast<std::size_t>(n);
        const double q = t.has_fidelity() ? t.fidelity[i] : nan;
        const cplx x = t.has_observable() ? t.string_value[i] : cplx(nan, nan);
        table.add({static_cast<std::int64_t>(n), t.survival[i], q, x.real(), x.imag()});
        if (n == last) break;
        n = n < dense_until ? n + 1 : std::min(last, std::max(n + 1, static_cast<long>(std::ceil(n * 1.01))));
    }
    return table;
}

void add_spectrum_rows(CsvTable& table, const std::vector<cplx>& values, const std::vector<std::string>& kinds) {
    std::vector<std::size_t> order(values.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double ma = std::abs(values[a]);
        const double mb = std::abs(values[b]);
        if (ma != mb) return ma > mb;
        return wrap_angle(std::arg(values[a])) < wrap_angle(std::arg(values[b]));
    });
    for (std::size_t i : order) table.add({values[i].real(), values[i].imag(), std::abs(values[i]), kinds[i]});
}

ordered_json optional_long(const std::optional<long>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

}  // namespace

const char* to_string(Command c) {
    switch (c) {
        case Command::tower_check: return "tower-check";
        case Command::filter_run: return "filter-run";
        case Command::dark_states: return "dark-states";
        case Command::bright_spectrum: return "bright-spectrum";
        case Command::scaling_sweep: return "scaling-sweep";
        case Command::table1: return "table1";
        case Command::perturb: return "perturb";
        case Command::goe_demo: return "goe-demo";
        case Command::zeta_scan: return "zeta-scan";
    }
    return "?";
}

std::vector<std::string> command_names() {
    std::vector<std::string> out;
    for (int c = 0; c <= static_cast<int>(Command::zeta_scan); ++c) out.emplace_back(to_string(static_cast<Command>(c)));
    return out;
}

std::optional<Command> command_from_string(const std::string& name) {
    for (int c = 0; c <= static_cast<int>(Command::zeta_scan); ++c) {
        if (name == to_string(static_cast<Command>(c))) return static_cast<Command>(c);
    }
    return std::nullopt;
}

bool RunReport::ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

void RunReport::check(std::string name, bool passed, std::string detail) {
    checks.push_back(Check{std::move(name), passed, std::move(detail)});
}

bool RunArtifacts::ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

std::vector<TowerCheckRow> tower_check(const ExperimentSpec& spec) {
    std::vector<TowerCheckRow> rows;
    for (int L : sites_of(spec)) {
        const ChainParams p = chain_at(spec, L);
        const ManyBodyOperator h = build_hamiltonian(p, spec.cap);
        const ScarTower tower = build_tower(p, spec.cap);
        rows.push_back(TowerCheckRow{L, sga_residual(p, spec.cap), tower_residual(h, tower),
                                     tower_orthonormality_defect(tower)});
    }
    return rows;
}

double string_law_deviation(const Trajectory& trajectory, double theta0, double h_tau, long from) {
    if (!trajectory.has_observable()) throw ValidationError("trajectory carries no string record");
    double worst = 0.0;
    for (long n = std::max(0L, from); n <= trajectory.steps(); ++n) {
        const double law = std::abs(std::cos(theta0 + 2.0 * static_cast<double>(n) * h_tau));
        worst = std::max(worst, std::abs(std::abs(trajectory.string_value[static_cast<std::size_t>(n)]) - law));
    }
    return worst;
}

TargetRun run_target(const ExperimentSpec& spec, int sites, bool record_string, std::optional<long> string_from) {
    if (spec.target == TargetKind::none) throw ValidationError("config key 'target': a filtration run needs tar1 or tar2");
    TargetRun out;
    out.sites = sites;
    out.theta0 = spec.theta0(sites);
    out.tau = spec.tau_at(sites);
    const FilterProblem prob = problem_for(spec, sites, out.theta0);
    FiltrationOptions options;
    options.target = target_for(spec, sites, out.theta0, out.tau);

    double reachable = 0.0;
    std::ostringstream overlaps;
    for (const auto& c : options.target->components) {
        const double o = std::abs(c.vector.dot(prob.initial.amplitudes));
        reachable = std::max(reachable, o);
        overlaps << (overlaps.tellp() > 0 ? ", " : "") << sci(o);
    }
    if (reachable < 1e-12) {
        throw ValidationError("initial state has no overlap with the target's dark states (overlaps: " + overlaps.str() +
                              "); filtration cannot reach it");
    }

    std::optional<ManyBodyOperator> x;
    if (record_string) {
        x = spec.engine == Engine::tower ? tower_string_operator(sites) : string_operator(sites, spec.cap);
        options.observable = &*x;
    }
    out.trajectory = run_filtration(prob.setup, prob.initial, spec.n_steps, options);
    out.time = filtration_time(out.trajectory, spec.epsilon);
    if (record_string && spec.target == TargetKind::tar2) {
        const std::optional<long> from = string_from ? string_from : out.time.n_eps;
        if (from && *from <= out.trajectory.steps()) {
            out.string_law_from = from;
            out.string_law_deviation = string_law_deviation(out.trajectory, out.theta0, spec.h_tau_at(sites), *from);
        }
    }
    return out;
}

DarkStateReport dark_state_report(const FiltrationSetup& setup, double tol) {
    const Propagator& u = *setup.propagator;
    DarkStateReport rep;
    rep.groups = degeneracy_groups(u, tol);
    rep.determinant = DarkSubspace{u.basis(), CMatrix(u.dimension(), 0), {}, {}, {}};
    rep.complement = rep.determinant;
    for (std::size_t i = 0; i < rep.groups.groups.size(); ++i) {
        const auto& g = rep.groups.groups[i];
        rep.determinant.append(dark_states(g, u, setup.removal, DarkMethod::determinant, static_cast<int>(i)));
        rep.complement.append(dark_states(g, u, setup.removal, DarkMethod::complement, static_cast<int>(i)));
    }
    const auto sines = principal_angle_sines(rep.determinant.vectors, rep.complement.vectors);
    if (rep.determinant.count() != rep.complement.count()) {
        rep.max_principal_sine = 1.0;
    } else {
        rep.max_principal_sine = sines.empty() ? 0.0 : sines.front();
    }
    const DarkSubspace& d = rep.determinant;
    if (d.count() > 0) {
        const CMatrix gram = d.vectors.adjoint() * d.vectors;
        rep.orthonormality = (gram - CMatrix::Identity(d.count(), d.count())).cwiseAbs().maxCoeff();
    }
    for (int k = 0; k < d.count(); ++k) {
        const CVector phi = d.vectors.col(k);
        DarkStateRow row;
        row.label = d.labels[static_cast<std::size_t>(k)];
        row.angle = d.angles[static_cast<std::size_t>(k)];
        row.removal_overlap = std::abs(setup.removal.amplitudes.dot(phi));
        row.eigen_residual = (u.apply(phi) - d.eigenvalue(k) * phi).norm();
        row.orthonormality = rep.orthonormality;
        rep.max_removal_overlap = std::max(rep.max_removal_overlap, row.removal_overlap);
        rep.max_eigen_residual = std::max(rep.max_eigen_residual, row.eigen_residual);
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

std::vector<std::pair<HTau, int>> table1_cases() {
    return {{HTau{1, 6}, 1}, {HTau{1, 5}, 2}, {HTau{1, 4}, 3}, {HTau{1, 3}, 4}, {HTau{2, 5}, 2}, {HTau{1, 2}, 5}};
}

std::vector<Table1Row> table1_scan(const ExperimentSpec& spec) {
    if (spec.chain.sites != 6) throw ValidationError("config key 'L': the resonance table is defined for L = 6");
    if (spec.engine != Engine::tower) throw ValidationError("config key 'engine': the resonance table runs on the tower engine");
    std::vector<Table1Row> rows;
    const double theta0 = spec.theta0(6);
    for (const auto& [h_tau, expected] : table1_cases()) {
        const FilterProblem prob = reduced_setup(chain_at(spec, 6), h_tau.value() / spec.chain.h, theta0);
        Table1Row row{h_tau, expected, dark_state_report(prob.setup, spec.degeneracy_tol), std::nullopt};
        if (row.report.determinant.count() > 0) {
            try {
                row.long_time = long_time_state(row.report.determinant, prob.initial, 0);
            } catch (const NumericalError&) {
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

BrightAnalysis bright_analysis(const FiltrationSetup& setup, const StateVector& initial, double tol) {
    BrightAnalysis out;
    out.charges = charge_picture(setup, tol);
    out.secular = bright_secular_roots(out.charges);
    out.spectrum = spectral_decomposition(setup, initial);
    out.dense = dense_bright(out.spectrum);
    out.cross_distance = out.secular.roots.empty() && out.dense.roots.empty()
                             ? 0.0
                             : spectrum_distance(out.secular.roots, out.dense.roots);
    for (cplx z : out.secular.roots) {
        out.max_force_residual = std::max(out.max_force_residual, force_residual(out.charges, z));
        out.roots_in_hull = out.roots_in_hull && inside_phase_hull(out.charges, z);
    }
    const Propagator& u = *setup.propagator;
    const CVector& r = setup.removal.amplitudes;
    CVector direct = initial.amplitudes;
    for (long n = 0; n <= 50; ++n) {
        if (n > 0) {
            direct = u.apply(direct);
            direct -= r * r.dot(direct);
        }
        out.reconstruction_error = std::max(out.reconstruction_error, (out.spectrum.reconstruct(n) - direct).norm());
    }
    return out;
}

ScalingSweep sweep_n_epsilon(const ExperimentSpec& spec) {
    if (spec.engine != Engine::tower) throw ValidationError("config key 'engine': the scaling sweep runs on the tower engine");
    if (spec.target == TargetKind::none) throw ValidationError("config key 'target': the scaling sweep needs tar1 or tar2");
    ScalingSweep sweep;
    if (spec.variant) {
        sweep.variant = *spec.variant;
    } else if (spec.target == TargetKind::tar2) {
        sweep.variant = ScalingVariant::tar2;
    } else {
        sweep.variant = spec.theta0_rule == Theta0Rule::orthogonal ? ScalingVariant::tar1_orthogonal
                                                                   : ScalingVariant::tar1_general;
    }
    if ((sweep.variant == ScalingVariant::tar2) != (spec.target == TargetKind::tar2)) {
        throw ValidationError("config key 'variant': " + std::string(to_string(sweep.variant)) + " does not describe target " +
                              to_string(spec.target));
    }
    for (int L : sites_of(spec)) {
        ScalingPoint pt;
        pt.sites = L;
        pt.theta0 = spec.theta0(L);
        pt.predicted = scaling_prediction(L, pt.theta0, spec.epsilon, sweep.variant);
        const double tau = spec.tau_at(L);
        const FilterProblem prob = reduced_setup(chain_at(spec, L), tau, pt.theta0);
        FiltrationOptions options;
        options.target = target_for(spec, L, pt.theta0, tau);
        options.stop_fidelity = 1.0 - spec.epsilon;
        const long horizon = std::max(spec.n_steps, static_cast<long>(std::ceil(20.0 * pt.predicted)) + 100);
        const Trajectory t = run_filtration(prob.setup, prob.initial, horizon, options);
        pt.simulated = filtration_time(t, spec.epsilon).n_eps;
        sweep.points.push_back(pt);
    }
    return sweep;
}

double log2_slope(const ScalingSweep& sweep, int lo, int hi) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int n = 0;
    for (const auto& p : sweep.points) {
        if (p.sites < lo || p.sites > hi || !p.simulated || *p.simulated <= 0) continue;
        const double x = p.sites;
        const double y = std::log2(static_cast<double>(*p.simulated));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::optional<Plateau> detect_plateau(const std::vector<double>& q, double slope_tol) {
    const auto n = static_cast<long>(q.size());
    if (n < 7) return std::nullopt;
    std::vector<double> smooth(q.size(), 0.0);
    for (long i = 2; i + 2 < n; ++i) {
        double s = 0.0;
        for (long k = i - 2; k <= i + 2; ++k) s += q[static_cast<std::size_t>(k)];
        smooth[static_cast<std::size_t>(i)] = s / 5.0;
    }
    const long first = 3;
    const long last = n - 4;
    long best_begin = -1, best_end = -1;
    long run_begin = -1;
    for (long i = first; i <= last + 1; ++i) {
        const bool flat = i <= last &&
                          std::abs(smooth[static_cast<std::size_t>(i + 1)] - smooth[static_cast<std::size_t>(i - 1)]) / 2.0 < slope_tol;
        if (flat) {
            if (run_begin < 0) run_begin = i;
        } else if (run_begin >= 0) {
            if (i - run_begin > best_end - best_begin + 1 || best_begin < 0) {
                best_begin = run_begin;
                best_end = i - 1;
            }
            run_begin = -1;
        }
    }
    if (best_begin < 0) return std::nullopt;
    Plateau p;
    p.begin = best_begin;
    p.end = best_end;
    double sum = 0.0;
    for (long i = best_begin; i <= best_end; ++i) sum += q[static_cast<std::size_t>(i)];
    p.height = sum / static_cast<double>(best_end - best_begin + 1);
    p.exited = best_end < last;
    return p;
}

PerturbRun perturbation_study(const ExperimentSpec& spec) {
    if (spec.engine != Engine::full) throw ValidationError("config key 'engine': perturbation studies need the full engine");
    PerturbRun out;
    out.run = run_target(spec, spec.chain.sites, true);
    out.plateau = detect_plateau(out.run.trajectory.fidelity);
    const ChainParams p = chain_at(spec, spec.chain.sites);
    const ManyBodyOperator h = build_hamiltonian(p, spec.cap);
    const Index dim = pow3(p.sites);
    for (Index idx : {Index{0}, dim - 1}) {
        StateVector edge{Basis::full(p.sites), CVector::Zero(dim)};
        edge.amplitudes(idx) = 1.0;
        out.edge_residual = std::max(out.edge_residual, eigenstate_residual(h, edge));
    }
    return out;
}

CVector random_unit_vector(Index dim, std::uint64_t seed) {
    Philox4x32 rng(seed);
    CVector v(dim);
    for (Index i = 0; i < dim; ++i) {
        const double re = rng.next_normal();
        const double im = rng.next_normal();
        v(i) = cplx(re, im);
    }
    return v / v.norm();
}

Eigen::MatrixXd goe_sample(int dim, std::uint64_t seed) {
    if (dim < 1) throw ValidationError("random matrix dimension must be positive");
    Philox4x32 rng(seed);
    Eigen::MatrixXd h(dim, dim);
    const double diag = std::sqrt(2.0 / dim);
    const double off = std::sqrt(1.0 / dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = i; j < dim; ++j) {
            const double x = rng.next_normal() * (i == j ? diag : off);
            h(i, j) = x;
            h(j, i) = x;
        }
    }
    return h;
}

GoeRun goe_demo(const GoeSpec& goe, long n_steps) {
    if (goe.dim < 4) throw ValidationError("config key 'goe': dim must be at least 4");
    GoeRun out;
    out.hamiltonian = goe_sample(goe.dim, goe.seed);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(out.hamiltonian);
    const Eigen::VectorXd& e = eig.eigenvalues();
    const Index last = e.size() - 1;
    out.tau = kTwoPi / (e(last) - e(0));

    auto u = std::make_shared<const Propagator>(dense_propagator(out.hamiltonian, out.tau));
    const Basis b = u->basis();
    StateVector removal{b, CVector::Zero(goe.dim)};
    removal.amplitudes(1) = 1.0;
    StateVector initial{b, CVector::Zero(goe.dim)};
    initial.amplitudes(0) = 1.0;
    const FiltrationSetup setup{u, removal, Engine::full};
    setup.validate();

    const CVector emin = eig.eigenvectors().col(0).cast<cplx>();
    const CVector emax = eig.eigenvectors().col(last).cast<cplx>();
    CVector phi = removal.amplitudes.dot(emin) * emax - removal.amplitudes.dot(emax) * emin;
    phi.normalize();
    out.dark_weight = std::norm(phi.dot(initial.amplitudes));

    const cplx dark_eig = std::polar(1.0, -e(0) * out.tau);
    out.dark_residual = std::max((u->apply(phi) - dark_eig * phi).norm(), std::abs(removal.amplitudes.dot(phi)));

    // Quasi-dark eigenvalues (tiny removal overlap) can sit within any fixed
    // tolerance of the unit circle, so the dark one is picked by its value.
    out.spectrum = spectral_decomposition(setup, initial);
    const CVector& z = out.spectrum.eigenvalues;
    for (Index k = 1; k < z.size(); ++k) {
        if (std::abs(z(k) - dark_eig) < std::abs(z(out.dark_index) - dark_eig)) out.dark_index = k;
    }
    for (Index k = 0; k < z.size(); ++k) {
        if (k != out.dark_index) out.zeta_d = std::max(out.zeta_d, std::abs(z(k)));
    }
    out.converged_from = out.zeta_d > 0.0
                             ? static_cast<long>(std::ceil(std::log(kGoeBrightFloor) / (2.0 * std::log(out.zeta_d))))
                             : 0;
    if (out.converged_from + 100 > kGoeMaxSteps) {
        throw ValidationError("random-matrix sample needs " + std::to_string(out.converged_from) +
                              " steps before the bright bound drops below 1e-8 (|zeta_d| = 1 - " + sci(1.0 - out.zeta_d) +
                              "); limit is " + std::to_string(kGoeMaxSteps) + ", try another seed");
    }
    const long horizon = std::max(n_steps, out.converged_from + 100);
    FiltrationOptions options;
    options.target = TargetState::fixed(StateVector{b, phi});
    out.trajectory = run_filtration(setup, initial, horizon, options);
    for (long n = out.converged_from; n <= out.trajectory.steps(); ++n) {
        out.max_late_error =
            std::max(out.max_late_error, std::abs(out.trajectory.survival[static_cast<std::size_t>(n)] - out.dark_weight));
    }
    return out;
}

std::vector<ZetaRow> zeta_vs_L_scan(const ExperimentSpec& spec) {
    if (spec.engine != Engine::tower) throw ValidationError("config key 'engine': the zeta scan runs on the tower engine");
    const HTau h_tau = spec.h_tau.value_or(HTau{1, 4});
    std::vector<ZetaRow> rows;
    for (int L : sites_of(spec)) {
        const FilterProblem prob = reduced_setup(chain_at(spec, L), h_tau.value() / spec.chain.h, 0.0);
        ZetaRow row;
        row.sites = L;
        const ChargePicture cp = charge_picture(prob.setup, spec.degeneracy_tol);
        row.w = cp.w();
        row.w_eff = static_cast<int>(cp.active().size());
        row.bright = bright_secular_roots(cp);
        if (!row.bright.roots.empty()) row.dominant = dominant_bright(row.bright);
        rows.push_back(std::move(row));
    }
    return rows;
}

RunReport run_report(Command command, const ExperimentSpec& spec) {
    validate_spec(spec);
    RunReport rep;
    ordered_json res = ordered_json::object();
    switch (command) {
        case Command::tower_check: {
            CsvTable t{{"L", "sga_residual", "max_eigen_residual", "orthonormality_defect"}, {}};
            double worst = 0.0;
            for (const auto& row : tower_check(spec)) {
                t.add({static_cast<std::int64_t>(row.sites), row.sga, row.eigen, row.orthonormality});
                worst = std::max({worst, row.sga, row.eigen, row.orthonormality});
            }
            res["max_residual"] = worst;
            rep.check("tower residuals below 1e-10", worst < kInvariantTol, "max " + sci(worst));
            rep.tables.emplace_back("tower_check.csv", std::move(t));
            break;
        }
        case Command::filter_run:
        case Command::perturb: {
            TargetRun run;
            if (command == Command::perturb) {
                PerturbRun pr = perturbation_study(spec);
                res["edge_eigen_residual"] = pr.edge_residual;
                rep.check("fully polarized states stay eigenstates", pr.edge_residual < kInvariantTol,
                          "residual " + sci(pr.edge_residual));
                if (pr.plateau) {
                    res["plateau"] = {{"begin", pr.plateau->begin},
                                      {"end", pr.plateau->end},
                                      {"height", pr.plateau->height},
                                      {"exited", pr.plateau->exited}};
                } else {
                    res["plateau"] = nullptr;
                }
                run = std::move(pr.run);
            } else {
                run = run_target(spec, spec.chain.sites, true);
            }
            const Trajectory& t = run.trajectory;
            res["L"] = run.sites;
            res["theta0"] = run.theta0;
            res["tau"] = run.tau;
            res["n_eps"] = optional_long(run.time.n_eps);
            res["max_fidelity"] = run.time.max_fidelity;
            res["argmax"] = run.time.argmax;
            res["final_fidelity"] = t.fidelity.back();
            res["final_survival"] = t.survival.back();
            res["depleted"] = t.depleted;
            if (run.string_law_deviation) {
                res["string_law_from"] = *run.string_law_from;
                res["string_law_deviation"] = *run.string_law_deviation;
            }
            if (spec.lambda == 0.0 && spec.chain.J2 == 0.0) {
                rep.check("survival non-increasing", survival_monotone(t));
            }
            rep.check("fidelity within [0, 1]", fidelity_bounded(t));
            if (command == Command::filter_run && run.string_law_deviation) {
                const double tol = std::sqrt(spec.epsilon);
                rep.check("string law after n_eps", *run.string_law_deviation <= tol,
                          "deviation " + sci(*run.string_law_deviation) + " vs " + sci(tol));
            }
            rep.tables.emplace_back("trajectory.csv", trajectory_table(t));
            break;
        }
        case Command::dark_states: {
            const int L = spec.chain.sites;
            const FilterProblem prob = problem_for(spec, L, spec.theta0(L));
            const DarkStateReport d = dark_state_report(prob.setup, spec.degeneracy_tol);
            CsvTable t{{"label", "angle_rad", "removal_overlap", "eigen_residual"}, {}};
            for (const auto& row : d.rows) t.add({row.label, row.angle, row.removal_overlap, row.eigen_residual});
            rep.tables.emplace_back("dark_states.csv", std::move(t));
            if (spec.engine == Engine::tower) {
                CsvTable v{{"label", "n", "re", "im"}, {}};
                for (int k = 0; k < d.determinant.count(); ++k) {
                    for (Index n = 0; n < d.determinant.vectors.rows(); ++n) {
                        const cplx c = d.determinant.vectors(n, k);
                        v.add({d.determinant.labels[static_cast<std::size_t>(k)], static_cast<std::int64_t>(n), c.real(), c.imag()});
                    }
                }
                rep.tables.emplace_back("dark_vectors.csv", std::move(v));
            }
            res["dark_count"] = d.determinant.count();
            res["groups"] = d.groups.groups.size();
            res["warnings"] = d.groups.warnings;
            rep.check("dark states orthogonal to removal", d.max_removal_overlap < kInvariantTol, sci(d.max_removal_overlap));
            rep.check("dark states are eigenvectors of U", d.max_eigen_residual < kInvariantTol, sci(d.max_eigen_residual));
            rep.check("dark states orthonormal", d.orthonormality < kInvariantTol, sci(d.orthonormality));
            rep.check("determinant and complement constructions agree", d.max_principal_sine < kSubspaceTol,
                      sci(d.max_principal_sine));
            break;
        }
        case Command::bright_spectrum: {
            const int L = spec.chain.sites;
            const FilterProblem prob = problem_for(spec, L, spec.theta0(L));
            const BrightAnalysis a = bright_analysis(prob.setup, prob.initial, spec.degeneracy_tol);
            CsvTable charges{schema::charges, {}};
            for (const auto& c : a.charges.charges) charges.add({c.angle, c.weight});
            CsvTable dense{schema::spectrum, {}};
            std::vector<cplx> values(a.spectrum.eigenvalues.data(), a.spectrum.eigenvalues.data() + a.spectrum.eigenvalues.size());
            std::vector<std::string> kinds;
            for (ZetaKind k : a.spectrum.kinds) kinds.emplace_back(to_string(k));
            add_spectrum_rows(dense, values, kinds);
            CsvTable secular{schema::spectrum, {}};
            add_spectrum_rows(secular, a.secular.roots, std::vector<std::string>(a.secular.roots.size(), "secular"));
            rep.tables.emplace_back("charges.csv", std::move(charges));
            rep.tables.emplace_back("spectrum.csv", std::move(dense));
            rep.tables.emplace_back("secular_roots.csv", std::move(secular));
            const int w_eff = static_cast<int>(a.charges.active().size());
            res["w"] = a.charges.w();
            res["w_eff"] = w_eff;
            res["dark"] = a.spectrum.count(ZetaKind::dark);
            res["bright"] = static_cast<int>(a.dense.roots.size());
            res["condition"] = a.spectrum.condition;
            res["degraded_precision"] = a.spectrum.degraded;
            if (!a.secular.roots.empty()) {
                const DominantBright d = dominant_bright(a.secular);
                res["zeta_d"] = {d.zeta.real(), d.zeta.imag()};
                res["zeta_d_tie"] = d.tie;
            }
            rep.check("charge weights sum to one", std::abs(a.charges.total_weight() - 1.0) < kInvariantTol);
            rep.check("secular root count is w_eff - 1", static_cast<int>(a.secular.roots.size()) == std::max(0, w_eff - 1));
            rep.check("secular roots match dense spectrum", a.cross_distance < kRootTol, sci(a.cross_distance));
            rep.check("secular roots balance forces", a.max_force_residual < kRootTol, sci(a.max_force_residual));
            rep.check("roots inside the phase hull", a.roots_in_hull);
            const double recon_tol = 1e-10 * std::max(1.0, a.spectrum.condition);
            rep.check("spectral reconstruction matches iteration", a.reconstruction_error < recon_tol,
                      sci(a.reconstruction_error) + " vs " + sci(recon_tol));
            break;
        }
        case Command::scaling_sweep: {
            if (!spec.L_range) throw ValidationError("config key 'L_range': required for the scaling sweep");
            const ScalingSweep sweep = sweep_n_epsilon(spec);
            CsvTable t{schema::scaling, {}};
            bool band_ok = true;
            std::string worst;
            for (const auto& p : sweep.points) {
                t.add({static_cast<std::int64_t>(p.sites), static_cast<std::int64_t>(p.simulated.value_or(-1)), p.predicted,
                       std::string(to_string(sweep.variant))});
                if (p.sites >= 8) {
                    const bool ok = p.simulated && p.predicted > 0.0 &&
                                    std::abs(static_cast<double>(*p.simulated) / p.predicted - 1.0) <= kScalingBand;
                    if (!ok) worst += (worst.empty() ? "L=" : ", L=") + std::to_string(p.sites);
                    band_ok = band_ok && ok;
                }
            }
            rep.tables.emplace_back("scaling.csv", std::move(t));
            res["variant"] = to_string(sweep.variant);
            const double slope = log2_slope(sweep, spec.L_range->first, spec.L_range->second);
            res["log2_slope"] = std::isfinite(slope) ? ordered_json(slope) : ordered_json(nullptr);
            rep.check("simulated n_eps within 30% of prediction for L >= 8", band_ok, worst);
            if (spec.theta0_rule == Theta0Rule::parity) {
                bool split = true;
                for (std::size_t i = 1; i + 1 < sweep.points.size(); ++i) {
                    const auto& p = sweep.points[i];
                    if (p.sites % 2 != 0 || !p.simulated) continue;
                    const long lo = sweep.points[i - 1].simulated.value_or(0);
                    const long hi = sweep.points[i + 1].simulated.value_or(0);
                    split = split && *p.simulated > lo && (hi == 0 || *p.simulated > hi / 4);
                }
                rep.check("even L slower than odd neighbours", split);
            }
            break;
        }
        case Command::table1: {
            CsvTable t{{"h_tau_p", "h_tau_q", "dark_count", "expected", "labels"}, {}};
            CsvTable v{{"h_tau_p", "h_tau_q", "n", "re", "im"}, {}};
            ordered_json rows = ordered_json::array();
            for (const auto& row : table1_scan(spec)) {
                const DarkStateReport& d = row.report;
                std::string labels;
                for (const auto& l : d.determinant.labels) labels += (labels.empty() ? "" : ";") + l;
                t.add({static_cast<std::int64_t>(row.h_tau.p), static_cast<std::int64_t>(row.h_tau.q),
                       static_cast<std::int64_t>(d.determinant.count()), static_cast<std::int64_t>(row.expected), labels});
                if (row.long_time) {
                    for (Index n = 0; n < row.long_time->amplitudes.size(); ++n) {
                        const cplx c = row.long_time->amplitudes(n);
                        v.add({static_cast<std::int64_t>(row.h_tau.p), static_cast<std::int64_t>(row.h_tau.q),
                               static_cast<std::int64_t>(n), c.real(), c.imag()});
                    }
                }
                const std::string tag = std::to_string(row.h_tau.p) + "pi/" + std::to_string(row.h_tau.q);
                rep.check("dark count at h tau = " + tag, d.determinant.count() == row.expected,
                          std::to_string(d.determinant.count()) + " vs " + std::to_string(row.expected));
                const double worst = std::max({d.max_removal_overlap, d.max_eigen_residual, d.orthonormality});
                rep.check("dark properties at h tau = " + tag, worst < kInvariantTol, sci(worst));
                rep.check("constructions agree at h tau = " + tag, d.max_principal_sine < kSubspaceTol, sci(d.max_principal_sine));
                rows.push_back({{"h_tau", {row.h_tau.p, row.h_tau.q}}, {"dark_count", d.determinant.count()}, {"labels", labels}});
            }
            res["rows"] = rows;
            rep.tables.emplace_back("table1.csv", std::move(t));
            rep.tables.emplace_back("table1_targets.csv", std::move(v));
            break;
        }
        case Command::goe_demo: {
            if (!spec.goe) throw ValidationError("config key 'goe': required for the random-matrix demo");
            const GoeRun g = goe_demo(*spec.goe, spec.n_steps);
            rep.tables.emplace_back("trajectory.csv", trajectory_table(g.trajectory, spec.n_steps));
            CsvTable s{schema::spectrum, {}};
            std::vector<cplx> values(g.spectrum.eigenvalues.data(), g.spectrum.eigenvalues.data() + g.spectrum.eigenvalues.size());
            std::vector<std::string> kinds;
            for (Index k = 0; k < g.spectrum.eigenvalues.size(); ++k) {
                const ZetaKind kind = g.spectrum.kinds[static_cast<std::size_t>(k)];
                kinds.emplace_back(k == g.dark_index ? "dark" : kind == ZetaKind::trivial_zero ? "zero" : "bright");
            }
            add_spectrum_rows(s, values, kinds);
            rep.tables.emplace_back("spectrum.csv", std::move(s));
            const double dark_modulus = std::abs(g.spectrum.eigenvalues(g.dark_index));
            res["tau"] = g.tau;
            res["dark_weight"] = g.dark_weight;
            res["dark_modulus"] = dark_modulus;
            res["zeta_d_modulus"] = g.zeta_d;
            res["converged_from"] = g.converged_from;
            res["max_late_error"] = g.max_late_error;
            rep.check("analytic dark state is exact", g.dark_residual < kInvariantTol, sci(g.dark_residual));
            rep.check("dark eigenvalue of F is unimodular", std::abs(dark_modulus - 1.0) < kInvariantTol,
                      sci(std::abs(dark_modulus - 1.0)));
            rep.check("survival converges to dark weight", g.max_late_error < kGoeTol, sci(g.max_late_error));
            break;
        }
        case Command::zeta_scan: {
            if (!spec.L_range) throw ValidationError("config key 'L_range': required for the zeta scan");
            const auto rows = zeta_vs_L_scan(spec);
            CsvTable t{{"L", "w", "w_eff", "zeta_d_modulus", "zeta_d_re", "zeta_d_im", "tie"}, {}};
            CsvTable s{{"L", "re", "im", "modulus", "kind"}, {}};
            bool decreasing = true;
            bool counts = true;
            for (std::size_t i = 0; i < rows.size(); ++i) {
                const auto& r = rows[i];
                const cplx z = r.dominant.zeta;
                t.add({static_cast<std::int64_t>(r.sites), static_cast<std::int64_t>(r.w), static_cast<std::int64_t>(r.w_eff),
                       std::abs(z), z.real(), z.imag(), static_cast<std::int64_t>(r.dominant.tie)});
                for (cplx b : r.bright.roots) {
                    s.add({static_cast<std::int64_t>(r.sites), b.real(), b.imag(), std::abs(b), std::string("bright")});
                }
                counts = counts && static_cast<int>(r.bright.roots.size()) == std::max(0, r.w_eff - 1);
                if (i > 0) decreasing = decreasing && std::abs(z) < std::abs(rows[i - 1].dominant.zeta);
            }
            rep.tables.emplace_back("zeta.csv", std::move(t));
            rep.tables.emplace_back("zeta_spectra.csv", std::move(s));
            rep.check("dominant modulus strictly decreasing in L", decreasing);
            rep.check("bright root count is w_eff - 1 at every L", counts);
            break;
        }
    }
    rep.results_json = res.dump();
    return rep;
}

RunArtifacts run_experiment(Command command, const ExperimentSpec& spec, const std::filesystem::path& out) {
    const auto start = std::chrono::steady_clock::now();
    RunReport rep = run_report(command, spec);
    std::filesystem::create_directories(out);

    RunArtifacts art;
    art.directory = out;
    ordered_json meta;
    meta["tool"] = "darkfilter";
    meta["version"] = kVersion;
    meta["command"] = to_string(command);
    meta["rng"] = Philox4x32::kName;
    meta["seed"] = spec.seed ? ordered_json(*spec.seed) : ordered_json(nullptr);
    meta["spec"] = ordered_json::parse(serialize_config(spec));
    meta["results"] = ordered_json::parse(rep.results_json);
    ordered_json checks = ordered_json::array();
    for (const auto& c : rep.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    meta["checks"] = checks;
    ordered_json files = ordered_json::array();
    for (const auto& [name, table] : rep.tables) {
        write_csv(out / name, table);
        art.files.push_back(out / name);
        files.push_back(name);
    }
    meta["files"] = files;
    art.metadata = meta.dump(2) + "\n";
    write_text(out / "metadata.json", art.metadata);
    art.files.push_back(out / "metadata.json");
    art.checks = std::move(rep.checks);
    art.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return art;
}

}  // namespace darkfilter
