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

// Acceptance harness: one PASS/FAIL line per criterion.
//   acceptance [--criterion N]... [--configs DIR]
// DARKFILTER_EXTENDED=1 adds the L=10 perturbation run as an INFO line.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include "darkfilter/experiments.hpp"

namespace fs = std::filesystem;
using namespace darkfilter;

namespace {

fs::path g_configs = DARKFILTER_CONFIG_DIR;

struct Verdict {
    bool pass = false;
    std::string detail;
};

ExperimentSpec load(const std::string& name) {
    std::ifstream is(g_configs / name, std::ios::binary);
    if (!is) throw ValidationError("cannot read " + (g_configs / name).string());
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

std::string fmt(double v, int digits = 3) {
    std::ostringstream os;
    os << std::setprecision(digits) << v;
    return os.str();
}

std::string sci(double v) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(2) << v;
    return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Appends "; runtime Xs (limit Ys)" and fails the verdict when over budget.
Verdict timed(double limit, const std::function<Verdict()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v = body();
    const double t = seconds_since(t0);
    v.detail += "; runtime " + fmt(t) + " s (limit " + fmt(limit) + " s)";
    v.pass = v.pass && t < limit;
    return v;
}

std::string failed_checks(const RunReport& r) {
    std::string s;
    for (const auto& c : r.checks) {
        if (!c.passed) s += (s.empty() ? "" : "; ") + c.name + (c.detail.empty() ? "" : " [" + c.detail + "]");
    }
    return s;
}

Verdict c1_algebra() {
    return timed(10, [] {
        const ExperimentSpec spec = load("tower_check.json");
        double worst = 0.0;
        int count = 0;
        for (const auto& row : tower_check(spec)) {
            worst = std::max({worst, row.sga, row.eigen});
            ++count;
        }
        return Verdict{count == 5 && worst < 1e-10,
                       "L=4..8, J3=" + fmt(spec.chain.J3) + ": max SGA/eigen residual " + sci(worst)};
    });
}

Verdict c2_table() {
    return timed(30, [] {
        const RunReport r = run_report(Command::table1, load("table1.json"));
        std::string counts;
        for (const auto& row : table1_scan(load("table1.json"))) {
            counts += (counts.empty() ? "" : " ") + std::to_string(row.h_tau.p) + "pi/" + std::to_string(row.h_tau.q) + ":" +
                      std::to_string(row.report.determinant.count());
        }
        return Verdict{r.ok(), "dark counts " + counts + (r.ok() ? "" : "; " + failed_checks(r))};
    });
}

Verdict c3_ghz() {
    return timed(300, [] {
        const ExperimentSpec spec = load("ghz_sweep.json");
        const ScalingSweep sweep = sweep_n_epsilon(spec);
        bool reached = true, band = true;
        std::string ratios;
        for (const auto& p : sweep.points) {
            reached = reached && p.simulated.has_value();
            if (p.sites >= 8 && p.simulated) {
                const double ratio = static_cast<double>(*p.simulated) / p.predicted;
                band = band && std::abs(ratio - 1.0) <= 0.30;
                ratios += (ratios.empty() ? "" : " ") + std::to_string(p.sites) + ":" + fmt(ratio);
            }
        }
        const double slope = log2_slope(sweep, spec.L_range->first, spec.L_range->second);
        const double slope_hi = log2_slope(sweep, 8, spec.L_range->second);
        const bool slope_ok = std::abs(slope - 1.0) <= 0.15;
        std::string detail = std::string("Q>=0.99 reached for all L: ") + (reached ? "yes" : "no") +
                             "; n_eps/prediction " + ratios + (band ? " (within 30%)" : " (outside 30%)") +
                             "; log2 slope L=" + std::to_string(spec.L_range->first) + ".." +
                             std::to_string(spec.L_range->second) + " = " + fmt(slope, 4) + (slope_ok ? "" : " (outside 1.0 +/- 0.15)") +
                             "; L=8.." + std::to_string(spec.L_range->second) + " slope " + fmt(slope_hi, 4);
        return Verdict{reached && band && slope_ok, detail};
    });
}

Verdict c4_cat() {
    return timed(120, [] {
        const ExperimentSpec spec = load("cat_L14.json");
        const TargetRun run = run_target(spec, 14, true, 400L);
        const bool time_ok = run.time.n_eps && *run.time.n_eps >= 1000 && *run.time.n_eps <= 3000;
        const double dev = run.string_law_deviation.value_or(1.0);
        const bool law_ok = dev <= 0.01;
        long settle = -1;
        for (long n = run.trajectory.steps(); n >= 400; --n) {
            const double law = std::abs(std::cos(run.theta0 + 2.0 * n * spec.h_tau_at(14)));
            if (std::abs(std::abs(run.trajectory.string_value[static_cast<std::size_t>(n)]) - law) > 0.01) {
                settle = n + 1;
                break;
            }
        }
        return Verdict{time_ok && law_ok,
                       "n_eps = " + (run.time.n_eps ? std::to_string(*run.time.n_eps) : std::string("none")) +
                           (time_ok ? " (in 1000..3000)" : " (outside 1000..3000)") + "; max string-law deviation n>=400 = " +
                           fmt(dev, 4) + (law_ok ? "" : " (> 0.01)") +
                           (settle > 0 ? "; deviation stays <= 0.01 only from n = " + std::to_string(settle) : "")};
    });
}

Verdict c5_secular() {
    return timed(60, [] {
        struct Case {
            std::string name;
            FilterProblem prob;
        };
        std::vector<Case> cases;
        const ExperimentSpec t1 = load("table1.json");
        for (const auto& [h_tau, expected] : table1_cases()) {
            (void)expected;
            cases.push_back({"L=6 h tau=" + std::to_string(h_tau.p) + "pi/" + std::to_string(h_tau.q),
                             reduced_setup(t1.chain, h_tau.value() / t1.chain.h, t1.theta0(6))});
        }
        const ExperimentSpec sweep = load("ghz_sweep.json");
        for (int L = sweep.L_range->first; L <= std::min(8, sweep.L_range->second); ++L) {
            ChainParams p = sweep.chain;
            p.sites = L;
            cases.push_back({"tar1 L=" + std::to_string(L), reduced_setup(p, sweep.tau_at(L), sweep.theta0(L))});
        }
        bool ok = true;
        double worst = 0.0;
        std::string bad, uncharged;
        for (const auto& c : cases) {
            const BrightAnalysis a = bright_analysis(c.prob.setup, c.prob.initial);
            const int w_eff = static_cast<int>(a.charges.active().size());
            const bool count_ok = static_cast<int>(a.secular.roots.size()) == w_eff - 1 &&
                                  a.secular.roots.size() == a.dense.roots.size();
            const bool this_ok = count_ok && a.cross_distance < 1e-8 && a.roots_in_hull;
            worst = std::max(worst, a.cross_distance);
            if (!this_ok) bad += (bad.empty() ? "" : ", ") + c.name;
            if (a.charges.w() != w_eff) {
                uncharged += (uncharged.empty() ? "" : ", ") + c.name + " (w=" + std::to_string(a.charges.w()) +
                             ", charged " + std::to_string(w_eff) + ")";
            }
            ok = ok && this_ok;
        }
        return Verdict{ok, std::to_string(cases.size()) + " cases; max secular/dense distance " + sci(worst) +
                               (bad.empty() ? "" : "; failing: " + bad) +
                               (uncharged.empty() ? "" : "; uncharged groups excluded from w: " + uncharged)};
    });
}

Verdict c6_zeta() {
    return timed(60, [] {
        const ExperimentSpec spec = load("zeta_scan.json");
        const RunReport r = run_report(Command::zeta_scan, spec);
        const auto rows = zeta_vs_L_scan(spec);
        return Verdict{r.ok() && rows.front().sites == 4 && rows.back().sites == 16,
                       "|zeta_d| from " + fmt(std::abs(rows.front().dominant.zeta), 4) + " (L=4) to " +
                           fmt(std::abs(rows.back().dominant.zeta), 4) + " (L=16)" + (r.ok() ? "" : "; " + failed_checks(r))};
    });
}

Verdict c7_goe() {
    return timed(60, [] {
        const ExperimentSpec spec = load("goe.json");
        const GoeRun g = goe_demo(*spec.goe, spec.n_steps);
        const bool ok = spec.goe->dim == 64 && g.max_late_error < 1e-6 && g.dark_residual < 1e-10;
        return Verdict{ok, "D=" + std::to_string(spec.goe->dim) + " seed " + std::to_string(spec.goe->seed) +
                               ": |<Phi|psi0>|^2 = " + fmt(g.dark_weight, 6) + ", bound reached at n = " +
                               std::to_string(g.converged_from) + ", max late error " + sci(g.max_late_error)};
    });
}

Verdict c8_perturbed() {
    return timed(900, [] {
        const ExperimentSpec ghz = load("perturb_tar1_L8.json");
        const TargetRun a = run_target(ghz, ghz.chain.sites, false);
        const double q_end = a.trajectory.fidelity.at(10000);
        const bool ghz_ok = q_end >= 0.99;
        const PerturbRun cat = perturbation_study(load("perturb_tar2_L8.json"));
        const bool plateau_ok = cat.plateau && cat.plateau->height > 0.3;
        std::string p = "none";
        if (cat.plateau) {
            p = "height " + fmt(cat.plateau->height, 4) + " over n=" + std::to_string(cat.plateau->begin) + ".." +
                std::to_string(cat.plateau->end) + (cat.plateau->exited ? "" : " (to end of run)");
        }
        const auto& q = cat.run.trajectory.fidelity;
        const auto late = q.begin() + static_cast<long>(q.size()) / 2;
        p += "; Q over second half of run in [" + fmt(*std::min_element(late, q.end()), 4) + ", " +
             fmt(*std::max_element(late, q.end()), 4) + "]";
        return Verdict{ghz_ok && plateau_ok, "tar1 Q at n=1e4 = " + fmt(q_end, 4) + (ghz_ok ? "" : " (< 0.99)") +
                                                 "; tar2 plateau " + p + "; edge eigen residual " + sci(cat.edge_residual)};
    });
}

Verdict c9_engines() {
    return timed(60, [] {
        ExperimentSpec spec = load("ghz_L6.json");
        spec.n_steps = std::max(spec.n_steps, 200L);
        spec.engine = Engine::tower;
        const TargetRun t = run_target(spec, 6, true);
        spec.engine = Engine::full;
        const TargetRun f = run_target(spec, 6, true);
        double worst = 0.0;
        for (long n = 0; n <= spec.n_steps; ++n) {
            const auto i = static_cast<std::size_t>(n);
            worst = std::max({worst, std::abs(t.trajectory.survival[i] - f.trajectory.survival[i]),
                              std::abs(t.trajectory.fidelity[i] - f.trajectory.fidelity[i]),
                              std::abs(t.trajectory.string_value[i] - f.trajectory.string_value[i])});
        }
        return Verdict{worst < 1e-10, std::to_string(spec.n_steps) + " steps, max entrywise difference " + sci(worst)};
    });
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        std::ifstream is(e.path(), std::ios::binary);
        std::stringstream ss;
        ss << is.rdbuf();
        out[e.path().filename().string()] = ss.str();
    }
    return out;
}

Verdict c10_determinism() {
    return timed(1800, [] {
        std::vector<std::pair<Command, ExperimentSpec>> runs{
            {Command::tower_check, load("tower_check.json")},   {Command::table1, load("table1.json")},
            {Command::scaling_sweep, load("ghz_sweep.json")},   {Command::filter_run, load("cat_L14.json")},
            {Command::zeta_scan, load("zeta_scan.json")},       {Command::goe_demo, load("goe.json")},
            {Command::perturb, load("perturb_tar1_L8.json")},   {Command::perturb, load("perturb_tar2_L8.json")},
            {Command::filter_run, load("ghz_L6.json")},
        };
        for (int L = 6; L <= 8; ++L) {
            ExperimentSpec s = load("ghz_L6.json");
            s.chain.sites = L;
            s.h_tau = HTau{1, L};
            runs.emplace_back(Command::bright_spectrum, s);
        }
        ExperimentSpec full = load("ghz_L6.json");
        full.engine = Engine::full;
        runs.emplace_back(Command::filter_run, full);

        const fs::path root = fs::temp_directory_path() / "darkfilter_acceptance_determinism";
        int files = 0;
        std::string diff;
        for (std::size_t i = 0; i < runs.size(); ++i) {
            std::map<std::string, std::string> first;
            for (int pass = 0; pass < 2; ++pass) {
                const fs::path dir = root / (std::to_string(i) + "_" + std::to_string(pass));
                fs::remove_all(dir);
                run_experiment(runs[i].first, runs[i].second, dir);
                auto snap = snapshot(dir);
                fs::remove_all(dir);
                if (pass == 0) {
                    first = std::move(snap);
                    files += static_cast<int>(first.size());
                } else if (snap != first) {
                    diff += (diff.empty() ? "" : ", ") + std::string(to_string(runs[i].first)) + " #" + std::to_string(i);
                }
            }
        }
        fs::remove_all(root);
        return Verdict{diff.empty(), std::to_string(runs.size()) + " runs, " + std::to_string(files) +
                                         " files compared byte-for-byte" + (diff.empty() ? "" : "; differing: " + diff)};
    });
}

void extended_l10() {
    const auto t0 = std::chrono::steady_clock::now();
    const PerturbRun r = perturbation_study(load("perturb_tar2_L10.json"));
    std::cout << "INFO extended L=10 tar2 perturbed: ";
    if (r.plateau) {
        std::cout << "plateau height " << fmt(r.plateau->height, 4) << " over n=" << r.plateau->begin << ".." << r.plateau->end;
    } else {
        std::cout << "no plateau";
    }
    std::cout << "; runtime " << fmt(seconds_since(t0)) << " s" << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--criterion" && i + 1 < argc) {
            selected.insert(std::atoi(argv[++i]));
        } else if (a == "--configs" && i + 1 < argc) {
            g_configs = argv[++i];
        } else {
            std::cerr << "usage: acceptance [--criterion N]... [--configs DIR]\n";
            return 64;
        }
    }
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"algebraic exactness", c1_algebra},      {"resonance table", c2_table},
        {"GHZ preparation", c3_ghz},              {"dynamical cat state", c4_cat},
        {"spectral cross-oracle", c5_secular},    {"dominant-eigenvalue scan", c6_zeta},
        {"random-matrix benchmark", c7_goe},      {"perturbed metastability", c8_perturbed},
        {"engine equivalence", c9_engines},       {"determinism", c10_determinism},
    };
    bool all = true;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const int id = static_cast<int>(k) + 1;
        if (!selected.empty() && !selected.count(id)) continue;
        Verdict v;
        try {
            v = criteria[k].second();
        } catch (const std::exception& e) {
            v = Verdict{false, std::string("error: ") + e.what()};
        }
        std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << criteria[k].first << "): " << v.detail
                  << std::endl;
        all = all && v.pass;
    }
    const char* ext = std::getenv("DARKFILTER_EXTENDED");
    if (ext && std::string(ext) == "1" && (selected.empty() || selected.count(8))) extended_l10();
    return all ? 0 : 1;
}
