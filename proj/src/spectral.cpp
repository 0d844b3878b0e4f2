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

#include "darkfilter/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

namespace darkfilter {
namespace {

double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

double segment_distance(cplx a, cplx b, cplx z) {
    const cplx d = b - a;
    const double t = std::clamp(((z - a) * std::conj(d)).real() / std::norm(d), 0.0, 1.0);
    return std::abs(z - (a + t * d));
}

cplx secular_value(const std::vector<Charge>& charges, cplx z, cplx* derivative) {
    cplx f = 0.0;
    cplx df = 0.0;
    for (const auto& c : charges) {
        const cplx inv = 1.0 / (c.position() - z);
        f += c.weight * inv;
        df += c.weight * inv * inv;
    }
    if (derivative) *derivative = df;
    return f;
}

cplx polish(const std::vector<Charge>& charges, cplx z) {
    cplx best = z;
    double best_res = std::abs(secular_value(charges, z, nullptr));
    for (int it = 0; it < 30 && best_res > 0.0; ++it) {
        cplx df;
        const cplx f = secular_value(charges, z, &df);
        if (df == cplx(0.0)) break;
        z -= f / df;
        const double res = std::abs(secular_value(charges, z, nullptr));
        if (!(res < best_res)) break;
        best = z;
        best_res = res;
    }
    return best;
}

}  // namespace

std::vector<Charge> ChargePicture::active() const {
    std::vector<Charge> out;
    for (const auto& c : charges) {
        if (c.weight > kZeroWeight) out.push_back(c);
    }
    return out;
}

double ChargePicture::total_weight() const {
    double s = 0.0;
    for (const auto& c : charges) s += c.weight;
    return s;
}

ChargePicture charge_picture(const FiltrationSetup& setup, double tol) {
    const Propagator& u = *setup.propagator;
    const DegeneracyReport report = degeneracy_groups(u, tol);
    const CVector r = u.to_eigenbasis(setup.removal.amplitudes);
    ChargePicture cp;
    for (const auto& g : report.groups) {
        double p = 0.0;
        for (Index k : g.members) p += std::norm(r(k));
        cp.charges.push_back(Charge{g.angle, p, g.degeneracy()});
    }
    return cp;
}

std::vector<cplx> secular_polynomial(const std::vector<Charge>& charges) {
    const std::size_t w = charges.size();
    std::vector<cplx> total(w, cplx(0.0));
    for (std::size_t l = 0; l < w; ++l) {
        std::vector<cplx> term{cplx(charges[l].weight)};
        for (std::size_t m = 0; m < w; ++m) {
            if (m == l) continue;
            const cplx a = charges[m].position();
            std::vector<cplx> next(term.size() + 1, cplx(0.0));
            for (std::size_t i = 0; i < term.size(); ++i) {
                next[i] += a * term[i];
                next[i + 1] -= term[i];
            }
            term = std::move(next);
        }
        for (std::size_t i = 0; i < term.size(); ++i) total[i] += term[i];
    }
    return total;
}

BrightSpectrum bright_secular_roots(const ChargePicture& cp) {
    const std::vector<Charge> charges = cp.active();
    BrightSpectrum out;
    out.provenance = Provenance::secular;
    if (charges.size() < 2) return out;
    const std::vector<cplx> coeffs = secular_polynomial(charges);
    const auto degree = static_cast<Index>(coeffs.size()) - 1;
    const cplx lead = coeffs.back();
    if (std::abs(lead) == 0.0) throw NumericalError("secular polynomial has a vanishing leading coefficient");
    CMatrix companion = CMatrix::Zero(degree, degree);
    for (Index i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
    for (Index i = 0; i < degree; ++i) companion(i, degree - 1) = -coeffs[static_cast<std::size_t>(i)] / lead;
    const Eigen::ComplexEigenSolver<CMatrix> solver(companion, false);
    if (solver.info() != Eigen::Success) throw NumericalError("companion eigensolve failed");
    for (Index i = 0; i < degree; ++i) out.roots.push_back(polish(charges, solver.eigenvalues()(i)));
    return out;
}

BrightSpectrum dense_bright(const FiltrationSpectrum& spectrum) {
    BrightSpectrum out;
    out.provenance = Provenance::dense;
    for (Index k = 0; k < spectrum.eigenvalues.size(); ++k) {
        if (spectrum.kinds[static_cast<std::size_t>(k)] != ZetaKind::dark) out.roots.push_back(spectrum.eigenvalues(k));
    }
    // Single-linkage clusters, each member replaced by the cluster mean.
    std::vector<int> cluster(out.roots.size(), -1);
    int clusters = 0;
    for (std::size_t i = 0; i < out.roots.size(); ++i) {
        if (cluster[i] >= 0) continue;
        cluster[i] = clusters;
        std::vector<std::size_t> frontier{i};
        while (!frontier.empty()) {
            const std::size_t a = frontier.back();
            frontier.pop_back();
            for (std::size_t b = 0; b < out.roots.size(); ++b) {
                if (cluster[b] < 0 && std::abs(out.roots[a] - out.roots[b]) < kEigenCluster) {
                    cluster[b] = clusters;
                    frontier.push_back(b);
                }
            }
        }
        ++clusters;
    }
    for (int c = 0; c < clusters; ++c) {
        cplx mean = 0.0;
        int n = 0;
        for (std::size_t i = 0; i < out.roots.size(); ++i) {
            if (cluster[i] == c) {
                mean += out.roots[i];
                ++n;
            }
        }
        if (n < 2) continue;
        mean /= static_cast<double>(n);
        for (std::size_t i = 0; i < out.roots.size(); ++i) {
            if (cluster[i] == c) out.roots[i] = mean;
        }
    }
    if (!out.roots.empty()) {
        auto zero = std::min_element(out.roots.begin(), out.roots.end(),
                                     [](cplx a, cplx b) { return std::abs(a) < std::abs(b); });
        out.roots.erase(zero);
    }
    return out;
}

double force_residual(const ChargePicture& cp, cplx z) { return std::abs(secular_value(cp.active(), z, nullptr)); }

bool inside_phase_hull(const ChargePicture& cp, cplx z, double slack) {
    std::vector<cplx> pts;
    for (const auto& c : cp.active()) pts.push_back(c.position());
    if (pts.empty()) return false;
    if (pts.size() == 1) return std::abs(z - pts[0]) <= slack;
    if (pts.size() == 2) return segment_distance(pts[0], pts[1], z) <= slack;
    std::sort(pts.begin(), pts.end(), [](cplx a, cplx b) { return wrap_angle(std::arg(a)) < wrap_angle(std::arg(b)); });
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const cplx a = pts[i];
        const cplx b = pts[(i + 1) % pts.size()];
        if (cross(b - a, z - a) < -slack * std::abs(b - a)) return false;
    }
    return true;
}

double spectrum_distance(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    std::vector<bool> used_a(a.size(), false);
    std::vector<bool> used_b(b.size(), false);
    double worst = 0.0;
    for (std::size_t round = 0; round < a.size(); ++round) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0;
        std::size_t bj = 0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (used_a[i]) continue;
            for (std::size_t j = 0; j < b.size(); ++j) {
                if (used_b[j]) continue;
                const double d = std::abs(a[i] - b[j]);
                if (d < best) {
                    best = d;
                    bi = i;
                    bj = j;
                }
            }
        }
        used_a[bi] = used_b[bj] = true;
        worst = std::max(worst, best);
    }
    return worst;
}

DominantBright dominant_bright(const BrightSpectrum& bs) {
    if (bs.roots.empty()) throw ValidationError("bright spectrum is empty");
    constexpr double kTieTol = 1e-12;
    double top = 0.0;
    for (cplx z : bs.roots) top = std::max(top, std::abs(z));
    DominantBright out{cplx(0.0), false};
    int contenders = 0;
    double best_angle = std::numeric_limits<double>::infinity();
    for (cplx z : bs.roots) {
        if (top - std::abs(z) > kTieTol) continue;
        ++contenders;
        const double angle = wrap_angle(std::arg(z));
        if (angle < best_angle) {
            best_angle = angle;
            out.zeta = z;
        }
    }
    out.tie = contenders > 1;
    return out;
}

const char* to_string(ScalingVariant v) {
    switch (v) {
        case ScalingVariant::tar1_general: return "tar1-general";
        case ScalingVariant::tar1_orthogonal: return "tar1-orthogonal";
        case ScalingVariant::tar2: return "tar2";
    }
    return "?";
}

ScalingVariant scaling_variant_from_string(const std::string& s) {
    if (s == "tar1-general") return ScalingVariant::tar1_general;
    if (s == "tar1-orthogonal") return ScalingVariant::tar1_orthogonal;
    if (s == "tar2") return ScalingVariant::tar2;
    throw ValidationError("unknown scaling variant '" + s + "' (expected tar1-general, tar1-orthogonal or tar2)");
}

double scaling_prediction(int sites, double theta0, double epsilon, ScalingVariant variant) {
    if (sites < 2) throw ValidationError("chain needs at least two sites");
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw ValidationError("epsilon must lie in (0, 1]");
    if (!std::isfinite(theta0)) throw ValidationError("theta0 must be finite");
    constexpr double kAngleTol = 1e-12;
    const double L = sites;
    const double parity = sites % 2 == 0 ? 1.0 : -1.0;
    const double scale = std::ldexp(1.0, sites);
    double n = 0.0;
    switch (variant) {
        case ScalingVariant::tar1_general: {
            const double c = parity * std::cos(L * theta0);
            if (std::abs(1.0 + c) < kAngleTol) {
                throw UseOrthogonalLaw("initial state is orthogonal to the GHZ target here; use tar1-orthogonal");
            }
            if (std::abs(1.0 - c) < kAngleTol) throw ValidationError("tar1-general law has a pole at this angle");
            n = scale / 8.0 * std::log((1.0 + c) / (1.0 - c) / epsilon);
            break;
        }
        case ScalingVariant::tar1_orthogonal: {
            if (std::abs(1.0 + parity * std::cos(L * theta0)) > 1e-9) {
                throw ValidationError("tar1-orthogonal law applies only where 1 + (-1)^L cos(L theta0) = 0");
            }
            n = scale / (4.0 * L) * std::log(L / epsilon);
            break;
        }
        case ScalingVariant::tar2: {
            const double c = parity * std::cos((L - 1.0) * theta0);
            const double den = 2.0 * L * (1.0 + c) * epsilon;
            if (std::abs(1.0 + c) < kAngleTol) throw ValidationError("tar2 law has a pole at this angle");
            const double num = 1.0 + L * L - 2.0 * L * c;
            n = scale / (4.0 * (L + 1.0)) * std::log(num / den);
            break;
        }
    }
    return std::max(0.0, n);
}

double tar1_orthogonal_angle(int sites) { return sites % 2 == 0 ? kPi / sites : 0.0; }

double tar2_optimal_angle(int sites) { return sites % 2 == 0 ? 0.0 : kPi / (sites - 1); }

}  // namespace darkfilter
