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

#include <string>
#include <vector>

#include "darkfilter/filtration.hpp"

namespace darkfilter {

struct Charge {
    double angle = 0.0;   // E tau mod 2pi; the charge sits at e^{-i angle}
    double weight = 0.0;  // removal weight summed over the degenerate group
    int degeneracy = 1;

    cplx position() const { return std::polar(1.0, -angle); }
};

struct ChargePicture {
    std::vector<Charge> charges;  // every group, ordered by angle

    int w() const { return static_cast<int>(charges.size()); }
    /// Charges carrying removal weight above kZeroWeight.
    std::vector<Charge> active() const;
    double total_weight() const;
};

/// Weight below which a group is treated as uncharged.
inline constexpr double kZeroWeight = 1e-14;

ChargePicture charge_picture(const FiltrationSetup& setup, double tol = kDefaultDegeneracyTol);

enum class Provenance { secular, dense };

struct BrightSpectrum {
    std::vector<cplx> roots;
    Provenance provenance = Provenance::secular;
};

/// Coefficients (lowest degree first) of sum_l p_l prod_{m != l} (a_m - z).
std::vector<cplx> secular_polynomial(const std::vector<Charge>& charges);

/// Roots of sum_l p_l / (a_l - z) over the charged groups, via the companion
/// matrix and a Newton polish.
BrightSpectrum bright_secular_roots(const ChargePicture& cp);

/// Dense eigenvalues closer than this are treated as one defective
/// eigenvalue (split by ~sqrt(machine eps)) and replaced by their mean.
inline constexpr double kEigenCluster = 1e-6;

/// Non-dark eigenvalues of the dense F with the structural zero removed.
BrightSpectrum dense_bright(const FiltrationSpectrum& spectrum);

/// |sum_l p_l / (a_l - z)| over the charged groups.
double force_residual(const ChargePicture& cp, cplx z);

/// True if z lies in the convex hull of the charged positions.
bool inside_phase_hull(const ChargePicture& cp, cplx z, double slack = 1e-10);

/// Largest pairwise distance after greedy nearest pairing; infinity when the
/// sizes differ.
double spectrum_distance(const std::vector<cplx>& a, const std::vector<cplx>& b);

struct DominantBright {
    cplx zeta;
    bool tie = false;
};

DominantBright dominant_bright(const BrightSpectrum& bs);

enum class ScalingVariant { tar1_general, tar1_orthogonal, tar2 };

const char* to_string(ScalingVariant v);
ScalingVariant scaling_variant_from_string(const std::string& s);

/// Raised when the general tar1 law is evaluated where the initial state is
/// orthogonal to the target; the orthogonal law applies there instead.
class UseOrthogonalLaw : public ValidationError {
   public:
    using ValidationError::ValidationError;
};

/// Leading-order n_eps estimate, clamped at 0.
double scaling_prediction(int sites, double theta0, double epsilon, ScalingVariant variant);

/// theta0 with 1 + (-1)^L cos(L theta0) = 0 (pi/L for even L, 0 for odd L).
double tar1_orthogonal_angle(int sites);
/// theta0 minimizing the tar2 law (0 for even L, pi/(L-1) for odd L).
double tar2_optimal_angle(int sites);

}  // namespace darkfilter
