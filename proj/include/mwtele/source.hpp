// Copyright 2026 The mwtele Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mwtele/collision.hpp"
#include "mwtele/phasespace.hpp"
#include "mwtele/physconst.hpp"
#include "mwtele/rng.hpp"

namespace mwtele {

/// Parameters of the dissociating molecular beam.
///
/// `D` is the std of the pair's x0 + x1 (the molecular COM wavepacket size),
/// `dd` the std of x0 - x1 once dissociation completes (t = 0), `dd_v` the
/// vibrational internuclear spread before dissociation. `lens_floor` is the
/// resolution floor of the lens that re-images x0 - x1 onto the collision
/// plane; it adds to `dd` in quadrature.
struct SourceParams {
    IonSpecies species;
    double D = 0.0;     // m
    double dd_v = 0.0;  // m
    double dd = 0.0;    // m
    double dv01 = 0.0;  // m/s
    double L = 0.0;     // m, aperture
    double v_z = 0.0;   // m/s, beam speed (metadata)
    double lens_floor = 0.0;  // m

    void validate() const {
        if (!(D > 0.0) || !std::isfinite(D)) {
            throw std::invalid_argument("SourceParams: D > 0 violated");
        }
        if (!(dd_v > 0.0) || !std::isfinite(dd_v)) {
            throw std::invalid_argument("SourceParams: dd_v > 0 violated");
        }
        if (!(dd >= dd_v) || !std::isfinite(dd)) {
            throw std::invalid_argument("SourceParams: dd_v <= dd violated");
        }
        if (!(dv01 >= 0.0) || !std::isfinite(dv01)) {
            throw std::invalid_argument("SourceParams: dv01 >= 0 violated");
        }
        if (!(L > 0.0) || !std::isfinite(L)) {
            throw std::invalid_argument("SourceParams: L > 0 violated");
        }
        if (!(lens_floor >= 0.0) || !std::isfinite(lens_floor)) {
            throw std::invalid_argument("SourceParams: lens_floor >= 0 violated");
        }
    }

    /// Spread of x0 - x1 delivered to the collision plane.
    double effective_dd() const { return std::hypot(dd, lens_floor); }

    /// COM momentum spread Delta P_x = hbar / D.
    double com_momentum_spread() const { return si::hbar / D; }
};

/// Two-particle Gaussian state in collective coordinates. The four modes
/// x0 - x1, x0 + x1, p0 + p1, p0 - p1 are mutually independent.
struct EprPairState {
    double sigma_xdiff = 0.0;  // m
    double sigma_xsum = 0.0;   // m
    double sigma_psum = 0.0;   // kg m/s
    double sigma_pdiff = 0.0;  // kg m/s
};

/// Temperature hbar^2 / (M k_B D^2) at which the molecular COM ground state
/// has size D.
inline double com_temperature(const IonSpecies &species, double D) {
    if (!(D > 0.0)) {
        throw std::invalid_argument("com_temperature: D > 0 required");
    }
    return si::hbar * si::hbar / (species.molecule_mass * si::boltzmann * D * D);
}

/// s = D / dd.
inline double squeezing_parameter(double D, double dd) {
    if (!(D > 0.0) || !(dd > 0.0)) {
        throw std::invalid_argument("squeezing_parameter: D > 0 and dd > 0 required");
    }
    return D / dd;
}

/// Free spreading of the internuclear wavepacket, sqrt(dd0^2 + dv01^2 t^2).
inline double spread_at(double dd0, double dv01, double t) {
    if (!(t >= 0.0)) {
        throw std::invalid_argument("spread_at: t >= 0 required");
    }
    return std::hypot(dd0, dv01 * t);
}

inline EprPairState epr_pair_state(const SourceParams &params) {
    params.validate();
    EprPairState s;
    s.sigma_xdiff = params.effective_dd();
    s.sigma_xsum = params.D;
    s.sigma_psum = si::hbar / params.D;
    s.sigma_pdiff = si::hbar / params.dd;
    if (s.sigma_xdiff > s.sigma_xsum) {
        throw std::invalid_argument("epr_pair_state: sigma_xdiff <= sigma_xsum violated (dd exceeds D)");
    }
    return s;
}

/// Position-difference times momentum-sum spread, in units of hbar. Equals 1/s
/// for a lens-free source.
struct EprCondition {
    double product_over_hbar = 0.0;
    bool below_hbar = false;       // product < hbar
    bool below_half_hbar = false;  // product < hbar/2
};

inline EprCondition epr_condition(const EprPairState &state) {
    EprCondition c;
    c.product_over_hbar = state.sigma_xdiff * state.sigma_psum / si::hbar;
    c.below_hbar = c.product_over_hbar < 1.0;
    c.below_half_hbar = c.product_over_hbar < 0.5;
    return c;
}

/// Draws one pair (particle 0, particle 1).
inline std::pair<PhasePoint, PhasePoint> sample_epr_pair(const EprPairState &state, Rng &rng) {
    const double xdiff = rng.gauss(state.sigma_xdiff);
    const double xsum = rng.gauss(state.sigma_xsum);
    const double psum = rng.gauss(state.sigma_psum);
    const double pdiff = rng.gauss(state.sigma_pdiff);
    return {PhasePoint{0.5 * (xsum + xdiff), 0.5 * (psum + pdiff)},
            PhasePoint{0.5 * (xsum - xdiff), 0.5 * (psum - pdiff)}};
}

/// Scale-separation checks on the source and collision geometry. "a << b"
/// is flagged when 5a > b, "a ~ b" when the ratio exceeds 3, "D <~ L" when D > L.
inline std::vector<std::string> design_check(const SourceParams &source, const CollisionParams &collision) {
    std::vector<std::string> warnings;
    const double r_col = collision_range(collision.species, collision.v_y);
    const auto much_less = [](double a, double b) { return 5.0 * a <= b; };
    const auto comparable = [](double a, double b) { return std::max(a, b) <= 3.0 * std::min(a, b); };

    if (!much_less(collision.dd_c, r_col)) {
        warnings.emplace_back("Δd_c ≪ R_col violated");
    }
    if (!much_less(collision.dd_c, source.D)) {
        warnings.emplace_back("Δd_c ≪ D violated");
    }
    if (!comparable(r_col, source.D)) {
        warnings.emplace_back("R_col ∼ D violated");
    }
    if (source.D > source.L) {
        warnings.emplace_back("D ≲ L violated");
    }
    if (!much_less(source.effective_dd(), source.D)) {
        warnings.emplace_back("Δd ≪ D violated");
    }
    return warnings;
}

}  // namespace mwtele
