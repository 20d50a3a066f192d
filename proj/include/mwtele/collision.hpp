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

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "mwtele/noise.hpp"
#include "mwtele/phasespace.hpp"
#include "mwtele/physconst.hpp"
#include "mwtele/rng.hpp"

namespace mwtele {

/// Geometry of the synchronized collision between particle 1 (EPR member)
/// and particle 2 (input). Both carry the same species.
struct CollisionParams {
    IonSpecies species;
    double v_y = 0.0;      // m/s, approach speed of each particle along y
    double dd_c = 0.0;     // m, y-z extent of the colliding wavepackets
    double p_instr = 0.0;  // kg m/s, instrumental resolution of the momentum-sum readout

    double p_y() const { return species.fragment_mass * v_y; }

    void validate() const {
        if (!(v_y > 0.0) || !std::isfinite(v_y)) {
            throw std::invalid_argument("CollisionParams: v_y > 0 required");
        }
        if (!(dd_c > 0.0) || !std::isfinite(dd_c)) {
            throw std::invalid_argument("CollisionParams: dd_c > 0 required");
        }
        if (!(p_instr >= 0.0) || !std::isfinite(p_instr)) {
            throw std::invalid_argument("CollisionParams: p_instr >= 0 required");
        }
        if (!species.is_charged()) {
            throw std::invalid_argument("CollisionParams: species '" + species.name + "' is neutral");
        }
    }
};

/// Outcome of one joint measurement of x_minus = x1 - x2 and p_plus = p1 + p2.
struct MeasurementRecord {
    double x_minus_meas = 0.0;  // m
    double p_plus_meas = 0.0;   // kg m/s
    double theta = 0.0;         // rad, deflection for the true x_minus
};

/// Raised when p_y is below sqrt(m q^2 / (4 pi eps0 D)), where the
/// small-angle resolution estimate no longer holds.
class ValidityError : public std::domain_error {
  public:
    ValidityError(double p_y, double threshold)
        : std::domain_error(message(p_y, threshold)), p_y_(p_y), threshold_(threshold) {}

    double p_y() const noexcept { return p_y_; }
    double threshold() const noexcept { return threshold_; }

  private:
    static std::string message(double p_y, double threshold) {
        char buf[200];
        std::snprintf(buf, sizeof buf,
                      "collision resolution invalid: p_y = %.4e kg m/s is below the threshold "
                      "sqrt(m q^2/(4 pi eps0 D)) = %.4e kg m/s",
                      p_y, threshold);
        return buf;
    }

    double p_y_;
    double threshold_;
};

namespace detail {
inline void require_charged(const IonSpecies &s, const char *what) {
    if (!s.is_charged()) {
        throw std::invalid_argument(std::string(what) + ": species '" + s.name + "' is neutral");
    }
}
}  // namespace detail

/// Distance of closest approach scale R_col = m q^2 / (4 pi eps0 p_y^2),
/// the impact parameter giving a 90 degree deflection.
inline double collision_range(const IonSpecies &species, double v_y) {
    detail::require_charged(species, "collision_range");
    if (!(v_y > 0.0)) {
        throw std::invalid_argument("collision_range: v_y > 0 required");
    }
    const double p_y = species.fragment_mass * v_y;
    return species.fragment_mass * species.charge * species.charge * si::coulomb_k / (p_y * p_y);
}

/// Relative deflection angle pi - 2 atan(x_minus / R_col), in (0, 2 pi).
inline double deflection_angle(double x_minus, double r_col) {
    if (!(r_col > 0.0)) {
        throw std::invalid_argument("deflection_angle: r_col > 0 required");
    }
    return si::pi - 2.0 * std::atan(x_minus / r_col);
}

/// Inverse of deflection_angle.
inline double invert_deflection(double theta, double r_col) {
    if (!(r_col > 0.0)) {
        throw std::invalid_argument("invert_deflection: r_col > 0 required");
    }
    if (!(theta > 0.0 && theta < 2.0 * si::pi)) {
        throw std::invalid_argument("invert_deflection: theta must lie in (0, 2 pi)");
    }
    return r_col * std::tan(0.5 * (si::pi - theta));
}

/// Minimum approach momentum sqrt(m q^2 / (4 pi eps0 D)) for which the
/// position-resolution estimate applies.
inline double validity_threshold(const IonSpecies &species, double D) {
    detail::require_charged(species, "validity_threshold");
    if (!(D > 0.0)) {
        throw std::invalid_argument("validity_threshold: D > 0 required");
    }
    return std::sqrt(species.fragment_mass * species.charge * species.charge * si::coulomb_k / D);
}

/// pi eps0 hbar D^2 p_y / (2 q^2 m dd_v) without the validity check.
inline double position_resolution_unchecked(const IonSpecies &species, double D, double dd_v, double v_y) {
    detail::require_charged(species, "position_resolution");
    if (!(D > 0.0) || !(dd_v > 0.0) || !(v_y > 0.0)) {
        throw std::invalid_argument("position_resolution: D > 0, dd_v > 0 and v_y > 0 required");
    }
    const double m = species.fragment_mass;
    const double q2 = species.charge * species.charge;
    const double p_y = m * v_y;
    return si::pi * si::epsilon0 * si::hbar * D * D * p_y / (2.0 * q2 * m * dd_v);
}

/// Resolution of x_minus inferred from the deflection angle, limited by the
/// relative-momentum spread hbar/dd_v of the colliding pair.
inline double position_resolution(const IonSpecies &species, double D, double dd_v, double v_y) {
    const double dx = position_resolution_unchecked(species, D, dd_v, v_y);
    const double p_y = species.fragment_mass * v_y;
    const double threshold = validity_threshold(species, D);
    if (p_y < threshold) {
        throw ValidityError(p_y, threshold);
    }
    return dx;
}

/// Default momentum-sum resolution: COM spread and instrument in quadrature.
inline double momentum_resolution(double com_momentum_spread, double p_instr) {
    return std::hypot(com_momentum_spread, p_instr);
}

/// Joint measurement of x_minus and p_plus on the incoming pair with
/// Gaussian readout noise. The momentum sum is conserved by the collision,
/// so pre-collision momenta are used.
inline MeasurementRecord measure(const PhasePoint &p1, const PhasePoint &p2, const CollisionParams &params,
                                 const NoiseBudget &noise, Rng &rng) {
    const double x_minus = p1.x - p2.x;
    const double p_plus = p1.p + p2.p;
    MeasurementRecord rec;
    rec.x_minus_meas = x_minus + rng.gauss(noise.dx_meas);
    rec.p_plus_meas = p_plus + rng.gauss(noise.dp_meas);
    rec.theta = deflection_angle(x_minus, collision_range(params.species, params.v_y));
    return rec;
}

}  // namespace mwtele
