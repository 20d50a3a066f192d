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
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mwtele {

/// Physical constants in SI units (CODATA 2018).
namespace si {
inline constexpr double hbar = 1.054571817e-34;             // J s (exact)
inline constexpr double epsilon0 = 8.8541878128e-12;        // F/m
inline constexpr double elementary_charge = 1.602176634e-19; // C (exact)
inline constexpr double boltzmann = 1.380649e-23;           // J/K (exact)
inline constexpr double atomic_mass_unit = 1.66053906660e-27; // kg
inline constexpr double pi = std::numbers::pi;

/// Coulomb constant q^2 prefactor 1/(4 pi eps0).
inline constexpr double coulomb_k = 1.0 / (4.0 * pi * epsilon0);
}  // namespace si

/// Isotope masses in atomic mass units. Neutral-atom values; the electron
/// mass is not subtracted for ions.
namespace isotope_mass_u {
inline constexpr double H1 = 1.00782503223;
inline constexpr double Li7 = 7.0160034366;
}  // namespace isotope_mass_u

class UnknownSpeciesError : public std::invalid_argument {
  public:
    explicit UnknownSpeciesError(const std::string &name)
        : std::invalid_argument("unknown species '" + name + "' (known: H2+, Li2-, Li+)"), name_(name) {}
    const std::string &name() const noexcept { return name_; }

  private:
    std::string name_;
};

/// A dissociation fragment together with the diatom it came from.
///
/// `fragment_mass` is the mass m of one receding atom/ion, `molecule_mass`
/// the diatom mass M entering the cooling temperature, `charge` the signed
/// fragment charge q seen by the Coulomb collision.
struct IonSpecies {
    std::string name;
    double fragment_mass = 0.0;  // kg
    double molecule_mass = 0.0;  // kg
    double charge = 0.0;         // C

    int charge_number() const { return static_cast<int>(std::lround(charge / si::elementary_charge)); }
    bool is_charged() const { return charge != 0.0; }

    bool operator==(const IonSpecies &) const = default;
};

/// Builds a custom species, enforcing m > 0, M >= m and integer charge.
inline IonSpecies make_species(std::string name, double fragment_mass_kg, double molecule_mass_kg,
                               int charge_number) {
    if (!(fragment_mass_kg > 0.0) || !std::isfinite(fragment_mass_kg)) {
        throw std::invalid_argument("species '" + name + "': fragment mass must satisfy m > 0");
    }
    if (!(molecule_mass_kg >= fragment_mass_kg) || !std::isfinite(molecule_mass_kg)) {
        throw std::invalid_argument("species '" + name + "': molecule mass must satisfy M >= m");
    }
    return IonSpecies{std::move(name), fragment_mass_kg, molecule_mass_kg,
                      charge_number * si::elementary_charge};
}

/// Presets for the species used in the estimates: H2+ (H+ fragment),
/// Li2- (Li- fragment) and Li+ (from Li2+). Homonuclear, M = 2m.
inline IonSpecies species_preset(std::string_view name) {
    constexpr double u = si::atomic_mass_unit;
    if (name == "H2+") {
        const double m = isotope_mass_u::H1 * u;
        return make_species("H2+", m, 2.0 * m, +1);
    }
    if (name == "Li2-") {
        const double m = isotope_mass_u::Li7 * u;
        return make_species("Li2-", m, 2.0 * m, -1);
    }
    if (name == "Li+") {
        const double m = isotope_mass_u::Li7 * u;
        return make_species("Li+", m, 2.0 * m, +1);
    }
    throw UnknownSpeciesError(std::string(name));
}

}  // namespace mwtele
