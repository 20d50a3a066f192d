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

#include "mwtele/collision.hpp"
#include "mwtele/source.hpp"

namespace fixture {

/// Lithium geometry used across the suite: D = 300 nm, dd_v = 0.1 nm,
/// dd = 1 nm, collision at 300 m/s.
inline mwtele::SourceParams li_source() {
    mwtele::SourceParams s;
    s.species = mwtele::species_preset("Li+");
    s.D = 3e-7;
    s.dd_v = 1e-10;
    s.dd = 1e-9;
    s.dv01 = 0.0;
    s.L = 1e-6;
    s.v_z = 1000.0;
    return s;
}

inline mwtele::CollisionParams li_collision() {
    mwtele::CollisionParams c;
    c.species = mwtele::species_preset("Li+");
    c.v_y = 300.0;
    c.dd_c = 1e-8;
    c.p_instr = c.species.fragment_mass * 1e-3;
    return c;
}

}  // namespace fixture

#include "mwtele/teleport.hpp"

namespace fixture {

/// Lithium run with automatic noise and a matched Gaussian input.
inline mwtele::RunConfig li_run(std::uint64_t events = 50000, std::uint64_t seed = 42) {
    mwtele::RunConfig cfg;
    cfg.source = li_source();
    cfg.collision = li_collision();
    cfg.n_events = events;
    cfg.seed = seed;
    return cfg;
}

}  // namespace fixture
