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

#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "mwtele/source.hpp"
#include "oracles.hpp"

using namespace mwtele;

TEST(ComTemperature, KnownSpecies) {
    const double t_h = com_temperature(species_preset("H2+"), 3e-7);
    const double t_li = com_temperature(species_preset("Li2-"), 3e-7);
    EXPECT_GT(t_h, 2.5e-6);
    EXPECT_LT(t_h, 3.1e-6);
    EXPECT_GT(t_li, 0.35e-6);
    EXPECT_LT(t_li, 0.45e-6);
    // hbar^2 / (M kB D^2) evaluated independently
    const double M = 2 * 1.00782503223 * 1.66053906660e-27;
    EXPECT_NEAR(t_h / (oracle::hbar * oracle::hbar / (M * 1.380649e-23 * 9e-14)), 1.0, 1e-12);
}

TEST(ComTemperature, InverseSquareInD) {
    const IonSpecies s = species_preset("Li+");
    for (double D : {1e-8, 3e-7, 2e-6}) {
        EXPECT_NEAR(com_temperature(s, 2 * D) / com_temperature(s, D), 0.25, 1e-14);
    }
    EXPECT_THROW(com_temperature(s, 0.0), std::invalid_argument);
}

TEST(SqueezingParameter, Ratios) {
    EXPECT_DOUBLE_EQ(squeezing_parameter(3e-7, 1e-9), 300.0);
    EXPECT_DOUBLE_EQ(squeezing_parameter(1e-9, 1e-9), 1.0);
    EXPECT_NEAR(squeezing_parameter(2e-8, 1e-9), 20.0, 1e-12);
    EXPECT_THROW(squeezing_parameter(1e-9, 0.0), std::invalid_argument);
}

TEST(SpreadAt, FreeExpansion) {
    EXPECT_DOUBLE_EQ(spread_at(3.0, 4.0, 1.0), 5.0);
    EXPECT_DOUBLE_EQ(spread_at(1e-9, 0.0, 1e-3), 1e-9);
    double prev = 0.0;
    for (int i = 0; i < 10; ++i) {
        const double s = spread_at(1e-9, 0.01, 1e-6 * i);
        EXPECT_GE(s, prev);
        prev = s;
    }
    EXPECT_THROW(spread_at(1e-9, 1.0, -1.0), std::invalid_argument);
}

TEST(EprPairState, EntanglementProduct) {
    const SourceParams src = fixture::li_source();
    const EprPairState st = epr_pair_state(src);
    EXPECT_DOUBLE_EQ(st.sigma_xdiff, 1e-9);
    EXPECT_DOUBLE_EQ(st.sigma_xsum, 3e-7);
    const double m = src.species.fragment_mass;
    // hbar / (D m) for lithium at 300 nm is about 30 mm/s
    EXPECT_NEAR(st.sigma_psum / m, 0.030, 0.001);
    const EprCondition c = epr_condition(st);
    EXPECT_NEAR(c.product_over_hbar, 1.0 / 300.0, 1e-12);
    EXPECT_TRUE(c.below_hbar);
    EXPECT_TRUE(c.below_half_hbar);
}

TEST(EprPairState, UnentangledLimit) {
    SourceParams src = fixture::li_source();
    src.dd = src.D;
    src.dd_v = src.D;
    const EprCondition c = epr_condition(epr_pair_state(src));
    EXPECT_NEAR(c.product_over_hbar, 1.0, 1e-12);
    EXPECT_FALSE(c.below_hbar);
}

TEST(EprPairState, LensFloorAddsInQuadrature) {
    SourceParams src = fixture::li_source();
    src.lens_floor = 1e-9;
    EXPECT_NEAR(epr_pair_state(src).sigma_xdiff, std::sqrt(2.0) * 1e-9, 1e-22);
}

TEST(SourceParams, Invariants) {
    SourceParams src = fixture::li_source();
    EXPECT_NO_THROW(src.validate());
    src.D = -1.0;
    EXPECT_THROW(src.validate(), std::invalid_argument);
    src = fixture::li_source();
    src.dd = 0.5 * src.dd_v;
    EXPECT_THROW(src.validate(), std::invalid_argument);
    src = fixture::li_source();
    src.dv01 = -1.0;
    EXPECT_THROW(src.validate(), std::invalid_argument);
}

TEST(SampleEprPair, CollectiveAndSingleParticleMoments) {
    const SourceParams src = fixture::li_source();
    const EprPairState st = epr_pair_state(src);
    Rng rng(42);
    const std::size_t n = 100000;
    PhaseMoments diff, sum, p0m, x0m;
    PhaseMoments single;
    for (std::size_t i = 0; i < n; ++i) {
        const auto [a, b] = sample_epr_pair(st, rng);
        diff.add(PhasePoint{a.x - b.x, a.p - b.p});
        sum.add(PhasePoint{a.x + b.x, a.p + b.p});
        single.add(a);
    }
    const double band = oracle::variance_band(n);
    EXPECT_NEAR(diff.var_x() / (st.sigma_xdiff * st.sigma_xdiff), 1.0, std::min(band, 0.03));
    EXPECT_NEAR(sum.var_x() / (st.sigma_xsum * st.sigma_xsum), 1.0, 0.03);
    EXPECT_NEAR(sum.var_p() / (st.sigma_psum * st.sigma_psum), 1.0, 0.03);
    EXPECT_NEAR(diff.var_p() / (st.sigma_pdiff * st.sigma_pdiff), 1.0, 0.03);
    const double var_x0 = 0.25 * (src.D * src.D + src.dd * src.dd);
    EXPECT_NEAR(single.var_x() / var_x0, 1.0, 0.03);
    EXPECT_LT(std::abs(single.correlation()), 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST(DesignCheck, LithiumGeometryPasses) {
    EXPECT_TRUE(design_check(fixture::li_source(), fixture::li_collision()).empty());
}

TEST(DesignCheck, FlagsScaleViolations) {
    SourceParams src = fixture::li_source();
    CollisionParams col = fixture::li_collision();
    col.dd_c = src.D;
    const auto w = design_check(src, col);
    EXPECT_FALSE(w.empty());
    bool found = false;
    for (const auto &s : w) {
        found = found || s.find("Δd_c ≪ D") != std::string::npos;
    }
    EXPECT_TRUE(found);

    src = fixture::li_source();
    src.L = 0.5 * src.D;
    const auto w2 = design_check(src, fixture::li_collision());
    ASSERT_EQ(w2.size(), 1u);
    EXPECT_EQ(w2.front(), "D ≲ L violated");
}
