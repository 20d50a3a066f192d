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
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mwtele/cli.hpp"
#include "mwtele/config.hpp"

using namespace mwtele;
namespace fs = std::filesystem;

namespace {

const std::string kConfigs = MWTELE_CONFIG_DIR;

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string &name) {
    const fs::path dir = fs::temp_directory_path() / ("mwtele_test_" + name);
    fs::remove_all(dir);
    return dir;
}

ConfigError::Kind error_kind(const std::string &text) {
    try {
        parse_config(text);
    } catch (const ConfigError &e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected ConfigError for " << text;
    return ConfigError::Kind::syntax;
}

std::string minimal(const std::string &extra = "") {
    return R"({"species": "Li+", "D_m": 3e-7, "dd_v_m": 1e-10, "dd_m": 1e-9, "L_m": 1e-6)" + extra + "}";
}

int run_cli(cli::Options opt, std::string *out_text = nullptr) {
    std::ostringstream out, err;
    const int rc = cli::dispatch(opt, out, err);
    if (out_text) {
        *out_text = out.str() + err.str();
    }
    return rc;
}

cli::Options opts(const std::string &sub, const std::string &config, const fs::path &out) {
    cli::Options o;
    o.subcommand = sub;
    o.config_path = kConfigs + "/" + config;
    o.out_dir = out.string();
    return o;
}

void expect_finite_csv(const fs::path &p) {
    std::istringstream in(slurp(p));
    std::string line;
    std::getline(in, line);  // header
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            const double v = std::stod(cell);
            EXPECT_TRUE(std::isfinite(v)) << p << ": " << line;
        }
    }
    EXPECT_GT(rows, 0u) << p;
}

}  // namespace

TEST(Config, ParsesLithiumConfig) {
    const RunConfig cfg = parse_config(cli::read_file(kConfigs + "/li_reference.json"));
    EXPECT_EQ(cfg.source.species, species_preset("Li+"));
    EXPECT_DOUBLE_EQ(cfg.source.D, 3e-7);
    ASSERT_TRUE(cfg.collision.has_value());
    EXPECT_DOUBLE_EQ(cfg.collision->v_y, 300.0);
    EXPECT_FALSE(cfg.noise.dx_meas.has_value());
    EXPECT_FALSE(cfg.input.sigma_x.has_value());
    EXPECT_EQ(cfg.seed, 42u);
}

TEST(Config, InvariantViolationNamesRule) {
    try {
        std::string text = minimal();
        text.replace(text.find("3e-7"), 4, "-1.0");
        parse_config(text);
        FAIL() << "expected invariant error";
    } catch (const ConfigError &e) {
        EXPECT_EQ(e.kind(), ConfigError::Kind::invariant);
        EXPECT_NE(std::string(e.what()).find("D > 0"), std::string::npos) << e.what();
    }
}

TEST(Config, SchemaAndSyntaxErrors) {
    EXPECT_EQ(error_kind(minimal(R"(, "foo": 1)")), ConfigError::Kind::schema);
    EXPECT_EQ(error_kind(minimal(R"(, "noise": {"bar": 1})")), ConfigError::Kind::schema);
    EXPECT_EQ(error_kind(R"({"D_m": 3e-7})"), ConfigError::Kind::schema);
    EXPECT_EQ(error_kind(minimal(R"(, "species": "Xx")")), ConfigError::Kind::schema);
    try {
        parse_config("{\n  \"species\": \"Li+\",\n  \"D_m\": 3e-7,,\n}");
        FAIL() << "expected syntax error";
    } catch (const ConfigError &e) {
        EXPECT_EQ(e.kind(), ConfigError::Kind::syntax);
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
}

TEST(Config, ClassicalCatRejected) {
    EXPECT_EQ(error_kind(minimal(R"(, "mode": "classical", "input": {"type": "cat", "separation_m": 1e-7, "peak_sigma_m": 1e-8})")),
              ConfigError::Kind::invariant);
}

TEST(Config, RoundTripReproducesRun) {
    RunConfig cfg = parse_config(cli::read_file(kConfigs + "/li_reference.json"));
    cfg.n_events = 5000;
    const RunConfig back = config_from_json(config_to_json(cfg));
    EXPECT_EQ(config_to_json(back), config_to_json(cfg));
    const RunReport a = run(cfg);
    const RunReport b = run(back);
    EXPECT_EQ(a.hist_x->counts, b.hist_x->counts);
    EXPECT_EQ(*a.fidelity_estimate, *b.fidelity_estimate);
}

TEST(Config, Overrides) {
    nlohmann::json j = nlohmann::json::parse(minimal());
    apply_override(j, "D_m=4e-7");
    apply_override(j, "input.sigma_x_m=2e-8");
    apply_override(j, "species=H2+");
    EXPECT_DOUBLE_EQ(j["D_m"].get<double>(), 4e-7);
    EXPECT_DOUBLE_EQ(j["input"]["sigma_x_m"].get<double>(), 2e-8);
    EXPECT_EQ(j["species"], "H2+");
    EXPECT_THROW(apply_override(j, "novalue"), std::exception);
}

TEST(Cli, ParamsReportAndExitCodes) {
    std::string text;
    cli::Options o = opts("params", "li_reference.json", scratch("params"));
    EXPECT_EQ(run_cli(o, &text), cli::kOk);
    for (const char *key : {"temperature", "R_col", "F_max"}) {
        EXPECT_NE(text.find(key), std::string::npos) << key << "\n" << text;
    }
    o.overrides = {"dd_c_m=3e-7"};
    EXPECT_EQ(run_cli(o, &text), cli::kWarnings);
    EXPECT_NE(text.find("violated"), std::string::npos);
    o.overrides = {"D_m=-1"};
    EXPECT_EQ(run_cli(o, &text), cli::kError);
    EXPECT_NE(text.find("D > 0"), std::string::npos);
    o.config_path = "/nonexistent/config.json";
    o.overrides.clear();
    EXPECT_EQ(run_cli(o), cli::kError);
}

TEST(Cli, ParamsWithoutCollisionKeys) {
    std::string text;
    EXPECT_EQ(run_cli(opts("params", "h2_source.json", scratch("h2")), &text), cli::kOk);
    EXPECT_EQ(run_cli(opts("teleport", "h2_source.json", scratch("h2t")), &text), cli::kError);
}

TEST(Cli, TeleportIsByteReproducible) {
    const fs::path a = scratch("repro_a"), b = scratch("repro_b");
    cli::Options oa = opts("teleport", "li_reference.json", a);
    oa.events = 20000;
    cli::Options ob = oa;
    ob.out_dir = b.string();
    ASSERT_EQ(run_cli(oa), cli::kOk);
    ASSERT_EQ(run_cli(ob), cli::kOk);
    for (const char *f : {"hist_x.csv", "hist_p.csv", "summary.json"}) {
        ASSERT_TRUE(fs::exists(a / f)) << f;
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    }
    expect_finite_csv(a / "hist_x.csv");
    expect_finite_csv(a / "hist_p.csv");
    const auto summary = nlohmann::json::parse(slurp(a / "summary.json"));
    EXPECT_EQ(summary["seed"], 42);
    EXPECT_GT(summary["fidelity_estimate"].get<double>(), 0.88);
}

TEST(Cli, JsonTables) {
    const fs::path d = scratch("json");
    cli::Options o = opts("classical", "li_reference.json", d);
    o.events = 5000;
    o.format = TableFormat::json;
    ASSERT_EQ(run_cli(o), cli::kOk);
    const auto t = nlohmann::json::parse(slurp(d / "hist_x.json"));
    EXPECT_FALSE(t.empty());
}

TEST(Cli, CatWritesDensities) {
    const fs::path d = scratch("cat");
    ASSERT_EQ(run_cli(opts("cat", "li_cat.json", d)), cli::kOk);
    expect_finite_csv(d / "density_x.csv");
    expect_finite_csv(d / "density_p.csv");
    EXPECT_EQ(run_cli(opts("cat", "li_reference.json", scratch("cat2"))), cli::kError);
    // teleport on a two-peak input falls through to the density run
    const fs::path t = scratch("cat3");
    EXPECT_EQ(run_cli(opts("teleport", "li_cat.json", t)), cli::kOk);
    EXPECT_TRUE(fs::exists(t / "density_p.csv"));
    EXPECT_FALSE(fs::exists(t / "hist_x.csv"));
}

TEST(Cli, EprDemo) {
    const fs::path d = scratch("epr");
    std::string text;
    ASSERT_EQ(run_cli(opts("epr-demo", "li_reference.json", d), &text), cli::kOk);
    for (const char *f : {"hist_x.csv", "hist_p.csv", "hist_xdiff.csv", "hist_psum.csv"}) {
        expect_finite_csv(d / f);
    }
    const auto s = nlohmann::json::parse(slurp(d / "summary.json"));
    EXPECT_NE(text.find("std(x0 - x1)"), std::string::npos);
}

TEST(Cli, SweepRowsAndValidity) {
    const fs::path d = scratch("sweep");
    cli::Options o = opts("sweep", "li_reference.json", d);
    o.events = 2000;
    o.sweep_param = "v_y";
    o.sweep_values = {100, 200, 300, 400, 500};
    EXPECT_EQ(run_cli(o), cli::kWarnings);
    const std::string csv = slurp(d / "sweep.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
    EXPECT_EQ(csv.rfind("v_y_mps,valid,product_over_hbar,f_max", 0), 0u);
    expect_finite_csv(d / "sweep.csv");
    o.sweep_values = {300, 400};
    EXPECT_EQ(run_cli(o), cli::kOk);
    o.sweep_param = "mass";
    EXPECT_EQ(run_cli(o), cli::kError);
}

TEST(Cli, BinaryEndToEnd) {
    const fs::path d = scratch("binary");
    const std::string cmd = std::string("\"") + MWTELE_CLI_PATH + "\" teleport --config " + kConfigs +
                            "/li_reference.json --events 2000 --out " + d.string() + " > /dev/null";
    EXPECT_EQ(std::system(cmd.c_str()), 0);
    EXPECT_TRUE(fs::exists(d / "hist_x.csv"));
    const std::string bad = std::string("\"") + MWTELE_CLI_PATH + "\" teleport --config " + kConfigs +
                            "/li_reference.json --set D_m=-1 --out " + d.string() + " > /dev/null 2>&1";
    const int rc = std::system(bad.c_str());
    EXPECT_EQ(WEXITSTATUS(rc), 1);
}
