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

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mwtele/cli.hpp"

int main(int argc, char **argv) {
    using mwtele::cli::Options;

    CLI::App app{"Matter-wave EPR teleportation simulator"};
    app.require_subcommand(1);

    Options opt;
    std::string format = "csv";
    std::uint64_t seed = 0;
    std::uint64_t events = 0;
    unsigned workers = 0;

    const auto add_common = [&](CLI::App *sub, bool needs_config) {
        auto *c = sub->add_option("--config", opt.config_path, "JSON run configuration");
        if (needs_config) {
            c->required();
        }
        sub->add_option("--out", opt.out_dir, "output directory")->capture_default_str();
        sub->add_option("--format", format, "table format")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--seed", seed, "override the RNG seed");
        sub->add_option("--events", events, "override the number of events")->check(CLI::PositiveNumber);
        sub->add_option("--workers", workers, "override the worker count")->check(CLI::PositiveNumber);
        sub->add_option("--set", opt.overrides, "override a config key (key=value, repeatable)");
    };

    add_common(app.add_subcommand("params", "print derived source, collision and budget quantities"), false);
    add_common(app.add_subcommand("teleport", "quantum teleportation ensemble"), true);
    add_common(app.add_subcommand("classical", "measure-and-prepare baseline ensemble"), true);
    add_common(app.add_subcommand("cat", "teleported densities of a two-peak input"), true);
    add_common(app.add_subcommand("epr-demo", "EPR pair correlation histograms"), true);
    auto *sweep = app.add_subcommand("sweep", "scan one parameter");
    add_common(sweep, true);
    sweep->add_option("--param", opt.sweep_param, "D, dd, dd_v or v_y")->required();
    sweep->add_option("--values", opt.sweep_values, "comma-separated SI values")->delimiter(',')->required();

    CLI11_PARSE(app, argc, argv);

    CLI::App *sub = app.get_subcommands().front();
    opt.subcommand = sub->get_name();
    opt.format = format == "json" ? mwtele::TableFormat::json : mwtele::TableFormat::csv;
    if (sub->count("--seed")) {
        opt.seed = seed;
    }
    if (sub->count("--events")) {
        opt.events = events;
    }
    if (sub->count("--workers")) {
        opt.workers = workers;
    }
    return mwtele::cli::dispatch(opt, std::cout, std::cerr);
}
