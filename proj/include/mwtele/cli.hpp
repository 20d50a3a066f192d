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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mwtele/collision.hpp"
#include "mwtele/config.hpp"
#include "mwtele/io.hpp"
#include "mwtele/source.hpp"
#include "mwtele/teleport.hpp"

namespace mwtele::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kError = 1;
inline constexpr int kWarnings = 2;

struct Options {
    std::string subcommand;  // params | teleport | classical | cat | epr-demo | sweep
    std::optional<std::string> config_path;
    std::string out_dir = ".";
    TableFormat format = TableFormat::csv;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> events;
    std::optional<unsigned> workers;
    std::vector<std::string> overrides;  // key=value
    std::string sweep_param;
    std::vector<double> sweep_values;
};

inline std::string read_file(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot read config '" + path + "'");
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

/// Raw configuration JSON after applying file, flags and --set overrides.
inline nlohmann::json load_config_json(const Options &opt) {
    nlohmann::json j = opt.config_path ? parse_config_json(read_file(*opt.config_path)) : nlohmann::json::object();
    for (const auto &o : opt.overrides) {
        apply_override(j, o);
    }
    if (opt.seed) {
        j["seed"] = *opt.seed;
    }
    if (opt.events) {
        j["events"] = *opt.events;
    }
    if (opt.workers) {
        j["workers"] = *opt.workers;
    }
    return j;
}

inline RunConfig load_config(const Options &opt) {
    if (!opt.config_path && opt.subcommand != "params") {
        throw ConfigError(ConfigError::Kind::schema, "--config is required for '" + opt.subcommand + "'");
    }
    return config_from_json(load_config_json(opt));
}

inline std::filesystem::path prepare_out_dir(const Options &opt) {
    std::filesystem::path dir(opt.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw std::runtime_error("cannot create output directory '" + dir.string() + "'");
    }
    return dir;
}

namespace detail {

class Report {
  public:
    explicit Report(std::ostream &os) : os_(os) {}

    void line(const std::string &label, double value, const std::string &unit, double scale = 1.0) {
        os_ << "  " << std::left << std::setw(34) << label << std::setprecision(5) << value / scale;
        if (!unit.empty()) {
            os_ << ' ' << unit;
        }
        os_ << '\n';
    }
    void text(const std::string &label, const std::string &value) {
        os_ << "  " << std::left << std::setw(34) << label << value << '\n';
    }
    void heading(const std::string &h) { os_ << h << '\n'; }

  private:
    std::ostream &os_;
};

}  // namespace detail

/// Derived source, collision and budget quantities. Exit code 2 when the
/// design checks raise warnings.
inline int cmd_params(const Options &opt, std::ostream &out) {
    const RunConfig cfg = load_config(opt);
    const SourceParams &src = cfg.source;
    const IonSpecies &sp = src.species;
    nlohmann::json j;
    std::vector<std::string> warnings;

    const double T = com_temperature(sp, src.D);
    const double s = squeezing_parameter(src.D, src.effective_dd());
    const EprCondition cond = epr_condition(epr_pair_state(src));
    j["species"] = sp.name;
    j["fragment_mass_kg"] = sp.fragment_mass;
    j["molecule_mass_kg"] = sp.molecule_mass;
    j["charge_e"] = sp.charge_number();
    j["com_temperature_K"] = T;
    j["squeezing_parameter"] = s;
    j["com_momentum_spread_kgmps"] = src.com_momentum_spread();
    j["com_velocity_spread_mps"] = src.com_momentum_spread() / sp.fragment_mass;
    j["xdiff_psum_product_over_hbar"] = cond.product_over_hbar;

    std::optional<NoiseBudget> noise;
    std::optional<ErrorBudget> budget;
    if (cfg.collision) {
        const CollisionParams &c = *cfg.collision;
        j["collision_range_m"] = collision_range(sp, c.v_y);
        const double thr = validity_threshold(sp, src.D);
        j["validity_threshold_kgmps"] = thr;
        j["validity_threshold_speed_mps"] = thr / sp.fragment_mass;
        j["p_y_kgmps"] = c.p_y();
        noise = resolve_noise(cfg);
        budget = config_budget(cfg, *noise);
        j["budget"] = budget_json(*noise, *budget);
        j["f_max"] = f_max(budget->product_over_hbar);
        j["nonclassical"] = nonclassicality(*budget).nonclassical;
        warnings = design_check(src, c);
    } else if (cfg.noise.dx_meas && cfg.noise.dp_meas) {
        noise = resolve_noise(cfg);
        budget = config_budget(cfg, *noise);
        j["budget"] = budget_json(*noise, *budget);
        j["f_max"] = f_max(budget->product_over_hbar);
        j["nonclassical"] = nonclassicality(*budget).nonclassical;
    }
    j["warnings"] = warnings;

    if (opt.format == TableFormat::json) {
        out << j.dump(2) << '\n';
    } else {
        detail::Report r(out);
        r.heading("source");
        r.text("species", sp.name + " (q = " + std::to_string(sp.charge_number()) + " e)");
        r.line("fragment mass m", sp.fragment_mass, "kg");
        r.line("molecule mass M", sp.molecule_mass, "kg");
        r.line("COM temperature T", T, "uK", 1e-6);
        r.line("squeezing s = D/dd", s, "");
        r.line("COM momentum spread dP_x", src.com_momentum_spread(), "kg m/s");
        r.line("dP_x / m", src.com_momentum_spread() / sp.fragment_mass, "mm/s", 1e-3);
        r.line("dx01 dP_x / hbar", cond.product_over_hbar, "");
        if (cfg.collision) {
            r.heading("collision");
            r.line("collision range R_col", j["collision_range_m"].get<double>(), "nm", 1e-9);
            r.line("p_y", cfg.collision->p_y(), "kg m/s");
            r.line("validity threshold (speed)", j["validity_threshold_speed_mps"].get<double>(), "m/s");
        }
        if (budget) {
            r.heading("error budget");
            r.line("dx_meas", noise->dx_meas, "nm", 1e-9);
            r.line("dp_meas / m", noise->dp_meas / sp.fragment_mass, "mm/s", 1e-3);
            r.line("dx_T", budget->dxT, "nm", 1e-9);
            r.line("dp_T / m", budget->dpT / sp.fragment_mass, "mm/s", 1e-3);
            r.line("dx_T dp_T / hbar", budget->product_over_hbar, "");
            r.line("F_max", f_max(budget->product_over_hbar), "");
            r.text("non-classical (< hbar)", nonclassicality(*budget).nonclassical ? "yes" : "no");
        }
        for (const auto &w : warnings) {
            out << "warning: " << w << '\n';
        }
    }
    return warnings.empty() ? kOk : kWarnings;
}

inline void write_summary(const std::filesystem::path &dir, const nlohmann::json &j) {
    write_text(dir / "summary.json", j.dump(2) + "\n");
}

/// teleport / classical / cat: runs the configured experiment and writes
/// summary.json plus histogram or density tables.
inline int cmd_run(const Options &opt, std::ostream &out) {
    RunConfig cfg = load_config(opt);
    if (opt.subcommand == "classical") {
        cfg.mode = Mode::classical;
    } else if (opt.subcommand == "teleport") {
        cfg.mode = Mode::quantum;
    } else if (opt.subcommand == "cat" && cfg.input.kind != InputKind::cat) {
        throw ConfigError(ConfigError::Kind::schema, "'cat' needs input.type = \"cat\"");
    }
    const RunReport rep = run(cfg);
    const auto dir = prepare_out_dir(opt);
    write_summary(dir, summary_json(cfg, rep));
    if (rep.hist_x && rep.input) {
        const GaussianState in = *rep.input;
        const auto gx = [in](double x) {
            const double z = (x - in.mean_x) / in.sigma_x;
            return std::exp(-0.5 * z * z) / (std::sqrt(2.0 * si::pi) * in.sigma_x);
        };
        const auto gp = [in](double p) {
            const double z = (p - in.mean_p) / in.sigma_p;
            return std::exp(-0.5 * z * z) / (std::sqrt(2.0 * si::pi) * in.sigma_p);
        };
        write_table(dir, "hist_x", histogram_table(*rep.hist_x, "m", gx), opt.format);
        write_table(dir, "hist_p", histogram_table(*rep.hist_p, "kgmps", gp), opt.format);
    }
    if (rep.cat) {
        write_table(dir, "density_x", density_table(rep.cat->x_in, rep.cat->x_out, "x", "m"), opt.format);
        write_table(dir, "density_p", density_table(rep.cat->p_in, rep.cat->p_out, "p", "kgmps"), opt.format);
    }
    out << to_string(rep.mode) << " run: dx_T dp_T / hbar = " << rep.budget.product_over_hbar
        << ", F_max = " << rep.f_max;
    if (rep.fidelity_estimate) {
        out << ", fidelity estimate = " << *rep.fidelity_estimate;
    }
    if (rep.cat) {
        out << ", fringe visibility " << rep.cat->visibility_in << " -> " << rep.cat->visibility_out;
    }
    out << '\n';
    for (const auto &w : rep.warnings) {
        out << "warning: " << w << '\n';
    }
    return rep.warnings.empty() ? kOk : kWarnings;
}

/// Correlated versus single-particle EPR statistics.
inline int cmd_epr_demo(const Options &opt, std::ostream &out) {
    const RunConfig cfg = load_config(opt);
    const EprDemoReport rep = run_epr_demo(cfg);
    const auto dir = prepare_out_dir(opt);
    write_summary(dir, epr_summary_json(cfg, rep));
    const auto normal = [](double sigma) {
        return [sigma](double u) {
            const double z = u / sigma;
            return std::exp(-0.5 * z * z) / (std::sqrt(2.0 * si::pi) * sigma);
        };
    };
    const EprPairState &st = rep.state;
    write_table(dir, "hist_x", histogram_table(rep.hist_x0, "m", normal(0.5 * std::hypot(st.sigma_xsum, st.sigma_xdiff)), "reference"),
                opt.format);
    write_table(dir, "hist_p",
                histogram_table(rep.hist_p0, "kgmps", normal(0.5 * std::hypot(st.sigma_psum, st.sigma_pdiff)), "reference"),
                opt.format);
    write_table(dir, "hist_xdiff", histogram_table(rep.hist_xdiff, "m", normal(st.sigma_xdiff), "reference"), opt.format);
    write_table(dir, "hist_psum", histogram_table(rep.hist_psum, "kgmps", normal(st.sigma_psum), "reference"),
                opt.format);
    out << "epr-demo: std(x0 - x1) = " << rep.collective.std_x() << " m, std(x0) = " << rep.single.std_x()
        << " m, std(p0 + p1) = " << rep.collective.std_p() << " kg m/s, std(p0) = " << rep.single.std_p()
        << " kg m/s\n";
    for (const auto &w : rep.warnings) {
        out << "warning: " << w << '\n';
    }
    return rep.warnings.empty() ? kOk : kWarnings;
}

inline int cmd_sweep(const Options &opt, std::ostream &out) {
    const RunConfig cfg = load_config(opt);
    if (opt.sweep_param.empty() || opt.sweep_values.empty()) {
        throw std::invalid_argument("sweep needs --param NAME and --values v1,v2,...");
    }
    const auto rows = sweep(cfg, opt.sweep_param, opt.sweep_values);
    const auto dir = prepare_out_dir(opt);
    nlohmann::json s;
    s["config"] = config_to_json(cfg);
    s["parameter"] = sweep_column(opt.sweep_param);
    s["values"] = opt.sweep_values;
    s["seed"] = cfg.seed;
    s["workers"] = cfg.workers;
    s["events"] = cfg.n_events;
    std::size_t invalid = 0;
    for (const auto &r : rows) {
        invalid += r.valid ? 0 : 1;
    }
    s["invalid_rows"] = invalid;
    write_summary(dir, s);
    write_table(dir, "sweep", sweep_table(opt.sweep_param, rows), opt.format);
    out << "sweep " << opt.sweep_param << ": " << rows.size() << " rows";
    if (invalid) {
        out << ", " << invalid << " below the collision validity threshold";
    }
    out << '\n';
    return invalid == 0 ? kOk : kWarnings;
}

/// Runs one subcommand; errors are reported on `err` with exit code 1.
inline int dispatch(const Options &opt, std::ostream &out, std::ostream &err) {
    try {
        if (opt.subcommand == "params") {
            return cmd_params(opt, out);
        }
        if (opt.subcommand == "teleport" || opt.subcommand == "classical" || opt.subcommand == "cat") {
            return cmd_run(opt, out);
        }
        if (opt.subcommand == "epr-demo") {
            return cmd_epr_demo(opt, out);
        }
        if (opt.subcommand == "sweep") {
            return cmd_sweep(opt, out);
        }
        err << "error: unknown subcommand '" << opt.subcommand << "'\n";
        return kError;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return kError;
    }
}

}  // namespace mwtele::cli
