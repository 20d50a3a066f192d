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
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "mwtele/config.hpp"
#include "mwtele/phasespace.hpp"
#include "mwtele/teleport.hpp"

namespace mwtele {

enum class TableFormat { csv, json };

/// Column-oriented numeric table written as CSV or JSON.
struct Table {
    using Cell = std::variant<double, std::uint64_t>;

    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

/// Scientific notation with 17 significant digits.
inline std::string format_number(double v) {
    if (!std::isfinite(v)) {
        throw std::domain_error("format_number: non-finite value");
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

inline std::string to_csv(const Table &t) {
    std::string out;
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        out += (i ? "," : "") + t.columns[i];
    }
    out += '\n';
    for (const auto &row : t.rows) {
        if (row.size() != t.columns.size()) {
            throw std::logic_error("to_csv: row width does not match header");
        }
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) {
                out += ',';
            }
            if (const auto *d = std::get_if<double>(&row[i])) {
                out += format_number(*d);
            } else {
                out += std::to_string(std::get<std::uint64_t>(row[i]));
            }
        }
        out += '\n';
    }
    return out;
}

inline nlohmann::json to_json(const Table &t) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto &row : t.rows) {
        nlohmann::json r = nlohmann::json::array();
        for (const auto &c : row) {
            std::visit(
                [&](auto v) {
                    if constexpr (std::is_same_v<decltype(v), double>) {
                        if (!std::isfinite(v)) {
                            throw std::domain_error("to_json: non-finite value");
                        }
                    }
                    r.push_back(v);
                },
                c);
        }
        rows.push_back(std::move(r));
    }
    return nlohmann::json{{"columns", t.columns}, {"rows", std::move(rows)}};
}

inline void write_text(const std::filesystem::path &path, const std::string &text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    f << text;
    if (!f) {
        throw std::runtime_error("write failed for '" + path.string() + "'");
    }
}

/// Writes `dir/stem.csv` or `dir/stem.json`; returns the path written.
inline std::filesystem::path write_table(const std::filesystem::path &dir, const std::string &stem, const Table &t,
                                         TableFormat fmt) {
    const auto path = dir / (stem + (fmt == TableFormat::csv ? ".csv" : ".json"));
    write_text(path, fmt == TableFormat::csv ? to_csv(t) : to_json(t).dump(2) + "\n");
    return path;
}

//---------------------------------------------------------------------------//
// Tables
//---------------------------------------------------------------------------//

/// Histogram rows; `reference` (if given) adds an analytic density column.
inline Table histogram_table(const Histogram1D &h, const std::string &unit,
                             const std::function<double(double)> &reference = {},
                             const std::string &reference_name = "input") {
    Table t;
    t.columns = {"bin_lo_" + unit, "bin_hi_" + unit, "count", "density_per_" + unit};
    if (reference) {
        t.columns.push_back(reference_name + "_density_per_" + unit);
    }
    for (std::size_t i = 0; i < h.bins(); ++i) {
        std::vector<Table::Cell> row{h.edges[i], h.edges[i + 1], h.counts[i], h.density(i)};
        if (reference) {
            row.emplace_back(reference(h.center(i)));
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline Table density_table(const DensityGrid &in, const DensityGrid &out, const std::string &axis,
                           const std::string &unit) {
    Table t;
    t.columns = {axis + "_" + unit, "input_density_per_" + unit, "output_density_per_" + unit};
    for (std::size_t i = 0; i < in.size(); ++i) {
        t.rows.push_back({in.axis[i], in.values[i], out.values[i]});
    }
    return t;
}

/// Column name of a sweep parameter, with its unit suffix.
inline std::string sweep_column(const std::string &name) {
    if (name == "D" || name == "D_m") {
        return "D_m";
    }
    if (name == "dd" || name == "dd_m") {
        return "dd_m";
    }
    if (name == "dd_v" || name == "dd_v_m") {
        return "dd_v_m";
    }
    if (name == "v_y" || name == "v_y_mps") {
        return "v_y_mps";
    }
    throw std::invalid_argument("unknown sweep parameter '" + name + "'");
}

inline Table sweep_table(const std::string &name, const std::vector<SweepRow> &rows) {
    Table t;
    const bool mc = !rows.empty() && rows.front().fidelity_estimate.has_value();
    t.columns = {sweep_column(name), "valid", "product_over_hbar", "f_max"};
    if (mc) {
        t.columns.emplace_back("fidelity_estimate");
    }
    for (const auto &r : rows) {
        std::vector<Table::Cell> row{r.value, std::uint64_t{r.valid ? 1u : 0u}, r.product_over_hbar, r.f_max};
        if (mc) {
            row.emplace_back(*r.fidelity_estimate);
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

//---------------------------------------------------------------------------//
// Summaries
//---------------------------------------------------------------------------//

inline nlohmann::json budget_json(const NoiseBudget &n, const ErrorBudget &b) {
    return nlohmann::json{{"x_meas_m", n.dx_meas},   {"p_meas_kgmps", n.dp_meas},
                          {"x_shift_m", n.dx_shift}, {"p_shift_kgmps", n.dp_shift},
                          {"dxT_m", b.dxT},          {"dpT_kgmps", b.dpT},
                          {"product_over_hbar", b.product_over_hbar}};
}

inline nlohmann::json moments_json(const PhaseMoments &m, const char *x = "x", const char *p = "p") {
    return nlohmann::json{{std::string("mean_") + x + "_m", m.mean_x},
                          {std::string("mean_") + p + "_kgmps", m.mean_p},
                          {std::string("var_") + x + "_m2", m.var_x()},
                          {std::string("var_") + p + "_kgmps2", m.var_p()},
                          {"cov_xp", m.cov_xp()},
                          {"count", m.count}};
}

inline nlohmann::json summary_json(const RunConfig &cfg, const RunReport &rep) {
    using nlohmann::json;
    json j;
    j["config"] = config_to_json(cfg);
    j["mode"] = to_string(rep.mode);
    j["seed"] = rep.seed;
    j["workers"] = rep.workers;
    j["events"] = rep.n_events;
    j["budget"] = budget_json(rep.noise, rep.budget);
    j["f_max"] = rep.f_max;
    j["nonclassical"] = rep.nonclassical;
    j["warnings"] = rep.warnings;
    if (rep.input) {
        j["input"] = json{{"mean_x_m", rep.input->mean_x},
                          {"mean_p_kgmps", rep.input->mean_p},
                          {"sigma_x_m", rep.input->sigma_x},
                          {"sigma_p_kgmps", rep.input->sigma_p}};
    }
    if (rep.fidelity_estimate) {
        j["fidelity_estimate"] = *rep.fidelity_estimate;
        j["output_moments"] = moments_json(rep.moments);
    }
    if (rep.cat) {
        const auto &c = *rep.cat;
        j["cat"] = json{{"visibility_in", c.visibility_in},
                        {"visibility_out", c.visibility_out},
                        {"visibility_ratio", c.visibility_out / c.visibility_in},
                        {"visibility_ratio_expected", c.visibility_ratio_expected},
                        {"peak_to_valley_in", c.peak_to_valley_in ? json(*c.peak_to_valley_in) : json(nullptr)},
                        {"peak_to_valley_out", c.peak_to_valley_out ? json(*c.peak_to_valley_out) : json(nullptr)}};
    }
    return j;
}

inline nlohmann::json epr_summary_json(const RunConfig &cfg, const EprDemoReport &rep) {
    using nlohmann::json;
    return json{{"config", config_to_json(cfg)},
                {"seed", rep.seed},
                {"workers", rep.workers},
                {"events", rep.n_events},
                {"state",
                 {{"sigma_xdiff_m", rep.state.sigma_xdiff},
                  {"sigma_xsum_m", rep.state.sigma_xsum},
                  {"sigma_psum_kgmps", rep.state.sigma_psum},
                  {"sigma_pdiff_kgmps", rep.state.sigma_pdiff}}},
                {"xdiff_psum_product_over_hbar", rep.condition.product_over_hbar},
                {"below_hbar", rep.condition.below_hbar},
                {"below_half_hbar", rep.condition.below_half_hbar},
                {"collective_moments", moments_json(rep.collective, "xdiff", "psum")},
                {"single_moments", moments_json(rep.single, "x0", "p0")},
                {"warnings", rep.warnings}};
}

}  // namespace mwtele
