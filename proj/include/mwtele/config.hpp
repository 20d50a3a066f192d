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
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"
#include "mwtele/physconst.hpp"
#include "mwtele/teleport.hpp"

namespace mwtele {

/// Error raised while reading a run configuration.
class ConfigError : public std::runtime_error {
  public:
    enum class Kind { syntax, schema, invariant };

    ConfigError(Kind kind, const std::string &msg) : std::runtime_error(msg), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

  private:
    Kind kind_;
};

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json &obj, const std::set<std::string, std::less<>> &known, std::string_view where) {
    for (const auto &item : obj.items()) {
        if (!known.contains(item.key())) {
            throw ConfigError(ConfigError::Kind::schema,
                              "unknown key '" + std::string(where) + item.key() + "'");
        }
    }
}

inline double get_number(const json &obj, const std::string &key, std::string_view where) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        throw ConfigError(ConfigError::Kind::schema, "missing required key '" + std::string(where) + key + "'");
    }
    if (!it->is_number()) {
        throw ConfigError(ConfigError::Kind::schema, "key '" + std::string(where) + key + "' must be a number");
    }
    return it->get<double>();
}

inline double get_number_or(const json &obj, const std::string &key, double fallback, std::string_view where) {
    return obj.contains(key) ? get_number(obj, key, where) : fallback;
}

/// Number, or empty for the given keyword (e.g. "auto").
inline std::optional<double> get_number_or_keyword(const json &obj, const std::string &key, std::string_view keyword,
                                                   std::string_view where) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        return std::nullopt;
    }
    if (it->is_string() && it->get<std::string>() == keyword) {
        return std::nullopt;
    }
    if (!it->is_number()) {
        throw ConfigError(ConfigError::Kind::schema, "key '" + std::string(where) + key + "' must be a number or \"" +
                                                         std::string(keyword) + "\"");
    }
    return it->get<double>();
}

inline std::uint64_t get_count(const json &obj, const std::string &key, std::uint64_t fallback) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        return fallback;
    }
    if (!it->is_number_integer() || it->get<std::int64_t>() < 0) {
        throw ConfigError(ConfigError::Kind::schema, "key '" + key + "' must be a non-negative integer");
    }
    return it->get<std::uint64_t>();
}

inline IonSpecies parse_species(const json &j) {
    if (j.is_string()) {
        try {
            return species_preset(j.get<std::string>());
        } catch (const UnknownSpeciesError &e) {
            throw ConfigError(ConfigError::Kind::schema, std::string("key 'species': ") + e.what());
        }
    }
    if (!j.is_object()) {
        throw ConfigError(ConfigError::Kind::schema, "key 'species' must be a preset name or an object");
    }
    reject_unknown(j, {"name", "fragment_mass_kg", "molecule_mass_kg", "charge_e"}, "species.");
    const auto name = j.value("name", std::string("custom"));
    const auto q = j.find("charge_e");
    if (q == j.end() || !q->is_number_integer()) {
        throw ConfigError(ConfigError::Kind::schema, "key 'species.charge_e' must be an integer");
    }
    try {
        return make_species(name, get_number(j, "fragment_mass_kg", "species."),
                            get_number(j, "molecule_mass_kg", "species."), q->get<int>());
    } catch (const std::invalid_argument &e) {
        throw ConfigError(ConfigError::Kind::invariant, e.what());
    }
}

inline json species_to_json(const IonSpecies &s) {
    try {
        if (species_preset(s.name) == s) {
            return s.name;
        }
    } catch (const UnknownSpeciesError &) {
    }
    return json{{"name", s.name},
                {"fragment_mass_kg", s.fragment_mass},
                {"molecule_mass_kg", s.molecule_mass},
                {"charge_e", s.charge_number()}};
}

inline std::pair<std::size_t, std::size_t> line_and_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

}  // namespace detail

/// Builds a validated RunConfig from a parsed JSON object (schema below).
///
/// Flat object with unit-suffixed keys: species (preset name or object),
/// D_m, dd_v_m, dd_m, L_m required; dv01_mps, v_z_mps, lens_floor_m optional.
/// Collision keys v_y_mps and dd_c_m go together; the momentum-readout
/// resolution is p_instr_mps (a velocity, times m) or p_instr_kgmps.
/// noise {x_meas_m | "auto", p_meas_kgmps | "auto", x_shift_m, p_shift_kgmps},
/// input {type: "gaussian" | "cat", sigma_x_m | "matched", separation_m,
/// peak_sigma_m, mean_x_m}, events, seed, mode, workers, bins, hist_sigmas.
inline RunConfig config_from_json(const nlohmann::json &j) {
    using detail::get_number;
    using detail::get_number_or;
    if (!j.is_object()) {
        throw ConfigError(ConfigError::Kind::schema, "configuration must be a JSON object");
    }
    detail::reject_unknown(j,
                           {"species", "D_m", "dd_v_m", "dd_m", "dv01_mps", "L_m", "v_z_mps", "lens_floor_m", "v_y_mps",
                            "dd_c_m", "p_instr_mps", "p_instr_kgmps", "noise", "input", "events", "seed", "mode", "workers", "bins",
                            "hist_sigmas"},
                           "");
    RunConfig cfg;
    if (!j.contains("species")) {
        throw ConfigError(ConfigError::Kind::schema, "missing required key 'species'");
    }
    cfg.source.species = detail::parse_species(j["species"]);
    cfg.source.D = get_number(j, "D_m", "");
    cfg.source.dd_v = get_number(j, "dd_v_m", "");
    cfg.source.dd = get_number(j, "dd_m", "");
    cfg.source.L = get_number(j, "L_m", "");
    cfg.source.dv01 = get_number_or(j, "dv01_mps", 0.0, "");
    cfg.source.v_z = get_number_or(j, "v_z_mps", 0.0, "");
    cfg.source.lens_floor = get_number_or(j, "lens_floor_m", 0.0, "");

    const bool has_vy = j.contains("v_y_mps");
    const bool has_ddc = j.contains("dd_c_m");
    if (has_vy != has_ddc) {
        throw ConfigError(ConfigError::Kind::schema, "collision keys 'v_y_mps' and 'dd_c_m' must be given together");
    }
    if (has_vy) {
        CollisionParams c;
        c.species = cfg.source.species;
        c.v_y = get_number(j, "v_y_mps", "");
        c.dd_c = get_number(j, "dd_c_m", "");
        if (j.contains("p_instr_mps") && j.contains("p_instr_kgmps")) {
            throw ConfigError(ConfigError::Kind::schema, "give only one of 'p_instr_mps', 'p_instr_kgmps'");
        }
        c.p_instr = j.contains("p_instr_kgmps") ? get_number(j, "p_instr_kgmps", "")
                                                : get_number_or(j, "p_instr_mps", 0.0, "") * c.species.fragment_mass;
        cfg.collision = c;
    } else if (j.contains("p_instr_mps") || j.contains("p_instr_kgmps")) {
        throw ConfigError(ConfigError::Kind::schema, "instrument resolution requires the collision keys 'v_y_mps', 'dd_c_m'");
    }

    if (j.contains("noise")) {
        const auto &n = j["noise"];
        if (!n.is_object()) {
            throw ConfigError(ConfigError::Kind::schema, "key 'noise' must be an object");
        }
        detail::reject_unknown(n, {"x_meas_m", "p_meas_kgmps", "x_shift_m", "p_shift_kgmps"}, "noise.");
        cfg.noise.dx_meas = detail::get_number_or_keyword(n, "x_meas_m", "auto", "noise.");
        cfg.noise.dp_meas = detail::get_number_or_keyword(n, "p_meas_kgmps", "auto", "noise.");
        cfg.noise.dx_shift = get_number_or(n, "x_shift_m", 0.0, "noise.");
        cfg.noise.dp_shift = get_number_or(n, "p_shift_kgmps", 0.0, "noise.");
    }

    if (j.contains("input")) {
        const auto &in = j["input"];
        if (!in.is_object()) {
            throw ConfigError(ConfigError::Kind::schema, "key 'input' must be an object");
        }
        detail::reject_unknown(in, {"type", "sigma_x_m", "separation_m", "peak_sigma_m", "mean_x_m"}, "input.");
        const std::string type = in.value("type", std::string("gaussian"));
        if (type == "gaussian") {
            cfg.input.kind = InputKind::gaussian;
            cfg.input.sigma_x = detail::get_number_or_keyword(in, "sigma_x_m", "matched", "input.");
            if (in.contains("separation_m") || in.contains("peak_sigma_m")) {
                throw ConfigError(ConfigError::Kind::schema,
                                  "keys 'input.separation_m', 'input.peak_sigma_m' apply only to type \"cat\"");
            }
        } else if (type == "cat") {
            cfg.input.kind = InputKind::cat;
            cfg.input.separation = get_number(in, "separation_m", "input.");
            cfg.input.peak_sigma = get_number(in, "peak_sigma_m", "input.");
            if (in.contains("sigma_x_m")) {
                throw ConfigError(ConfigError::Kind::schema, "key 'input.sigma_x_m' applies only to type \"gaussian\"");
            }
        } else {
            throw ConfigError(ConfigError::Kind::schema, "key 'input.type' must be \"gaussian\" or \"cat\"");
        }
        cfg.input.mean_x = get_number_or(in, "mean_x_m", 0.0, "input.");
    }

    cfg.n_events = detail::get_count(j, "events", cfg.n_events);
    cfg.seed = detail::get_count(j, "seed", cfg.seed);
    cfg.workers = static_cast<unsigned>(detail::get_count(j, "workers", cfg.workers));
    cfg.bins = static_cast<std::size_t>(detail::get_count(j, "bins", cfg.bins));
    cfg.hist_sigmas = get_number_or(j, "hist_sigmas", cfg.hist_sigmas, "");
    if (j.contains("mode")) {
        const auto &m = j["mode"];
        if (m == "quantum") {
            cfg.mode = Mode::quantum;
        } else if (m == "classical") {
            cfg.mode = Mode::classical;
        } else {
            throw ConfigError(ConfigError::Kind::schema, "key 'mode' must be \"quantum\" or \"classical\"");
        }
    }

    try {
        cfg.validate();
        if (cfg.input.kind == InputKind::cat && cfg.mode == Mode::classical) {
            throw std::invalid_argument("RunConfig: classical mode needs a Gaussian input");
        }
    } catch (const std::invalid_argument &e) {
        throw ConfigError(ConfigError::Kind::invariant, e.what());
    }
    return cfg;
}

/// Parses configuration text; syntax errors report line and column.
inline nlohmann::json parse_config_json(std::string_view text) {
    try {
        return nlohmann::json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error &e) {
        const auto [line, col] = detail::line_and_column(text, e.byte == 0 ? 0 : e.byte - 1);
        throw ConfigError(ConfigError::Kind::syntax, "syntax error at line " + std::to_string(line) + ", column " +
                                                         std::to_string(col) + ": " + e.what());
    }
}

inline RunConfig parse_config(std::string_view text) { return config_from_json(parse_config_json(text)); }

/// Canonical JSON form of a configuration; parse(to_json(c)) reproduces c.
inline nlohmann::json config_to_json(const RunConfig &cfg) {
    using nlohmann::json;
    json j;
    j["species"] = detail::species_to_json(cfg.source.species);
    j["D_m"] = cfg.source.D;
    j["dd_v_m"] = cfg.source.dd_v;
    j["dd_m"] = cfg.source.dd;
    j["dv01_mps"] = cfg.source.dv01;
    j["L_m"] = cfg.source.L;
    j["v_z_mps"] = cfg.source.v_z;
    j["lens_floor_m"] = cfg.source.lens_floor;
    if (cfg.collision) {
        j["v_y_mps"] = cfg.collision->v_y;
        j["dd_c_m"] = cfg.collision->dd_c;
        j["p_instr_kgmps"] = cfg.collision->p_instr;
    }
    const auto or_keyword = [](const std::optional<double> &v, const char *kw) { return v ? json(*v) : json(kw); };
    j["noise"] = json{{"x_meas_m", or_keyword(cfg.noise.dx_meas, "auto")},
                      {"p_meas_kgmps", or_keyword(cfg.noise.dp_meas, "auto")},
                      {"x_shift_m", cfg.noise.dx_shift},
                      {"p_shift_kgmps", cfg.noise.dp_shift}};
    if (cfg.input.kind == InputKind::gaussian) {
        j["input"] = json{{"type", "gaussian"},
                          {"sigma_x_m", or_keyword(cfg.input.sigma_x, "matched")},
                          {"mean_x_m", cfg.input.mean_x}};
    } else {
        j["input"] = json{{"type", "cat"},
                          {"separation_m", cfg.input.separation},
                          {"peak_sigma_m", cfg.input.peak_sigma},
                          {"mean_x_m", cfg.input.mean_x}};
    }
    j["events"] = cfg.n_events;
    j["seed"] = cfg.seed;
    j["mode"] = to_string(cfg.mode);
    j["workers"] = cfg.workers;
    j["bins"] = cfg.bins;
    j["hist_sigmas"] = cfg.hist_sigmas;
    return j;
}

/// Applies a `key=value` override to raw configuration JSON. Dotted keys
/// address nested objects; values are read as JSON, falling back to a string.
inline void apply_override(nlohmann::json &j, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0) {
        throw ConfigError(ConfigError::Kind::schema, "override '" + std::string(assignment) + "' is not key=value");
    }
    const std::string key(assignment.substr(0, eq));
    const std::string raw(assignment.substr(eq + 1));
    nlohmann::json value;
    try {
        value = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::parse_error &) {
        value = raw;
    }
    nlohmann::json *node = &j;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (dot == std::string::npos) {
            (*node)[part] = value;
            break;
        }
        if (!node->contains(part)) {
            (*node)[part] = nlohmann::json::object();
        }
        node = &(*node)[part];
        if (!node->is_object()) {
            throw ConfigError(ConfigError::Kind::schema, "override '" + key + "': '" + part + "' is not an object");
        }
        start = dot + 1;
    }
}

}  // namespace mwtele
