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
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "mwtele/collision.hpp"
#include "mwtele/noise.hpp"
#include "mwtele/phasespace.hpp"
#include "mwtele/physconst.hpp"
#include "mwtele/rng.hpp"
#include "mwtele/source.hpp"

namespace mwtele {

/// Total teleportation errors Delta x_T, Delta p_T.
struct ErrorBudget {
    double dxT = 0.0;  // m
    double dpT = 0.0;  // kg m/s
    double product_over_hbar = 0.0;
};

/// Quadrature sums of source, measurement and shifter spreads.
inline ErrorBudget error_budget(double dd, double dPx, const NoiseBudget &noise) {
    noise.validate();
    if (!(dd >= 0.0) || !(dPx >= 0.0)) {
        throw std::invalid_argument("error_budget: dd >= 0 and dPx >= 0 required");
    }
    ErrorBudget b;
    b.dxT = std::sqrt(dd * dd + noise.dx_meas * noise.dx_meas + noise.dx_shift * noise.dx_shift);
    b.dpT = std::sqrt(dPx * dPx + noise.dp_meas * noise.dp_meas + noise.dp_shift * noise.dp_shift);
    b.product_over_hbar = b.dxT * b.dpT / si::hbar;
    return b;
}

struct Nonclassicality {
    double value = 0.0;  // dxT dpT / hbar
    bool nonclassical = false;
};

/// Non-classical iff dxT dpT < hbar (strict).
inline Nonclassicality nonclassicality(const ErrorBudget &budget) {
    return {budget.product_over_hbar, budget.product_over_hbar < 1.0};
}

/// Best Gaussian-input fidelity, 1 / (1 + dxT dpT / hbar).
inline double f_max(double product_over_hbar) {
    if (!(product_over_hbar >= 0.0)) {
        throw std::invalid_argument("f_max: product_over_hbar >= 0 required");
    }
    return 1.0 / (1.0 + product_over_hbar);
}

/// MUS input whose aspect ratio matches the noise, sigma_x / sigma_p = dxT / dpT.
inline GaussianState matched_input(const ErrorBudget &budget) {
    if (!(budget.dxT > 0.0) || !(budget.dpT > 0.0)) {
        throw std::invalid_argument("matched_input: dxT > 0 and dpT > 0 required");
    }
    return mus_wavepacket(std::sqrt(0.5 * si::hbar * budget.dxT / budget.dpT));
}

//---------------------------------------------------------------------------//
// Run configuration
//---------------------------------------------------------------------------//

enum class Mode { quantum, classical };

inline const char *to_string(Mode m) { return m == Mode::quantum ? "quantum" : "classical"; }

/// Noise settings; an empty optional means "auto" (derived from source and collision).
struct NoiseSpec {
    std::optional<double> dx_meas;
    std::optional<double> dp_meas;
    double dx_shift = 0.0;
    double dp_shift = 0.0;
};

enum class InputKind { gaussian, cat };

/// Input wavepacket of particle 2. For Gaussian input an empty `sigma_x`
/// selects the matched MUS for the run's error budget.
struct InputSpec {
    InputKind kind = InputKind::gaussian;
    std::optional<double> sigma_x;  // m
    double separation = 0.0;        // m (cat)
    double peak_sigma = 0.0;        // m (cat)
    double mean_x = 0.0;            // m
};

struct RunConfig {
    SourceParams source;
    std::optional<CollisionParams> collision;
    NoiseSpec noise;
    InputSpec input;
    std::uint64_t n_events = 50000;
    std::uint64_t seed = 1;
    Mode mode = Mode::quantum;
    unsigned workers = 1;
    std::size_t bins = 100;
    double hist_sigmas = 5.0;

    void validate() const {
        source.validate();
        if (collision) {
            collision->validate();
            if (collision->species != source.species) {
                throw std::invalid_argument("RunConfig: collision species must match the source fragment");
            }
        }
        if (n_events < 1) {
            throw std::invalid_argument("RunConfig: events >= 1 violated");
        }
        if (workers < 1) {
            throw std::invalid_argument("RunConfig: workers >= 1 violated");
        }
        if (bins < 1) {
            throw std::invalid_argument("RunConfig: bins >= 1 violated");
        }
        if (!(hist_sigmas > 0.0)) {
            throw std::invalid_argument("RunConfig: hist_sigmas > 0 violated");
        }
        for (double v : {noise.dx_shift, noise.dp_shift, noise.dx_meas.value_or(0.0), noise.dp_meas.value_or(0.0)}) {
            if (!(v >= 0.0) || !std::isfinite(v)) {
                throw std::invalid_argument("RunConfig: noise resolutions >= 0 violated");
            }
        }
        if (input.kind == InputKind::gaussian && input.sigma_x && !(*input.sigma_x > 0.0)) {
            throw std::invalid_argument("RunConfig: input sigma_x > 0 violated");
        }
        if (input.kind == InputKind::cat) {
            CatState{input.separation, input.peak_sigma, input.mean_x}.validate();
        }
    }

    const CollisionParams &require_collision() const {
        if (!collision) {
            throw std::invalid_argument("RunConfig: collision parameters (v_y_mps, dd_c_m) are required for this run");
        }
        return *collision;
    }
};

/// Resolves "auto" noise entries. With `check_validity` false the position
/// resolution formula is evaluated even below the p_y threshold.
inline NoiseBudget resolve_noise(const RunConfig &cfg, bool check_validity = true) {
    NoiseBudget n;
    n.dx_shift = cfg.noise.dx_shift;
    n.dp_shift = cfg.noise.dp_shift;
    if (cfg.noise.dx_meas) {
        n.dx_meas = *cfg.noise.dx_meas;
    } else {
        const auto &c = cfg.require_collision();
        n.dx_meas = check_validity ? position_resolution(c.species, cfg.source.D, cfg.source.dd_v, c.v_y)
                                   : position_resolution_unchecked(c.species, cfg.source.D, cfg.source.dd_v, c.v_y);
    }
    if (cfg.noise.dp_meas) {
        n.dp_meas = *cfg.noise.dp_meas;
    } else {
        n.dp_meas = momentum_resolution(cfg.source.com_momentum_spread(), cfg.require_collision().p_instr);
    }
    return n;
}

inline ErrorBudget config_budget(const RunConfig &cfg, const NoiseBudget &noise) {
    return error_budget(cfg.source.effective_dd(), cfg.source.com_momentum_spread(), noise);
}

inline GaussianState resolve_gaussian_input(const RunConfig &cfg, const ErrorBudget &budget) {
    if (cfg.input.kind != InputKind::gaussian) {
        throw std::invalid_argument("trajectory sampling needs a Gaussian input; two-peak states have negative "
                                    "Wigner regions and are handled by the density-convolution (cat) run");
    }
    GaussianState g = cfg.input.sigma_x ? mus_wavepacket(*cfg.input.sigma_x) : matched_input(budget);
    g.mean_x = cfg.input.mean_x;
    return g;
}

//---------------------------------------------------------------------------//
// Report
//---------------------------------------------------------------------------//

struct CatDensities {
    DensityGrid x_in, x_out, p_in, p_out;
    double visibility_in = 0.0;
    double visibility_out = 0.0;
    double visibility_ratio_expected = 0.0;  // exp(-a^2 dpT^2 / (2 hbar^2))
    std::optional<double> peak_to_valley_in;
    std::optional<double> peak_to_valley_out;
};

struct RunReport {
    Mode mode = Mode::quantum;
    NoiseBudget noise;
    ErrorBudget budget;
    double f_max = 0.0;
    bool nonclassical = false;
    std::optional<GaussianState> input;
    PhaseMoments moments;
    std::optional<Histogram1D> hist_x;
    std::optional<Histogram1D> hist_p;
    std::optional<double> fidelity_estimate;
    std::optional<CatDensities> cat;
    std::vector<std::string> warnings;
    unsigned workers = 1;
    std::uint64_t n_events = 0;
    std::uint64_t seed = 0;
};

/// One protocol step on the readout particle: shift particle 0 by the
/// measured (-x_minus, +p_plus) with shifter noise.
inline PhasePoint run_event(const PhasePoint & /*input_sample*/, const std::pair<PhasePoint, PhasePoint> &epr,
                            const MeasurementRecord &meas, const NoiseBudget &noise, Rng &rng) {
    const PhasePoint &p0 = epr.first;
    return {p0.x - meas.x_minus_meas + rng.gauss(noise.dx_shift), p0.p + meas.p_plus_meas + rng.gauss(noise.dp_shift)};
}

namespace detail {

struct WorkerResult {
    PhaseMoments moments;
    Histogram1D hx, hp;

    void merge(const WorkerResult &o) {
        moments.merge(o.moments);
        hx.merge(o.hx);
        hp.merge(o.hp);
    }
};

/// Splits [0, n) into `workers` contiguous blocks, runs `body(rng, count, out)`
/// on each block with Rng(seed, worker) and merges the partial results in
/// worker order. The result depends only on (seed, workers).
template <class Result, class Body>
Result run_partitioned(std::uint64_t n, std::uint64_t seed, unsigned workers, const Result &empty, Body body) {
    std::vector<Result> parts(workers, empty);
    auto job = [&](unsigned w) {
        const std::uint64_t begin = n * w / workers;
        const std::uint64_t end = n * (w + 1) / workers;
        Rng rng(seed, w);
        body(rng, end - begin, parts[w]);
    };
    if (workers == 1) {
        job(0);
    } else {
        std::vector<std::thread> threads;
        threads.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            threads.emplace_back(job, w);
        }
        for (auto &t : threads) {
            t.join();
        }
    }
    Result total = std::move(parts[0]);
    for (unsigned w = 1; w < workers; ++w) {
        total.merge(parts[w]);
    }
    return total;
}

inline void record(WorkerResult &r, const PhasePoint &pt) {
    r.moments.add(pt);
    r.hx.add(pt.x);
    r.hp.add(pt.p);
}

inline BinSpec centred_bins(double mean, double sigma, const RunConfig &cfg) {
    return BinSpec{mean - cfg.hist_sigmas * sigma, mean + cfg.hist_sigmas * sigma, cfg.bins};
}

inline void finish_report(RunReport &rep, WorkerResult &&r, const GaussianState &input) {
    rep.moments = r.moments;
    rep.hist_x = std::move(r.hx);
    rep.hist_p = std::move(r.hp);
    rep.fidelity_estimate = std::min(1.0, gaussian_overlap(input, rep.moments));
}

}  // namespace detail

/// Quantum teleportation of a Gaussian input by trajectory sampling of the
/// Wigner function: per event sample particle 2, an EPR pair, measure
/// (x_minus, p_plus) on particles 1 and 2, and shift particle 0.
inline RunReport run_ensemble(const RunConfig &cfg) {
    cfg.validate();
    const CollisionParams &coll = cfg.require_collision();
    RunReport rep;
    rep.mode = Mode::quantum;
    rep.noise = resolve_noise(cfg);
    rep.budget = config_budget(cfg, rep.noise);
    rep.f_max = f_max(rep.budget.product_over_hbar);
    rep.nonclassical = nonclassicality(rep.budget).nonclassical;
    rep.warnings = design_check(cfg.source, coll);
    rep.workers = cfg.workers;
    rep.n_events = cfg.n_events;
    rep.seed = cfg.seed;

    const GaussianState input = resolve_gaussian_input(cfg, rep.budget);
    rep.input = input;
    const EprPairState epr = epr_pair_state(cfg.source);
    const NoiseBudget noise = rep.noise;

    const BinSpec bx = detail::centred_bins(input.mean_x, std::hypot(input.sigma_x, rep.budget.dxT), cfg);
    const BinSpec bp = detail::centred_bins(input.mean_p, std::hypot(input.sigma_p, rep.budget.dpT), cfg);
    auto result = detail::run_partitioned(
        cfg.n_events, cfg.seed, cfg.workers, detail::WorkerResult{{}, Histogram1D(bx), Histogram1D(bp)}, [&](Rng &rng, std::uint64_t count, detail::WorkerResult &out) {
            for (std::uint64_t i = 0; i < count; ++i) {
                const PhasePoint in = sample_gaussian(input, rng);
                const auto pair = sample_epr_pair(epr, rng);
                const MeasurementRecord meas = measure(pair.second, in, coll, noise, rng);
                detail::record(out, run_event(in, pair, meas, noise, rng));
            }
        });
    detail::finish_report(rep, std::move(result), input);
    return rep;
}

/// Measure-and-prepare baseline: noisy simultaneous measurement of x2 and
/// p2 (noise equal to the input MUS widths), then a fresh MUS at the result.
inline RunReport run_classical(const RunConfig &cfg) {
    cfg.validate();
    RunReport rep;
    rep.mode = Mode::classical;
    rep.workers = cfg.workers;
    rep.n_events = cfg.n_events;
    rep.seed = cfg.seed;
    if (cfg.collision) {
        rep.warnings = design_check(cfg.source, *cfg.collision);
    }

    GaussianState input;
    if (cfg.input.kind == InputKind::gaussian && !cfg.input.sigma_x) {
        input = resolve_gaussian_input(cfg, config_budget(cfg, resolve_noise(cfg)));
    } else {
        input = resolve_gaussian_input(cfg, ErrorBudget{});
    }
    if (!input.is_pure() || input.corr != 0.0) {
        throw std::invalid_argument("run_classical: input must be a MUS");
    }
    rep.input = input;
    rep.noise = NoiseBudget{input.sigma_x, input.sigma_p, 0.0, 0.0};
    rep.budget = error_budget(0.0, 0.0, NoiseBudget{std::sqrt(2.0) * input.sigma_x, std::sqrt(2.0) * input.sigma_p});
    rep.budget.product_over_hbar = 2.0 * input.sigma_x * input.sigma_p / si::hbar;
    rep.f_max = f_max(rep.budget.product_over_hbar);
    rep.nonclassical = nonclassicality(rep.budget).nonclassical;

    const double out_sx = std::sqrt(3.0) * input.sigma_x;
    const double out_sp = std::sqrt(3.0) * input.sigma_p;
    const BinSpec bx = detail::centred_bins(input.mean_x, out_sx, cfg);
    const BinSpec bp = detail::centred_bins(input.mean_p, out_sp, cfg);
    auto result = detail::run_partitioned(
        cfg.n_events, cfg.seed, cfg.workers, detail::WorkerResult{{}, Histogram1D(bx), Histogram1D(bp)}, [&](Rng &rng, std::uint64_t count, detail::WorkerResult &out) {
            for (std::uint64_t i = 0; i < count; ++i) {
                const PhasePoint in = sample_gaussian(input, rng);
                const double xm = in.x + rng.gauss(input.sigma_x);
                const double pm = in.p + rng.gauss(input.sigma_p);
                detail::record(out, PhasePoint{xm + rng.gauss(input.sigma_x), pm + rng.gauss(input.sigma_p)});
            }
        });
    detail::finish_report(rep, std::move(result), input);
    return rep;
}

/// Grid layout used for cat-state densities.
struct CatGrids {
    GridSpec x;
    GridSpec p;
};

/// Grids covering the input support plus 6 kernel widths, with spacing fine
/// enough for the fringes and for the convolution (< sigma/3).
inline CatGrids cat_grids(const CatState &cat, const ErrorBudget &budget) {
    const auto make = [](double centre, double reach, double spacing) {
        const double half = reach;
        const auto n = static_cast<std::size_t>(std::ceil(2.0 * half / spacing)) + 1;
        return GridSpec{centre - half, centre + half, n | 1u};
    };
    double hx = cat.peak_sigma / 20.0;
    if (budget.dxT > 0.0) {
        hx = std::min(hx, budget.dxT / 4.0);
    }
    const double reach_x = 0.5 * cat.separation + 6.0 * cat.peak_sigma + 6.0 * budget.dxT;

    const double sigma_p = si::hbar / (2.0 * cat.peak_sigma);
    double hp = sigma_p / 20.0;
    if (cat.separation > 0.0) {
        hp = std::min(hp, 2.0 * si::pi * si::hbar / cat.separation / 40.0);
    }
    if (budget.dpT > 0.0) {
        hp = std::min(hp, budget.dpT / 4.0);
    }
    const double reach_p = 6.0 * sigma_p + 6.0 * budget.dpT;
    return {make(cat.mean_x, reach_x, hx), make(0.0, reach_p, hp)};
}

/// Teleported densities of a two-peak input: the input position and
/// momentum densities smoothed by Gaussian kernels of widths dxT and dpT.
inline RunReport run_cat_output(const RunConfig &cfg) {
    cfg.validate();
    if (cfg.input.kind != InputKind::cat) {
        throw std::invalid_argument("run_cat_output: cat input required");
    }
    RunReport rep;
    rep.mode = cfg.mode;
    rep.workers = cfg.workers;
    rep.n_events = cfg.n_events;
    rep.seed = cfg.seed;
    rep.noise = resolve_noise(cfg);
    rep.budget = config_budget(cfg, rep.noise);
    rep.f_max = f_max(rep.budget.product_over_hbar);
    rep.nonclassical = nonclassicality(rep.budget).nonclassical;
    rep.warnings = design_check(cfg.source, cfg.require_collision());

    const CatState cat{cfg.input.separation, cfg.input.peak_sigma, cfg.input.mean_x};
    const CatGrids grids = cat_grids(cat, rep.budget);
    CatDensities d;
    d.x_in = cat_position_density(cat, grids.x);
    d.p_in = cat_momentum_density(cat, grids.p);
    d.x_out = convolve_density(d.x_in, rep.budget.dxT);
    d.p_out = convolve_density(d.p_in, rep.budget.dpT);
    const double k = cat.separation / si::hbar;
    d.visibility_in = fringe_visibility(d.p_in, k);
    d.visibility_out = fringe_visibility(d.p_out, k);
    const double z = cat.separation * rep.budget.dpT / si::hbar;
    d.visibility_ratio_expected = std::exp(-0.5 * z * z);
    d.peak_to_valley_in = peak_to_valley(d.x_in);
    d.peak_to_valley_out = peak_to_valley(d.x_out);
    rep.cat = std::move(d);
    return rep;
}

/// Dispatches on input kind and mode.
inline RunReport run(const RunConfig &cfg) {
    if (cfg.input.kind == InputKind::cat) {
        return run_cat_output(cfg);
    }
    return cfg.mode == Mode::quantum ? run_ensemble(cfg) : run_classical(cfg);
}

//---------------------------------------------------------------------------//
// Parameter sweeps
//---------------------------------------------------------------------------//

struct SweepRow {
    double value = 0.0;
    bool valid = true;  // p_y above the collision-resolution threshold
    double product_over_hbar = 0.0;
    double f_max = 0.0;
    std::optional<double> fidelity_estimate;
};

/// Names accepted by `sweep`, with their config-key aliases.
inline bool set_sweep_parameter(RunConfig &cfg, const std::string &name, double value) {
    if (name == "D" || name == "D_m") {
        cfg.source.D = value;
    } else if (name == "dd" || name == "dd_m") {
        cfg.source.dd = value;
    } else if (name == "dd_v" || name == "dd_v_m") {
        cfg.source.dd_v = value;
    } else if (name == "v_y" || name == "v_y_mps") {
        cfg.require_collision();
        cfg.collision->v_y = value;
    } else {
        return false;
    }
    return true;
}

/// Evaluates the budget and F_max for each value of one parameter, plus the
/// Monte Carlo fidelity for Gaussian inputs. Rows below the validity
/// threshold are kept (formula evaluated anyway) and marked invalid.
inline std::vector<SweepRow> sweep(const RunConfig &base, const std::string &name, const std::vector<double> &values) {
    {
        RunConfig probe = base;
        if (!set_sweep_parameter(probe, name, 0.0)) {
            throw std::invalid_argument("sweep: unknown parameter '" + name + "' (expected D, dd, v_y or dd_v)");
        }
    }
    std::vector<SweepRow> rows;
    rows.reserve(values.size());
    for (double v : values) {
        RunConfig cfg = base;
        set_sweep_parameter(cfg, name, v);
        cfg.validate();
        SweepRow row;
        row.value = v;
        if (cfg.collision) {
            row.valid = cfg.collision->p_y() >= validity_threshold(cfg.collision->species, cfg.source.D);
        }
        const NoiseBudget noise = resolve_noise(cfg, false);
        const ErrorBudget budget = config_budget(cfg, noise);
        row.product_over_hbar = budget.product_over_hbar;
        row.f_max = f_max(budget.product_over_hbar);
        if (cfg.input.kind == InputKind::gaussian) {
            RunConfig mc = cfg;
            mc.noise.dx_meas = noise.dx_meas;
            mc.noise.dp_meas = noise.dp_meas;
            if (!mc.input.sigma_x) {
                mc.input.sigma_x = matched_input(budget).sigma_x;
            }
            const RunReport r = mc.mode == Mode::quantum ? run_ensemble(mc) : run_classical(mc);
            row.fidelity_estimate = r.fidelity_estimate;
        }
        rows.push_back(row);
    }
    return rows;
}

//---------------------------------------------------------------------------//
// EPR pair statistics
//---------------------------------------------------------------------------//

/// Ensemble of EPR pairs: correlated (x0 - x1, p0 + p1) against the
/// single-particle marginals (x0, p0).
struct EprDemoReport {
    EprPairState state;
    EprCondition condition;
    PhaseMoments collective;  // (x0 - x1, p0 + p1)
    PhaseMoments single;      // (x0, p0)
    Histogram1D hist_xdiff, hist_psum, hist_x0, hist_p0;
    std::vector<std::string> warnings;
    unsigned workers = 1;
    std::uint64_t n_events = 0;
    std::uint64_t seed = 0;
};

inline EprDemoReport run_epr_demo(const RunConfig &cfg) {
    cfg.validate();
    EprDemoReport rep;
    rep.state = epr_pair_state(cfg.source);
    rep.condition = epr_condition(rep.state);
    if (cfg.collision) {
        rep.warnings = design_check(cfg.source, *cfg.collision);
    }
    rep.workers = cfg.workers;
    rep.n_events = cfg.n_events;
    rep.seed = cfg.seed;

    const EprPairState st = rep.state;
    const double sx0 = 0.5 * std::hypot(st.sigma_xsum, st.sigma_xdiff);
    const double sp0 = 0.5 * std::hypot(st.sigma_psum, st.sigma_pdiff);
    struct Acc {
        PhaseMoments collective, single;
        Histogram1D xdiff, psum, x0, p0;
        void merge(const Acc &o) {
            collective.merge(o.collective);
            single.merge(o.single);
            xdiff.merge(o.xdiff);
            psum.merge(o.psum);
            x0.merge(o.x0);
            p0.merge(o.p0);
        }
    };
    const Acc empty{{},
                    {},
                    Histogram1D(detail::centred_bins(0.0, st.sigma_xdiff, cfg)),
                    Histogram1D(detail::centred_bins(0.0, st.sigma_psum, cfg)),
                    Histogram1D(detail::centred_bins(0.0, sx0, cfg)),
                    Histogram1D(detail::centred_bins(0.0, sp0, cfg))};
    Acc acc = detail::run_partitioned(cfg.n_events, cfg.seed, cfg.workers, empty,
                                      [&](Rng &rng, std::uint64_t count, Acc &out) {
                                          for (std::uint64_t i = 0; i < count; ++i) {
                                              const auto [a, b] = sample_epr_pair(st, rng);
                                              const PhasePoint c{a.x - b.x, a.p + b.p};
                                              out.collective.add(c);
                                              out.single.add(a);
                                              out.xdiff.add(c.x);
                                              out.psum.add(c.p);
                                              out.x0.add(a.x);
                                              out.p0.add(a.p);
                                          }
                                      });
    rep.collective = acc.collective;
    rep.single = acc.single;
    rep.hist_xdiff = std::move(acc.xdiff);
    rep.hist_psum = std::move(acc.psum);
    rep.hist_x0 = std::move(acc.x0);
    rep.hist_p0 = std::move(acc.p0);
    return rep;
}

}  // namespace mwtele
