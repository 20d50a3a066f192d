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
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mwtele/physconst.hpp"
#include "mwtele/rng.hpp"

namespace mwtele {

/// One classical trajectory sample in the (x, p_x) plane.
struct PhasePoint {
    double x = 0.0;  // m
    double p = 0.0;  // kg m/s

    bool operator==(const PhasePoint &) const = default;
};

/// Single-mode Gaussian Wigner function.
struct GaussianState {
    double mean_x = 0.0;   // m
    double mean_p = 0.0;   // kg m/s
    double sigma_x = 0.0;  // m
    double sigma_p = 0.0;  // kg m/s
    double corr = 0.0;

    double uncertainty_product() const { return sigma_x * sigma_p * std::sqrt(1.0 - corr * corr); }

    /// True when the state saturates sigma_x sigma_p sqrt(1 - corr^2) = hbar/2.
    bool is_pure() const { return std::abs(uncertainty_product() / (0.5 * si::hbar) - 1.0) <= 1e-12; }

    void validate() const {
        if (!(sigma_x > 0.0) || !(sigma_p > 0.0) || !std::isfinite(sigma_x) || !std::isfinite(sigma_p)) {
            throw std::invalid_argument("GaussianState: sigma_x > 0 and sigma_p > 0 required");
        }
        if (!(std::abs(corr) < 1.0)) {
            throw std::invalid_argument("GaussianState: |corr| < 1 required");
        }
        if (!std::isfinite(mean_x) || !std::isfinite(mean_p)) {
            throw std::invalid_argument("GaussianState: means must be finite");
        }
        if (uncertainty_product() < 0.5 * si::hbar * (1.0 - 1e-12)) {
            throw std::invalid_argument("GaussianState: sigma_x sigma_p sqrt(1-corr^2) >= hbar/2 violated");
        }
    }
};

/// Equal-weight superposition of two Gaussian wavepackets at mean_x +- separation/2.
struct CatState {
    double separation = 0.0;  // m
    double peak_sigma = 0.0;  // m, std of each peak's |psi|^2
    double mean_x = 0.0;      // m

    void validate() const {
        if (!(separation >= 0.0) || !std::isfinite(separation)) {
            throw std::invalid_argument("CatState: separation >= 0 required");
        }
        if (!(peak_sigma > 0.0) || !std::isfinite(peak_sigma)) {
            throw std::invalid_argument("CatState: peak_sigma > 0 required");
        }
    }
};

/// Minimum-uncertainty wavepacket centred at the origin.
inline GaussianState mus_wavepacket(double sigma_x) {
    if (!(sigma_x > 0.0) || !std::isfinite(sigma_x)) {
        throw std::invalid_argument("mus_wavepacket: sigma_x > 0 required");
    }
    return GaussianState{0.0, 0.0, sigma_x, si::hbar / (2.0 * sigma_x), 0.0};
}

inline PhasePoint sample_gaussian(const GaussianState &state, Rng &rng) {
    const double z1 = rng.gauss();
    const double z2 = rng.gauss();
    return {state.mean_x + state.sigma_x * z1,
            state.mean_p + state.sigma_p * (state.corr * z1 + std::sqrt(1.0 - state.corr * state.corr) * z2)};
}

inline std::vector<PhasePoint> sample_gaussian(const GaussianState &state, Rng &rng, std::size_t n) {
    state.validate();
    if (n == 0) {
        throw std::invalid_argument("sample_gaussian: n >= 1 required");
    }
    std::vector<PhasePoint> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(sample_gaussian(state, rng));
    }
    return out;
}

//---------------------------------------------------------------------------//
// Running moments
//---------------------------------------------------------------------------//

/// Streaming first and second moments of (x, p) samples.
///
/// Merging uses the pairwise update of Chan et al., so partial results from
/// independent workers combine in any grouping.
struct PhaseMoments {
    std::uint64_t count = 0;
    double mean_x = 0.0;
    double mean_p = 0.0;
    double m2_x = 0.0;
    double m2_p = 0.0;
    double c_xp = 0.0;

    void add(const PhasePoint &pt) {
        ++count;
        const double n = static_cast<double>(count);
        const double dx = pt.x - mean_x;
        const double dp = pt.p - mean_p;
        mean_x += dx / n;
        mean_p += dp / n;
        m2_x += dx * (pt.x - mean_x);
        m2_p += dp * (pt.p - mean_p);
        c_xp += dx * (pt.p - mean_p);
    }

    void merge(const PhaseMoments &o) {
        if (o.count == 0) {
            return;
        }
        if (count == 0) {
            *this = o;
            return;
        }
        const double na = static_cast<double>(count);
        const double nb = static_cast<double>(o.count);
        const double n = na + nb;
        const double dx = o.mean_x - mean_x;
        const double dp = o.mean_p - mean_p;
        m2_x += o.m2_x + dx * dx * na * nb / n;
        m2_p += o.m2_p + dp * dp * na * nb / n;
        c_xp += o.c_xp + dx * dp * na * nb / n;
        mean_x += dx * nb / n;
        mean_p += dp * nb / n;
        count += o.count;
    }

    double var_x() const { return count > 1 ? m2_x / static_cast<double>(count - 1) : 0.0; }
    double var_p() const { return count > 1 ? m2_p / static_cast<double>(count - 1) : 0.0; }
    double cov_xp() const { return count > 1 ? c_xp / static_cast<double>(count - 1) : 0.0; }
    double std_x() const { return std::sqrt(var_x()); }
    double std_p() const { return std::sqrt(var_p()); }
    double correlation() const {
        const double d = std::sqrt(var_x() * var_p());
        return d > 0.0 ? cov_xp() / d : 0.0;
    }
};

//---------------------------------------------------------------------------//
// Fidelity
//---------------------------------------------------------------------------//

/// Overlap of a pure MUS input (corr = 0) with its image under additive
/// Gaussian noise of widths dxT, dpT. Equals (1 + dxT dpT/hbar)^-1 when
/// dxT/dpT = sigma_x/sigma_p.
inline double gaussian_fidelity(const GaussianState &input, double dxT, double dpT) {
    input.validate();
    if (!input.is_pure() || input.corr != 0.0) {
        throw std::invalid_argument("gaussian_fidelity: input must be a pure MUS with corr = 0");
    }
    if (!(dxT >= 0.0) || !(dpT >= 0.0)) {
        throw std::invalid_argument("gaussian_fidelity: dxT >= 0 and dpT >= 0 required");
    }
    const double sx2 = input.sigma_x * input.sigma_x;
    const double sp2 = input.sigma_p * input.sigma_p;
    return si::hbar / std::sqrt((2.0 * sx2 + dxT * dxT) * (2.0 * sp2 + dpT * dpT));
}

/// 2 pi hbar times the integral of W_in W_out for a pure Gaussian input and a
/// Gaussian output described by fitted moments.
inline double gaussian_overlap(const GaussianState &input, double out_mean_x, double out_mean_p, double out_var_x,
                               double out_var_p, double out_cov_xp) {
    const double sxx = input.sigma_x * input.sigma_x + out_var_x;
    const double spp = input.sigma_p * input.sigma_p + out_var_p;
    const double sxp = input.corr * input.sigma_x * input.sigma_p + out_cov_xp;
    const double det = sxx * spp - sxp * sxp;
    if (!(det > 0.0)) {
        throw std::domain_error("gaussian_overlap: singular combined covariance");
    }
    const double dx = out_mean_x - input.mean_x;
    const double dp = out_mean_p - input.mean_p;
    const double quad = (spp * dx * dx - 2.0 * sxp * dx * dp + sxx * dp * dp) / det;
    return si::hbar / std::sqrt(det) * std::exp(-0.5 * quad);
}

inline double gaussian_overlap(const GaussianState &input, const PhaseMoments &out) {
    return gaussian_overlap(input, out.mean_x, out.mean_p, out.var_x(), out.var_p(), out.cov_xp());
}

//---------------------------------------------------------------------------//
// Density grids
//---------------------------------------------------------------------------//

/// Uniform grid of `n` points spanning [lo, hi] inclusive.
struct GridSpec {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t n = 0;

    double step() const { return (hi - lo) / static_cast<double>(n - 1); }

    void validate() const {
        if (n < 2 || !(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
            throw std::invalid_argument("GridSpec: n >= 2 and hi > lo required");
        }
    }
};

struct DensityGrid {
    std::vector<double> axis;
    std::vector<double> values;

    std::size_t size() const { return axis.size(); }
    double step() const { return axis.size() > 1 ? axis[1] - axis[0] : 0.0; }

    /// Trapezoid integral of `values`.
    double integral() const {
        if (values.size() < 2) {
            return 0.0;
        }
        double s = 0.5 * (values.front() + values.back());
        for (std::size_t i = 1; i + 1 < values.size(); ++i) {
            s += values[i];
        }
        return s * step();
    }

    void normalize() {
        const double z = integral();
        if (!(z > 0.0)) {
            throw std::domain_error("DensityGrid: cannot normalize a density with zero mass");
        }
        for (double &v : values) {
            v /= z;
        }
    }

    /// Linear interpolation; zero outside the axis.
    double at(double x) const {
        if (axis.empty() || x < axis.front() || x > axis.back()) {
            return 0.0;
        }
        const double u = (x - axis.front()) / step();
        const auto i = std::min(static_cast<std::size_t>(u), axis.size() - 2);
        const double f = u - static_cast<double>(i);
        return values[i] * (1.0 - f) + values[i + 1] * f;
    }

    double mean() const {
        double s = 0.0;
        for (std::size_t i = 0; i < size(); ++i) {
            const double w = (i == 0 || i + 1 == size()) ? 0.5 : 1.0;
            s += w * axis[i] * values[i];
        }
        return s * step() / integral();
    }

    double variance() const {
        const double mu = mean();
        double s = 0.0;
        for (std::size_t i = 0; i < size(); ++i) {
            const double w = (i == 0 || i + 1 == size()) ? 0.5 : 1.0;
            s += w * (axis[i] - mu) * (axis[i] - mu) * values[i];
        }
        return s * step() / integral();
    }
};

namespace detail {

inline std::vector<double> make_axis(const GridSpec &spec) {
    spec.validate();
    std::vector<double> axis(spec.n);
    const double h = spec.step();
    for (std::size_t i = 0; i < spec.n; ++i) {
        axis[i] = spec.lo + h * static_cast<double>(i);
    }
    axis.back() = spec.hi;
    return axis;
}

inline void require_cover(const GridSpec &spec, double lo, double hi, const char *what) {
    if (spec.lo > lo || spec.hi < hi) {
        throw std::invalid_argument(std::string(what) + ": grid does not cover the support [" + std::to_string(lo) +
                                    ", " + std::to_string(hi) + "]");
    }
}

/// Vertex value of the parabola through three equally spaced samples.
inline double parabolic_extremum(double ym, double y0, double yp) {
    const double curv = ym - 2.0 * y0 + yp;
    if (curv == 0.0) {
        return y0;
    }
    return y0 - (yp - ym) * (yp - ym) / (8.0 * curv);
}

}  // namespace detail

/// Normal density of the given mean and standard deviation on a grid (not renormalized).
inline DensityGrid gaussian_density(double mean, double sigma, const GridSpec &spec) {
    if (!(sigma > 0.0)) {
        throw std::invalid_argument("gaussian_density: sigma > 0 required");
    }
    DensityGrid d{detail::make_axis(spec), std::vector<double>(spec.n)};
    const double norm = 1.0 / (std::sqrt(2.0 * si::pi) * sigma);
    for (std::size_t i = 0; i < spec.n; ++i) {
        const double z = (d.axis[i] - mean) / sigma;
        d.values[i] = norm * std::exp(-0.5 * z * z);
    }
    return d;
}

/// |psi(x)|^2 of the two-peak state, normalized on the grid.
inline DensityGrid cat_position_density(const CatState &state, const GridSpec &spec) {
    state.validate();
    const double half = 0.5 * state.separation;
    const double reach = half + 6.0 * state.peak_sigma;
    detail::require_cover(spec, state.mean_x - reach, state.mean_x + reach, "cat_position_density");
    DensityGrid d{detail::make_axis(spec), std::vector<double>(spec.n)};
    const double inv4s2 = 1.0 / (4.0 * state.peak_sigma * state.peak_sigma);
    for (std::size_t i = 0; i < spec.n; ++i) {
        const double y = d.axis[i] - state.mean_x;
        const double amp = std::exp(-(y - half) * (y - half) * inv4s2) + std::exp(-(y + half) * (y + half) * inv4s2);
        d.values[i] = amp * amp;
    }
    d.normalize();
    return d;
}

/// Momentum density of the two-peak state: a Gaussian envelope of width
/// hbar/(2 peak_sigma) modulated by cos^2(a p / 2 hbar), normalized on the grid.
inline DensityGrid cat_momentum_density(const CatState &state, const GridSpec &spec) {
    state.validate();
    const double sigma_p = si::hbar / (2.0 * state.peak_sigma);
    detail::require_cover(spec, -6.0 * sigma_p, 6.0 * sigma_p, "cat_momentum_density");
    DensityGrid d{detail::make_axis(spec), std::vector<double>(spec.n)};
    const double k = state.separation / (2.0 * si::hbar);
    for (std::size_t i = 0; i < spec.n; ++i) {
        const double p = d.axis[i];
        const double z = p / sigma_p;
        const double c = std::cos(k * p);
        d.values[i] = std::exp(-0.5 * z * z) * c * c;
    }
    d.normalize();
    return d;
}

/// Gaussian-kernel smoothing of a density by direct summation.
///
/// The kernel is truncated at 6 sigma. Each source point spreads its mass
/// with weights renormalized over the points that fall on the grid, so the
/// total mass is unchanged. Requires grid spacing < sigma/3.
inline DensityGrid convolve_density(const DensityGrid &d, double sigma) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
        throw std::invalid_argument("convolve_density: sigma >= 0 required");
    }
    if (sigma == 0.0) {
        return d;
    }
    const double h = d.step();
    if (!(h < sigma / 3.0)) {
        throw std::invalid_argument("convolve_density: grid spacing " + std::to_string(h) +
                                    " is not below sigma/3 = " + std::to_string(sigma / 3.0));
    }
    const auto n = static_cast<std::ptrdiff_t>(d.size());
    const auto reach = static_cast<std::ptrdiff_t>(std::ceil(6.0 * sigma / h));
    std::vector<double> kernel(static_cast<std::size_t>(2 * reach + 1));
    for (std::ptrdiff_t k = -reach; k <= reach; ++k) {
        const double z = static_cast<double>(k) * h / sigma;
        kernel[static_cast<std::size_t>(k + reach)] = std::exp(-0.5 * z * z);
    }
    // prefix[k] = sum of kernel[0..k)
    std::vector<double> prefix(kernel.size() + 1, 0.0);
    for (std::size_t k = 0; k < kernel.size(); ++k) {
        prefix[k + 1] = prefix[k] + kernel[k];
    }

    DensityGrid out{d.axis, std::vector<double>(d.size(), 0.0)};
    for (std::ptrdiff_t j = 0; j < n; ++j) {
        const double src = d.values[static_cast<std::size_t>(j)];
        if (src == 0.0) {
            continue;
        }
        const std::ptrdiff_t i0 = std::max<std::ptrdiff_t>(0, j - reach);
        const std::ptrdiff_t i1 = std::min<std::ptrdiff_t>(n - 1, j + reach);
        const double wsum = prefix[static_cast<std::size_t>(i1 - j + reach + 1)] -
                            prefix[static_cast<std::size_t>(i0 - j + reach)];
        const double scale = src / wsum;
        for (std::ptrdiff_t i = i0; i <= i1; ++i) {
            out.values[static_cast<std::size_t>(i)] += scale * kernel[static_cast<std::size_t>(i - j + reach)];
        }
    }
    const double before = d.integral();
    const double after = out.integral();
    if (after > 0.0) {
        for (double &v : out.values) {
            v *= before / after;
        }
    }
    return out;
}

/// Fringe visibility at spatial frequency `wavenumber` (rad per axis unit):
/// 2 |int rho(u) exp(i k u) du| / int rho(u) du.
///
/// For cos^2 fringes of period 2 pi / k on an envelope much wider than the
/// period this is 1; Gaussian smoothing of width s scales it by exp(-k^2 s^2 / 2).
inline double fringe_visibility(const DensityGrid &d, double wavenumber) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double w = (i == 0 || i + 1 == d.size()) ? 0.5 : 1.0;
        acc += w * d.values[i] * std::polar(1.0, wavenumber * d.axis[i]);
    }
    return 2.0 * std::abs(acc) * d.step() / d.integral();
}

/// Ratio of the higher of the two dominant peaks to the lowest point between
/// them, with parabolic refinement of each extremum. Empty when the density
/// has fewer than two local maxima.
inline std::optional<double> peak_to_valley(const DensityGrid &d) {
    const auto &v = d.values;
    std::vector<std::size_t> maxima;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        if (v[i] > v[i - 1] && v[i] >= v[i + 1]) {
            maxima.push_back(i);
        }
    }
    if (maxima.size() < 2) {
        return std::nullopt;
    }
    std::partial_sort(maxima.begin(), maxima.begin() + 2, maxima.end(),
                      [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
    const std::size_t left = std::min(maxima[0], maxima[1]);
    const std::size_t right = std::max(maxima[0], maxima[1]);
    std::size_t valley = left;
    for (std::size_t i = left; i <= right; ++i) {
        if (v[i] < v[valley]) {
            valley = i;
        }
    }
    const auto refine = [&](std::size_t i) { return detail::parabolic_extremum(v[i - 1], v[i], v[i + 1]); };
    const double peak = std::max(refine(left), refine(right));
    const double low = refine(valley);
    if (!(low > 0.0)) {
        return std::numeric_limits<double>::infinity();
    }
    return peak / low;
}

//---------------------------------------------------------------------------//
// Histograms
//---------------------------------------------------------------------------//

struct BinSpec {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t bins = 0;

    void validate() const {
        if (bins == 0 || !(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
            throw std::invalid_argument("BinSpec: bins >= 1 and hi > lo required");
        }
    }
};

/// Fixed uniform-bin histogram; out-of-range samples are counted in
/// underflow/overflow and still contribute to `total`.
struct Histogram1D {
    std::vector<double> edges;
    std::vector<std::uint64_t> counts;
    std::uint64_t total = 0;
    std::uint64_t underflow = 0;
    std::uint64_t overflow = 0;

    Histogram1D() = default;
    explicit Histogram1D(const BinSpec &spec) {
        spec.validate();
        edges.resize(spec.bins + 1);
        const double w = (spec.hi - spec.lo) / static_cast<double>(spec.bins);
        for (std::size_t i = 0; i <= spec.bins; ++i) {
            edges[i] = spec.lo + w * static_cast<double>(i);
        }
        edges.back() = spec.hi;
        counts.assign(spec.bins, 0);
    }

    std::size_t bins() const { return counts.size(); }
    double lo() const { return edges.front(); }
    double hi() const { return edges.back(); }
    double width() const { return (hi() - lo()) / static_cast<double>(bins()); }
    double center(std::size_t i) const { return 0.5 * (edges[i] + edges[i + 1]); }
    std::uint64_t in_range() const { return total - underflow - overflow; }

    void add(double x) {
        ++total;
        if (x < lo()) {
            ++underflow;
            return;
        }
        if (x > hi()) {
            ++overflow;
            return;
        }
        auto i = static_cast<std::size_t>((x - lo()) / width());
        ++counts[std::min(i, bins() - 1)];
    }

    void merge(const Histogram1D &o) {
        if (o.edges != edges) {
            throw std::invalid_argument("Histogram1D::merge: bin edges differ");
        }
        for (std::size_t i = 0; i < counts.size(); ++i) {
            counts[i] += o.counts[i];
        }
        total += o.total;
        underflow += o.underflow;
        overflow += o.overflow;
    }

    /// Counts / (total * width): the piecewise-constant density estimate.
    double density(std::size_t i) const {
        return total > 0 ? static_cast<double>(counts[i]) / (static_cast<double>(total) * width()) : 0.0;
    }
};

inline Histogram1D histogram(std::span<const double> points, const BinSpec &spec) {
    if (points.empty()) {
        throw std::invalid_argument("histogram: at least one point required");
    }
    Histogram1D h(spec);
    for (double x : points) {
        h.add(x);
    }
    return h;
}

/// The histogram's own density estimate sampled at bin centres.
inline DensityGrid implied_density(const Histogram1D &h) {
    DensityGrid d;
    d.axis.resize(h.bins());
    d.values.resize(h.bins());
    for (std::size_t i = 0; i < h.bins(); ++i) {
        d.axis[i] = h.center(i);
        d.values[i] = h.density(i);
    }
    return d;
}

/// Total-variation distance between the normalized histogram and a reference
/// density. Reference bin masses use the midpoint rule; mass outside the bin
/// range is compared as one extra cell.
inline double tv_distance(const Histogram1D &h, const DensityGrid &d) {
    if (h.total == 0) {
        throw std::invalid_argument("tv_distance: empty histogram");
    }
    const double tol = 1e-9 * h.width();
    if (d.size() < 2 || d.axis.front() > h.center(0) + tol || d.axis.back() < h.center(h.bins() - 1) - tol) {
        throw std::invalid_argument("tv_distance: density grid does not cover the histogram bin centres");
    }
    const double n = static_cast<double>(h.total);
    double mass_in = 0.0;
    double dist = 0.0;
    for (std::size_t i = 0; i < h.bins(); ++i) {
        const double c = std::clamp(h.center(i), d.axis.front(), d.axis.back());
        const double q = d.at(c) * h.width();
        mass_in += q;
        dist += std::abs(static_cast<double>(h.counts[i]) / n - q);
    }
    const double out_h = static_cast<double>(h.underflow + h.overflow) / n;
    const double out_q = std::max(0.0, 1.0 - mass_in);
    dist += std::abs(out_h - out_q);
    return std::clamp(0.5 * dist, 0.0, 1.0);
}

}  // namespace mwtele
