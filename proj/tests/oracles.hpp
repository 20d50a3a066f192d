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

// Independent numerical references used only by the tests. Nothing here
// calls into the library's density, convolution or fidelity code.

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>

namespace oracle {

inline constexpr double hbar = 1.054571817e-34;

/// Composite Simpson rule with `n` (rounded up to even) intervals.
inline double simpson(const std::function<double(double)> &f, double a, double b, std::size_t n) {
    if (n % 2) {
        ++n;
    }
    const double h = (b - a) / static_cast<double>(n);
    double s = f(a) + f(b);
    for (std::size_t i = 1; i < n; ++i) {
        s += f(a + h * static_cast<double>(i)) * (i % 2 ? 4.0 : 2.0);
    }
    return s * h / 3.0;
}

/// Two-dimensional Simpson rule on a rectangle.
inline double simpson2(const std::function<double(double, double)> &f, double ax, double bx, double ay, double by,
                       std::size_t n) {
    return simpson([&](double x) { return simpson([&](double y) { return f(x, y); }, ay, by, n); }, ax, bx, n);
}

/// Half-width of the k-sigma band for a sample variance ratio s^2/sigma^2.
inline double variance_band(std::size_t n, double k = 3.0) { return k * std::sqrt(2.0 / static_cast<double>(n - 1)); }

/// Unnormalized |psi(x)|^2 of the two-peak state centred at 0.
inline double cat_abs2(double x, double a, double s) {
    const double amp = std::exp(-(x - a / 2) * (x - a / 2) / (4 * s * s)) + std::exp(-(x + a / 2) * (x + a / 2) / (4 * s * s));
    return amp * amp;
}

/// Normalized cat position density by direct quadrature of |psi|^2.
struct CatPosition {
    double a, s, norm;
    CatPosition(double a_, double s_) : a(a_), s(s_) {
        norm = simpson([&](double x) { return cat_abs2(x, a, s); }, -a / 2 - 12 * s, a / 2 + 12 * s, 20000);
    }
    double operator()(double x) const { return cat_abs2(x, a, s) / norm; }
};

/// Gaussian kernel convolution by quadrature: int rho(y) K(x - y) dy.
inline double convolve_at(const std::function<double(double)> &rho, double x, double sigma) {
    const auto k = [&](double y) {
        const double z = (x - y) / sigma;
        return rho(y) * std::exp(-0.5 * z * z) / (std::sqrt(2 * std::numbers::pi) * sigma);
    };
    return simpson(k, x - 10 * sigma, x + 10 * sigma, 4000);
}

/// Wigner function of a zero-mean Gaussian with diagonal covariance.
inline double wigner_gauss(double x, double p, double vx, double vp) {
    return std::exp(-0.5 * (x * x / vx + p * p / vp)) / (2 * std::numbers::pi * std::sqrt(vx * vp));
}

}  // namespace oracle
