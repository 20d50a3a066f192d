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
#include <stdexcept>

namespace mwtele {

/// Resolutions of the Bell measurement (x_minus, p_plus) and of the
/// position/momentum shifters acting on the readout particle.
struct NoiseBudget {
    double dx_meas = 0.0;   // m
    double dp_meas = 0.0;   // kg m/s
    double dx_shift = 0.0;  // m
    double dp_shift = 0.0;  // kg m/s

    void validate() const {
        for (double v : {dx_meas, dp_meas, dx_shift, dp_shift}) {
            if (!(v >= 0.0) || !std::isfinite(v)) {
                throw std::invalid_argument("NoiseBudget: all resolutions must be finite and >= 0");
            }
        }
    }

    bool operator==(const NoiseBudget &) const = default;
};

}  // namespace mwtele
