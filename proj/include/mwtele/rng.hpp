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
#include <random>

namespace mwtele {

/// Seeded generator owned by one sampling worker.
///
/// Streams derived from the same seed with different `stream` indices are
/// independent; a (seed, stream) pair always reproduces the same sequence
/// on a given standard library.
class Rng {
  public:
    explicit Rng(std::uint64_t seed, std::uint32_t stream = 0) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream,
                          0x6d777465u};
        engine_.seed(seq);
    }

    /// Standard normal deviate.
    double gauss() { return normal_(engine_); }

    /// Normal deviate with standard deviation `sigma` (sigma = 0 gives an exact 0).
    double gauss(double sigma) { return sigma * normal_(engine_); }

    std::mt19937_64 &engine() { return engine_; }

  private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace mwtele
