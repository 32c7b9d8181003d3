// Copyright 2026 The basinvqe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>

#include "../common.hpp"
#include "report.hpp"

namespace basinvqe::optim {

/// objective(x) + N(0, variance / n_shots). The noise stream is seeded and
/// shared by copies of the returned callable.
inline Objective shot_noise_wrapper(Objective objective, real_t hamiltonian_variance,
                                    std::size_t n_shots, std::uint64_t seed) {
    if (n_shots < 1) {
        throw ValidationError("shot_noise_wrapper: n_shots must be >= 1");
    }
    if (!(hamiltonian_variance >= 0.0)) {
        throw ValidationError("shot_noise_wrapper: variance must be non-negative");
    }
    const real_t sd = std::sqrt(hamiltonian_variance / static_cast<real_t>(n_shots));
    auto rng = std::make_shared<std::mt19937_64>(seed);
    return [objective = std::move(objective), sd, rng](const std::vector<real_t> &x) {
        const real_t v = objective(x);
        if (sd == 0.0) {
            return v;
        }
        std::normal_distribution<real_t> noise(0.0, sd);
        return v + noise(*rng);
    };
}

} // namespace basinvqe::optim
