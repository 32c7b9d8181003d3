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
#include <vector>

#include "../common.hpp"

namespace basinvqe::diagnostics {

struct ShotCostEstimate {
    std::uint64_t n_shots = 0;
    real_t epsilon = 0.0;
    real_t hamiltonian_variance = 0.0;
    std::uint64_t n_steps_discovery = 0;
    std::uint64_t n_steps_local = 0;
    /// n_shots x (discovery + local steps)
    real_t total_cost = 0.0;
};

/// Shots to resolve precision epsilon: ceil(Var(H) / epsilon^2).
inline ShotCostEstimate shot_cost(real_t variance, real_t epsilon,
                                  std::uint64_t n_steps_discovery = 0,
                                  std::uint64_t n_steps_local = 0) {
    if (!(epsilon > 0.0)) {
        throw ValidationError("shot_cost: epsilon must be positive");
    }
    if (!(variance >= 0.0)) {
        throw ValidationError("shot_cost: variance must be non-negative");
    }
    ShotCostEstimate s;
    s.epsilon = epsilon;
    s.hamiltonian_variance = variance;
    s.n_shots = static_cast<std::uint64_t>(std::ceil(variance / (epsilon * epsilon)));
    s.n_steps_discovery = n_steps_discovery;
    s.n_steps_local = n_steps_local;
    s.total_cost = static_cast<real_t>(s.n_shots) *
                   static_cast<real_t>(n_steps_discovery + n_steps_local);
    return s;
}

/// Per-geometry step counts of a potential-energy-surface scan.
struct ScanPointSteps {
    std::uint64_t discovery = 0;
    std::uint64_t local = 0;
};

struct AmortizationInput {
    std::uint64_t n_shots = 0;
    real_t shot_time = 1.0;      // cost of one shot
    real_t train_cost = 0.0;     // one-off, same units
    real_t inference_time = 0.0; // per geometry
    std::vector<ScanPointSteps> standard;       // standard VQE per point
    std::vector<std::uint64_t> preconditioned;  // local steps per point
};

struct AmortizationResult {
    real_t standard = 0.0;
    real_t preconditioned = 0.0;
};

/**
 * Scan totals: standard VQE pays shots x (discovery + local) at each point;
 * the preconditioned protocol pays training once, inference per point, and
 * shots x local steps.
 */
inline AmortizationResult pes_amortization(const AmortizationInput &in) {
    if (in.standard.size() != in.preconditioned.size()) {
        throw ValidationError("pes_amortization: scan lengths differ");
    }
    AmortizationResult r;
    const real_t per_step = static_cast<real_t>(in.n_shots) * in.shot_time;
    for (const auto &p : in.standard) {
        r.standard += per_step * static_cast<real_t>(p.discovery + p.local);
    }
    r.preconditioned = in.train_cost;
    for (auto s : in.preconditioned) {
        r.preconditioned += in.inference_time + per_step * static_cast<real_t>(s);
    }
    return r;
}

} // namespace basinvqe::diagnostics
