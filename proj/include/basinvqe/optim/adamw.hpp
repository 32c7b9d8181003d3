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
#include <span>
#include <vector>

#include "../common.hpp"

namespace basinvqe::optim {

struct TrainOptimConfig {
    real_t weight_decay = 1e-4;
    real_t lr_start = 1e-3;
    real_t lr_end = 1e-6;
    std::size_t warmup_steps = 0;
    std::size_t total_steps = 1000;
    real_t beta1 = 0.9;
    real_t beta2 = 0.999;
    real_t eps = 1e-8;

    void validate() const {
        if (!(lr_start > lr_end && lr_end > 0.0)) {
            throw ValidationError("training optimizer: require lr_start > lr_end > 0");
        }
        if (weight_decay < 0.0) {
            throw ValidationError("training optimizer: weight_decay must be non-negative");
        }
        if (total_steps == 0 || warmup_steps > total_steps) {
            throw ValidationError("training optimizer: require 0 <= warmup_steps <= total_steps, "
                                  "total_steps > 0");
        }
    }
};

/// Linear warmup to lr_start over warmup_steps, then cosine decay to lr_end at
/// total_steps. Steps are 1-based.
inline real_t learning_rate(std::size_t step, const TrainOptimConfig &cfg) {
    if (step < cfg.warmup_steps) {
        return cfg.lr_start * static_cast<real_t>(step) / static_cast<real_t>(cfg.warmup_steps);
    }
    if (step >= cfg.total_steps) {
        return cfg.lr_end;
    }
    const real_t span = static_cast<real_t>(cfg.total_steps - cfg.warmup_steps);
    const real_t t = span > 0.0 ? static_cast<real_t>(step - cfg.warmup_steps) / span : 1.0;
    return cfg.lr_end + 0.5 * (cfg.lr_start - cfg.lr_end) * (1.0 + std::cos(kPi * t));
}

struct MomentState {
    std::vector<real_t> m;
    std::vector<real_t> v;
    std::size_t t = 0; // updates applied
};

/**
 * AdamW step with decoupled weight decay:
 *   w <- w (1 - lr wd) - lr m_hat / (sqrt(v_hat) + eps).
 * Entries with mask[i] == false are left untouched (weights and moments).
 * Returns false, leaving everything unchanged, if any gradient is non-finite.
 */
inline bool decayed_weight_gradient_step(std::span<real_t> weights, std::span<const real_t> grads,
                                         std::size_t step_index, const TrainOptimConfig &cfg,
                                         MomentState &state,
                                         std::span<const bool> mask = {}) {
    if (weights.size() != grads.size() || (!mask.empty() && mask.size() != weights.size())) {
        throw ValidationError("decayed_weight_gradient_step: shape mismatch");
    }
    for (real_t g : grads) {
        if (!std::isfinite(g)) {
            return false;
        }
    }
    if (state.m.size() != weights.size()) {
        state.m.assign(weights.size(), 0.0);
        state.v.assign(weights.size(), 0.0);
        state.t = 0;
    }
    ++state.t;
    const real_t lr = learning_rate(step_index, cfg);
    const real_t bc1 = 1.0 - std::pow(cfg.beta1, static_cast<real_t>(state.t));
    const real_t bc2 = 1.0 - std::pow(cfg.beta2, static_cast<real_t>(state.t));
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!mask.empty() && !mask[i]) {
            continue;
        }
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grads[i];
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grads[i] * grads[i];
        const real_t mh = state.m[i] / bc1;
        const real_t vh = state.v[i] / bc2;
        weights[i] = weights[i] * (1.0 - lr * cfg.weight_decay) - lr * mh / (std::sqrt(vh) + cfg.eps);
    }
    return true;
}

} // namespace basinvqe::optim
