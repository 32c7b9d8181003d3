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
#include <random>
#include <vector>

#include "../common.hpp"
#include "report.hpp"

namespace basinvqe::optim {

/// Gain sequences a_k = a / (k + A)^alpha and c_k = c / (k + 1)^gamma.
struct SPSAConfig {
    real_t a = 0.1;
    real_t c = 0.1;
    real_t A = 10.0;
    real_t alpha = 0.602;
    real_t gamma = 0.101;
    std::size_t max_steps = 500;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(a > 0.0) || !(c > 0.0)) {
            throw ValidationError("SPSA: a and c must be positive");
        }
        if (!(alpha > 0.0 && alpha <= 1.0) || !(gamma > 0.0 && gamma <= 1.0)) {
            throw ValidationError("SPSA: alpha and gamma must lie in (0, 1]");
        }
        if (A < 0.0) {
            throw ValidationError("SPSA: A must be non-negative");
        }
    }

    [[nodiscard]] real_t step_size(std::size_t k) const {
        return a / std::pow(static_cast<real_t>(k) + A, alpha);
    }
    [[nodiscard]] real_t perturbation(std::size_t k) const {
        return c / std::pow(static_cast<real_t>(k) + 1.0, gamma);
    }
};

/// Draws a Rademacher (+-1) vector of length n.
inline std::vector<real_t> rademacher(std::size_t n, std::mt19937_64 &rng) {
    std::vector<real_t> d(n);
    for (auto &x : d) {
        x = (rng() >> 63) != 0U ? 1.0 : -1.0;
    }
    return d;
}

/// One simultaneous-perturbation gradient estimate
/// [f(x + c D) - f(x - c D)] / (2c) * D^{-1}.
inline std::vector<real_t> spsa_gradient_estimate(const Objective &f, const std::vector<real_t> &x,
                                                  real_t ck, std::mt19937_64 &rng) {
    const auto delta = rademacher(x.size(), rng);
    std::vector<real_t> xp(x);
    std::vector<real_t> xm(x);
    for (std::size_t i = 0; i < x.size(); ++i) {
        xp[i] += ck * delta[i];
        xm[i] -= ck * delta[i];
    }
    const real_t diff = (f(xp) - f(xm)) / (2.0 * ck);
    std::vector<real_t> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        g[i] = diff / delta[i];
    }
    return g;
}

/**
 * First-order SPSA. Two objective calls per step; the trace records the mean
 * of the two perturbed values at each iterate. A step with a non-finite
 * evaluation is skipped, and the first such event halves c for the rest of
 * the run. Deterministic given cfg.seed.
 */
inline OptimizerReport minimize_spsa(const Objective &f, std::vector<real_t> x,
                                     const SPSAConfig &cfg) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    OptimizerReport rep;
    real_t c_scale = 1.0;
    bool halved = false;
    std::size_t evals = 0;
    std::vector<real_t> xp(x.size());
    std::vector<real_t> xm(x.size());
    for (std::size_t k = 0; k < cfg.max_steps; ++k) {
        const real_t ak = cfg.step_size(k);
        const real_t ck = c_scale * cfg.perturbation(k);
        const auto delta = rademacher(x.size(), rng);
        for (std::size_t i = 0; i < x.size(); ++i) {
            xp[i] = x[i] + ck * delta[i];
            xm[i] = x[i] - ck * delta[i];
        }
        const real_t fp = f(xp);
        const real_t fm = f(xm);
        evals += 2;
        if (!std::isfinite(fp) || !std::isfinite(fm)) {
            ++rep.skipped_steps;
            if (!halved) {
                c_scale *= 0.5;
                halved = true;
            }
            continue;
        }
        const real_t diff = (fp - fm) / (2.0 * ck);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] -= ak * diff / delta[i];
        }
        rep.trace.push_back({evals, 0.5 * (fp + fm)});
    }
    rep.termination = Termination::max_steps;
    rep.final_parameters = std::move(x);
    rep.final_energy = rep.trace.empty() ? std::nan("") : rep.trace.back().energy;
    rep.evaluations_used = evals;
    return rep;
}

} // namespace basinvqe::optim
