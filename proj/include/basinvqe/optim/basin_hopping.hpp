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
#include "lbfgs.hpp"
#include "report.hpp"

namespace basinvqe::optim {

struct BasinHoppingConfig {
    real_t temperature = 0.5; // energy units
    std::size_t hop_steps = 100;
    std::size_t restarts = 10;
    real_t hop_scale = 0.5;   // rad
    std::uint64_t seed = 0;
    /// Restarts after the first begin from x0 + U(-restart_scale, restart_scale).
    real_t restart_scale = kPi;
    /// A new minimum replaces the incumbent only if lower by more than this.
    real_t improvement_tol = 1e-8;
    LbfgsOptions local{};
    unsigned workers = 1;
};

namespace detail {

struct RestartResult {
    std::vector<real_t> x;
    real_t energy = std::numeric_limits<real_t>::infinity();
    std::size_t evals = 0;
    std::size_t grads = 0;
    std::size_t skipped = 0;
    std::vector<real_t> best_after_hop; // best energy after each hop
    std::vector<std::size_t> evals_after_hop;
};

inline RestartResult basin_hopping_restart(const Objective &f, const GradientFn &grad,
                                           const std::vector<real_t> &x0,
                                           const BasinHoppingConfig &cfg, std::size_t restart) {
    std::mt19937_64 rng(derive_seed(cfg.seed, restart));
    std::uniform_real_distribution<real_t> unit(0.0, 1.0);
    RestartResult out;
    std::vector<real_t> start = x0;
    if (restart > 0) {
        std::uniform_real_distribution<real_t> jump(-cfg.restart_scale, cfg.restart_scale);
        for (auto &v : start) {
            v += jump(rng);
        }
    }
    std::vector<real_t> cur_x;
    real_t cur_e = std::numeric_limits<real_t>::infinity();
    auto local_min = [&](const std::vector<real_t> &x) -> std::optional<OptimizerReport> {
        try {
            auto r = minimize_lbfgs(f, grad, x, cfg.local);
            out.evals += r.evaluations_used;
            out.grads += r.gradient_evaluations;
            return r;
        } catch (const NumericalError &) {
            ++out.skipped;
            return std::nullopt;
        }
    };
    if (auto r = local_min(start)) {
        cur_x = r->final_parameters;
        cur_e = r->final_energy;
        out.x = cur_x;
        out.energy = cur_e;
    } else {
        return out;
    }
    std::uniform_real_distribution<real_t> hop(-cfg.hop_scale, cfg.hop_scale);
    for (std::size_t step = 0; step < cfg.hop_steps; ++step) {
        std::vector<real_t> trial = cur_x;
        for (auto &v : trial) {
            v += hop(rng);
        }
        const real_t u = unit(rng);
        if (auto r = local_min(trial)) {
            const real_t de = r->final_energy - cur_e;
            const bool accept =
                de <= 0.0 || (cfg.temperature > 0.0 && u < std::exp(-de / cfg.temperature));
            if (r->final_energy < out.energy - cfg.improvement_tol) {
                out.energy = r->final_energy;
                out.x = r->final_parameters;
            }
            if (accept) {
                cur_x = r->final_parameters;
                cur_e = r->final_energy;
            }
        }
        out.best_after_hop.push_back(out.energy);
        out.evals_after_hop.push_back(out.evals);
    }
    return out;
}

} // namespace detail

/**
 * Basin hopping: per restart, repeated uniform hops of the accepted point,
 * local L-BFGS refinement, Metropolis acceptance at cfg.temperature. Restarts
 * run on derived seeds (seed, restart index) and may run in parallel; the
 * result is the lowest minimum over all restarts and hops, ties within
 * improvement_tol resolved in favor of the earlier restart. A local
 * refinement that aborts counts as a skipped hop.
 */
inline OptimizerReport basin_hopping(const Objective &f, const GradientFn &grad,
                                     const std::vector<real_t> &x0,
                                     const BasinHoppingConfig &cfg) {
    const std::size_t n_restarts = std::max<std::size_t>(1, cfg.restarts);
    std::vector<detail::RestartResult> results(n_restarts);
    parallel_for(n_restarts, cfg.workers, [&](std::size_t r) {
        results[r] = detail::basin_hopping_restart(f, grad, x0, cfg, r);
    });
    OptimizerReport rep;
    real_t best = std::numeric_limits<real_t>::infinity();
    std::size_t evals = 0;
    for (const auto &r : results) {
        for (std::size_t i = 0; i < r.best_after_hop.size(); ++i) {
            rep.trace.push_back({evals + r.evals_after_hop[i], std::min(best, r.best_after_hop[i])});
        }
        evals += r.evals;
        rep.gradient_evaluations += r.grads;
        rep.skipped_steps += r.skipped;
        if (!r.x.empty() && r.energy < best - cfg.improvement_tol) {
            best = r.energy;
            rep.final_parameters = r.x;
        }
    }
    if (rep.final_parameters.empty()) {
        throw NumericalError("basin hopping: every local refinement aborted");
    }
    rep.final_energy = best;
    rep.evaluations_used = evals;
    rep.termination = Termination::max_steps;
    return rep;
}

} // namespace basinvqe::optim
