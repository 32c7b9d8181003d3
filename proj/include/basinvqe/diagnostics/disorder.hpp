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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "../chain_model.hpp"
#include "../circuit.hpp"
#include "../common.hpp"
#include "../geometry.hpp"
#include "../optim/shot_noise.hpp"
#include "../optim/spsa.hpp"
#include "../precond/model.hpp"
#include "../spectrum.hpp"
#include "../vqe.hpp"
#include "csv.hpp"

namespace basinvqe::diagnostics {

/// Wilson score interval for k successes in n trials (z = 1.96).
inline std::pair<real_t, real_t> wilson_interval(std::size_t k, std::size_t n, real_t z = 1.96) {
    if (n == 0) {
        return {0.0, 1.0};
    }
    const auto nn = static_cast<real_t>(n);
    const real_t p = static_cast<real_t>(k) / nn;
    const real_t z2 = z * z;
    const real_t denom = 1.0 + z2 / nn;
    const real_t centre = (p + z2 / (2.0 * nn)) / denom;
    const real_t half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

enum class Strategy { random, equivariant, hybrid };

inline std::string to_string(Strategy s) {
    switch (s) {
    case Strategy::random:
        return "random";
    case Strategy::equivariant:
        return "equivariant";
    case Strategy::hybrid:
        return "hybrid";
    }
    return "?";
}

inline Strategy strategy_from_string(const std::string &s) {
    if (s == "random") {
        return Strategy::random;
    }
    if (s == "equivariant") {
        return Strategy::equivariant;
    }
    if (s == "hybrid") {
        return Strategy::hybrid;
    }
    throw ValidationError("unknown strategy '" + s + "'");
}

struct DisorderScanConfig {
    std::vector<real_t> sigma_grid{0.0, 0.05, 0.1};
    std::vector<Strategy> strategies{Strategy::random, Strategy::equivariant, Strategy::hybrid};
    /// Energy evaluations per trial, shared by all restarts of a strategy.
    std::size_t budget = 2000;
    real_t threshold = kChemicalAccuracy;
    std::size_t n_trials = 50;
    std::uint64_t seed = 0;
    optim::SPSAConfig spsa;
    std::size_t hybrid_restarts = 4;
    real_t sigma_restart = 0.2;
    /// 0 means exact energies.
    std::size_t n_shots = 0;
    MolecularGeometry base;
    ChainModelParams chain;
    AnsatzSpec spec;
    std::shared_ptr<const precond::PreconditionerModel> model;
    unsigned workers = 1;
};

struct DisorderCell {
    real_t sigma = 0.0;
    Strategy strategy = Strategy::random;
    std::size_t successes = 0;
    std::size_t trials = 0;
    real_t probability = 0.0;
    real_t lo = 0.0;
    real_t hi = 1.0;
    real_t mean_final_error = 0.0;
};

struct DisorderScanResult {
    std::vector<DisorderCell> cells; // sigma-major, strategy order as configured
    std::size_t budget = 0;
    real_t threshold = 0.0;

    /// Success probability of one strategy averaged over the sigma grid.
    [[nodiscard]] real_t grid_average(Strategy s) const {
        real_t acc = 0.0;
        std::size_t n = 0;
        for (const auto &c : cells) {
            if (c.strategy == s) {
                acc += c.probability;
                ++n;
            }
        }
        return n == 0 ? std::nan("") : acc / static_cast<real_t>(n);
    }
};

namespace detail {

/// Final-parameter energy error of one SPSA run of `steps` steps.
inline real_t spsa_run_error(const AnsatzSpec &spec, const QubitHamiltonian &h, real_t exact,
                             const ParameterVector &theta0, optim::SPSAConfig sc,
                             std::size_t n_shots, real_t variance, std::uint64_t seed) {
    sc.seed = derive_seed(seed, 0);
    optim::Objective f = energy_objective(spec, h);
    if (n_shots > 0) {
        f = optim::shot_noise_wrapper(f, variance, n_shots, derive_seed(seed, 1));
    }
    const auto rep = optim::minimize_spsa(f, theta0, sc);
    return energy(spec, rep.final_parameters, h) - exact;
}

} // namespace detail

/**
 * Ground-state success probability per (sigma, strategy). A trial perturbs
 * the base chain by sigma, builds the chain model, draws theta0 by strategy,
 * and runs SPSA within the evaluation budget: random starts from uniform
 * angles, equivariant from the prediction, hybrid from the prediction plus
 * (restarts - 1) Gaussian-perturbed copies with the budget split equally,
 * keeping the best. Success: final energy error below threshold. All
 * strategies of a trial share its geometry.
 */
inline DisorderScanResult disorder_success_scan(const DisorderScanConfig &cfg) {
    if (cfg.strategies.empty()) {
        throw ValidationError("disorder_success_scan: no strategies");
    }
    if (cfg.n_trials == 0) {
        throw ValidationError("disorder_success_scan: n_trials must be positive");
    }
    if (cfg.hybrid_restarts == 0) {
        throw ValidationError("disorder_success_scan: hybrid_restarts must be positive");
    }
    for (auto s : cfg.strategies) {
        if (s != Strategy::random && !cfg.model) {
            throw ValidationError("disorder_success_scan: strategy '" + to_string(s) +
                                  "' needs a preconditioner model");
        }
    }
    const std::size_t n_sig = cfg.sigma_grid.size();
    const std::size_t n_str = cfg.strategies.size();
    std::vector<real_t> err(n_sig * cfg.n_trials * n_str, std::nan(""));
    parallel_for(n_sig * cfg.n_trials, cfg.workers, [&](std::size_t job) {
        const std::size_t si = job / cfg.n_trials;
        const std::size_t trial = job % cfg.n_trials;
        const std::uint64_t ts = derive_seed(derive_seed(cfg.seed, si), trial);
        const auto geom = perturb_positions(cfg.base, cfg.sigma_grid[si], derive_seed(ts, 0));
        const auto h = build_chain_model(geom, cfg.chain);
        const real_t exact = exact_ground_state(h).ground_energy;
        real_t variance = 0.0;
        ParameterVector predicted;
        if (cfg.model) {
            predicted = precond::predict(*cfg.model, geom, cfg.spec, h.metadata().atom_qubit_map);
        }
        for (std::size_t k = 0; k < n_str; ++k) {
            const Strategy s = cfg.strategies[k];
            const std::uint64_t ss = derive_seed(ts, 10 + static_cast<std::uint64_t>(s));
            optim::SPSAConfig sc = cfg.spsa;
            real_t e = std::numeric_limits<real_t>::infinity();
            if (s == Strategy::hybrid) {
                const std::size_t per = cfg.budget / cfg.hybrid_restarts;
                sc.max_steps = per / 2;
                std::mt19937_64 rng(derive_seed(ss, 99));
                std::normal_distribution<real_t> nd(0.0, cfg.sigma_restart);
                for (std::size_t r = 0; r < cfg.hybrid_restarts; ++r) {
                    ParameterVector t0 = predicted;
                    if (r > 0) {
                        for (auto &x : t0) {
                            x += nd(rng);
                        }
                    }
                    if (cfg.n_shots > 0 && variance == 0.0) {
                        variance = hamiltonian_variance(h, prepare_state(cfg.spec, predicted));
                    }
                    e = std::min(e, detail::spsa_run_error(cfg.spec, h, exact, t0, sc, cfg.n_shots,
                                                           variance, derive_seed(ss, r)));
                }
            } else {
                sc.max_steps = cfg.budget / 2;
                const ParameterVector t0 = s == Strategy::random
                                               ? uniform_random_angles(cfg.spec.n_params(),
                                                                       derive_seed(ss, 98))
                                               : predicted;
                if (cfg.n_shots > 0) {
                    variance = hamiltonian_variance(h, prepare_state(cfg.spec, t0));
                }
                e = detail::spsa_run_error(cfg.spec, h, exact, t0, sc, cfg.n_shots, variance,
                                           derive_seed(ss, 0));
            }
            err[job * n_str + k] = e;
        }
    });
    DisorderScanResult res;
    res.budget = cfg.budget;
    res.threshold = cfg.threshold;
    for (std::size_t si = 0; si < n_sig; ++si) {
        for (std::size_t k = 0; k < n_str; ++k) {
            DisorderCell c;
            c.sigma = cfg.sigma_grid[si];
            c.strategy = cfg.strategies[k];
            c.trials = cfg.n_trials;
            for (std::size_t t = 0; t < cfg.n_trials; ++t) {
                const real_t e = err[(si * cfg.n_trials + t) * n_str + k];
                c.mean_final_error += e / static_cast<real_t>(cfg.n_trials);
                if (e < cfg.threshold) {
                    ++c.successes;
                }
            }
            c.probability = static_cast<real_t>(c.successes) / static_cast<real_t>(c.trials);
            std::tie(c.lo, c.hi) = wilson_interval(c.successes, c.trials);
            res.cells.push_back(c);
        }
    }
    return res;
}

inline Table disorder_table(const DisorderScanResult &r) {
    Table t({"sigma", "strategy", "successes", "trials", "p", "wilson_lo", "wilson_hi",
             "mean_final_error"});
    t.annotate("budget", static_cast<std::uint64_t>(r.budget));
    t.annotate("threshold", r.threshold);
    for (const auto &c : r.cells) {
        t.add_row({format_real(c.sigma), to_string(c.strategy), std::to_string(c.successes),
                   std::to_string(c.trials), format_real(c.probability), format_real(c.lo),
                   format_real(c.hi), format_real(c.mean_final_error)});
    }
    return t;
}

} // namespace basinvqe::diagnostics
