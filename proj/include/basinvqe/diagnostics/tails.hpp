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
#include <memory>
#include <string>
#include <vector>

#include "../circuit.hpp"
#include "../common.hpp"
#include "../geometry.hpp"
#include "../hamiltonian.hpp"
#include "../precond/model.hpp"
#include "../spectrum.hpp"
#include "../vqe.hpp"
#include "csv.hpp"

namespace basinvqe::diagnostics {

/// Maps (geometry, Hamiltonian, per-sample seed) to an initial parameter vector.
struct InitStrategy {
    std::string name;
    std::function<ParameterVector(const MolecularGeometry &, const QubitHamiltonian &,
                                  std::uint64_t)>
        init;
};

inline InitStrategy random_strategy(const AnsatzSpec &spec) {
    return {"random", [spec](const MolecularGeometry &, const QubitHamiltonian &,
                             std::uint64_t seed) {
                return uniform_random_angles(spec.n_params(), seed);
            }};
}

/// Preconditioner prediction; uses the Hamiltonian's atom_qubit_map when set.
inline InitStrategy equivariant_strategy(std::shared_ptr<const precond::PreconditionerModel> model,
                                         const AnsatzSpec &spec) {
    return {"equivariant", [model, spec](const MolecularGeometry &g, const QubitHamiltonian &h,
                                         std::uint64_t) {
                return precond::predict(*model, g, spec, h.metadata().atom_qubit_map);
            }};
}

/// The same angles for every sample.
inline InitStrategy replay_strategy(ParameterVector theta, std::string name = "replay") {
    return {std::move(name),
            [theta = std::move(theta)](const MolecularGeometry &, const QubitHamiltonian &,
                                       std::uint64_t) { return theta; }};
}

inline InitStrategy zeros_strategy(const AnsatzSpec &spec) {
    return replay_strategy(ParameterVector(spec.n_params(), 0.0), "zeros");
}

struct TailStats {
    std::size_t n = 0;
    real_t q50 = 0.0;
    real_t q90 = 0.0;
    real_t q99 = 0.0;
    real_t q999 = 0.0;
    real_t mean = 0.0;
    real_t max = 0.0;
    std::vector<std::pair<real_t, std::size_t>> exceedances; // (threshold, count above)
};

/// Linearly interpolated quantile of sorted data, q in [0, 1].
inline real_t quantile_sorted(const std::vector<real_t> &sorted, real_t q) {
    if (sorted.empty()) {
        throw ValidationError("quantile of an empty sample");
    }
    const real_t pos = q * static_cast<real_t>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const real_t w = pos - static_cast<real_t>(lo);
    return sorted[lo] + w * (sorted[hi] - sorted[lo]);
}

inline TailStats tail_stats(std::vector<real_t> x, const std::vector<real_t> &thresholds) {
    std::sort(x.begin(), x.end());
    TailStats s;
    s.n = x.size();
    s.q50 = quantile_sorted(x, 0.50);
    s.q90 = quantile_sorted(x, 0.90);
    s.q99 = quantile_sorted(x, 0.99);
    s.q999 = quantile_sorted(x, 0.999);
    for (real_t v : x) {
        s.mean += v;
    }
    s.mean /= static_cast<real_t>(x.size());
    s.max = x.back();
    for (real_t t : thresholds) {
        const auto above = static_cast<std::size_t>(
            x.end() - std::upper_bound(x.begin(), x.end(), t));
        s.exceedances.emplace_back(t, above);
    }
    return s;
}

struct TailConfig {
    std::size_t n_samples = 1000;
    real_t sigma_pos = 0.1; // Angstrom
    std::uint64_t seed = 0;
    std::vector<real_t> thresholds{1.6e-3, 1e-2, 1e-1};
    unsigned workers = 1;
};

struct TailResult {
    TailStats stats;
    std::vector<real_t> delta_e; // successful samples, sample order
    std::size_t failures = 0;
};

/**
 * Per sample: perturb the base geometry, build its Hamiltonian, and record
 * E(theta0) - E_exact for the strategy's theta0. Failed samples are counted;
 * 1% or more failures is an error.
 */
inline TailResult init_error_tail(
    const InitStrategy &strategy,
    const std::function<QubitHamiltonian(const MolecularGeometry &)> &system_builder,
    const MolecularGeometry &base, const AnsatzSpec &spec, const TailConfig &cfg) {
    if (cfg.n_samples < 100) {
        throw ValidationError("init_error_tail: n_samples must be at least 100");
    }
    std::vector<real_t> de(cfg.n_samples, std::nan(""));
    std::vector<char> ok(cfg.n_samples, 0);
    parallel_for(cfg.n_samples, cfg.workers, [&](std::size_t s) {
        try {
            const std::uint64_t sd = derive_seed(cfg.seed, s);
            const auto geom = perturb_positions(base, cfg.sigma_pos, derive_seed(sd, 0));
            const auto h = system_builder(geom);
            const auto theta0 = strategy.init(geom, h, derive_seed(sd, 1));
            const real_t e0 = energy(spec, theta0, h);
            const real_t ex = exact_ground_state(h).ground_energy;
            de[s] = e0 - ex;
            ok[s] = std::isfinite(de[s]) ? 1 : 0;
        } catch (const std::exception &) {
            ok[s] = 0;
        }
    });
    TailResult r;
    for (std::size_t s = 0; s < cfg.n_samples; ++s) {
        if (ok[s] != 0) {
            r.delta_e.push_back(de[s]);
        } else {
            ++r.failures;
        }
    }
    if (100 * r.failures >= cfg.n_samples) {
        throw NumericalError("init_error_tail: " + std::to_string(r.failures) + " of " +
                             std::to_string(cfg.n_samples) + " samples failed");
    }
    r.stats = tail_stats(r.delta_e, cfg.thresholds);
    return r;
}

inline Table tail_table(const std::vector<std::pair<std::string, TailStats>> &rows) {
    Table t({"strategy", "n", "q50", "q90", "q99", "q999", "mean", "max"});
    for (const auto &[name, s] : rows) {
        t.add_row({name, std::to_string(s.n), format_real(s.q50), format_real(s.q90),
                   format_real(s.q99), format_real(s.q999), format_real(s.mean),
                   format_real(s.max)});
    }
    return t;
}

/// Counts per bin of [lo, hi) over n_bins equal-width bins; values at or
/// above hi land in the last bin.
inline Table histogram_table(const std::vector<real_t> &x, real_t lo, real_t hi,
                             std::size_t n_bins) {
    if (!(hi > lo) || n_bins == 0) {
        throw ValidationError("histogram: need hi > lo and at least one bin");
    }
    std::vector<std::size_t> counts(n_bins, 0);
    const real_t w = (hi - lo) / static_cast<real_t>(n_bins);
    for (real_t v : x) {
        if (v < lo) {
            continue;
        }
        auto b = static_cast<std::size_t>((v - lo) / w);
        counts[std::min(b, n_bins - 1)]++;
    }
    Table t({"bin_lo", "bin_hi", "count"});
    for (std::size_t b = 0; b < n_bins; ++b) {
        t.add_row({format_real(lo + w * static_cast<real_t>(b)),
                   format_real(lo + w * static_cast<real_t>(b + 1)), std::to_string(counts[b])});
    }
    return t;
}

} // namespace basinvqe::diagnostics
