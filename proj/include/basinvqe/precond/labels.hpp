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

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "../circuit.hpp"
#include "../common.hpp"
#include "../hamiltonian.hpp"
#include "../optim/basin_hopping.hpp"
#include "../spectrum.hpp"
#include "../vqe.hpp"
#include "training.hpp"

namespace basinvqe::precond {

struct LabelProblem {
    MolecularGeometry geometry;
    std::shared_ptr<const QubitHamiltonian> hamiltonian;
    std::optional<std::vector<std::vector<std::size_t>>> atom_qubit_map;
    /// Start of restart 0 for this problem; overrides LabelOptions.
    std::optional<ParameterVector> initial;
};

/// zero: a = 0. search_start: a = the search's restart-0 start point.
enum class GaugeAnchor { zero, search_start };

struct LabelOptions {
    /// Flag labels whose energy exceeds the exact ground energy by more.
    real_t suspect_tol = 1e-3;
    /// Seed restart 0 of each search from the previous successful label.
    bool continuation = false;
    bool compute_exact = true;
    /// Start of restart 0 for every search (default: uniform angles drawn
    /// with the basin-hopping seed).
    std::optional<ParameterVector> initial;
    /// When positive, the basin-hopping minimum is moved along (near-)flat
    /// directions toward the gauge anchor: minimize E + w |theta - a|^2 from
    /// it, then refine E alone. The result replaces the label only if its
    /// energy is not higher by more than 1e-8.
    real_t gauge_weight = 0.0;
    GaugeAnchor gauge_anchor = GaugeAnchor::zero;
};

struct LabelOutcome {
    std::size_t problem_index = 0;
    std::optional<std::size_t> example_index; // into TrainingSet when successful
    std::string error;
};

struct LabelResult {
    TrainingSet dataset;
    std::vector<LabelOutcome> outcomes; // one per problem
};

/**
 * Basin-hopping energy minimization per geometry. Restart 0 starts from
 * opt.initial, the previous label (continuation), or uniform angles drawn
 * with bh.seed; every search uses the same seed schedule, so identical
 * problems get identical labels. Failures are recorded per problem and do
 * not stop the batch.
 */
inline LabelResult generate_labels(const std::vector<LabelProblem> &problems,
                                   const AnsatzSpec &spec, optim::BasinHoppingConfig bh,
                                   const LabelOptions &opt = {}) {
    bh.local.wrap_final_parameters = true;
    LabelResult out;
    for (std::size_t i = 0; i < problems.size(); ++i) {
        if (!problems[i].hamiltonian ||
            problems[i].hamiltonian->n_qubits() != spec.n_qubits) {
            throw ValidationError("generate_labels: problem " + std::to_string(i) +
                                  " does not match the ansatz qubit count");
        }
    }
    const ParameterVector start =
        opt.initial ? *opt.initial : uniform_random_angles(spec.n_params(), bh.seed);
    spec.check(start);
    std::optional<ParameterVector> previous;
    for (std::size_t i = 0; i < problems.size(); ++i) {
        const auto &pb = problems[i];
        LabelOutcome oc;
        oc.problem_index = i;
        try {
            const auto &h = *pb.hamiltonian;
            ParameterVector x0 = (opt.continuation && previous) ? *previous : start;
            if (pb.initial) {
                spec.check(*pb.initial);
                x0 = *pb.initial;
            }
            const auto f = energy_objective(spec, h);
            const auto g = energy_gradient(spec, h);
            const auto rep = optim::basin_hopping(f, g, x0, bh);
            TrainingExample ex{pb.geometry, pb.hamiltonian, rep.final_parameters, 0.0,
                               std::nullopt, false, pb.atom_qubit_map};
            ex.target_energy = energy(spec, ex.target, h);
            if (opt.gauge_weight > 0.0) {
                const real_t w = opt.gauge_weight;
                ParameterVector anchor(ex.target.size(), 0.0);
                if (opt.gauge_anchor == GaugeAnchor::search_start) {
                    anchor = x0;
                }
                ParameterVector from(ex.target.size());
                for (std::size_t k = 0; k < from.size(); ++k) {
                    from[k] = anchor[k] + wrap_angle(ex.target[k] - anchor[k]);
                }
                const optim::Objective fr = [&](const std::vector<real_t> &t) {
                    real_t n2 = 0.0;
                    for (std::size_t k = 0; k < t.size(); ++k) {
                        n2 += (t[k] - anchor[k]) * (t[k] - anchor[k]);
                    }
                    return f(t) + w * n2;
                };
                const optim::GradientFn gr = [&](const std::vector<real_t> &t) {
                    auto gg = g(t);
                    for (std::size_t k = 0; k < t.size(); ++k) {
                        gg[k] += 2.0 * w * (t[k] - anchor[k]);
                    }
                    return gg;
                };
                optim::LbfgsOptions lo = bh.local;
                lo.wrap_final_parameters = false;
                const auto pulled = optim::minimize_lbfgs(fr, gr, from, lo);
                lo.wrap_final_parameters = true;
                const auto polished = optim::minimize_lbfgs(f, g, pulled.final_parameters, lo);
                const real_t e = energy(spec, polished.final_parameters, h);
                if (e <= ex.target_energy + 1e-8) {
                    ex.target = polished.final_parameters;
                    ex.target_energy = e;
                }
            }
            if (opt.compute_exact) {
                ex.exact_energy = exact_ground_state(h).ground_energy;
                ex.suspect = ex.target_energy - *ex.exact_energy > opt.suspect_tol;
            }
            previous = ex.target;
            oc.example_index = out.dataset.size();
            out.dataset.examples.push_back(std::move(ex));
        } catch (const std::exception &e) {
            oc.error = e.what();
        }
        out.outcomes.push_back(std::move(oc));
    }
    return out;
}

} // namespace basinvqe::precond
