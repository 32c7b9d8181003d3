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
#include <vector>

#include "../circuit.hpp"
#include "../common.hpp"
#include "../hamiltonian.hpp"
#include "../optim/basin_hopping.hpp"
#include "../vqe.hpp"

namespace basinvqe::precond {

/**
 * Angle sharing induced by a qubit permutation: angle (q, l, s) and angle
 * (perm[q], l, s) are one free parameter. A per-atom invariant readout gives
 * symmetry-equivalent atoms equal angles, so labels searched in this subspace
 * are ones such a model can reproduce at symmetric geometries.
 */
class TiedParameters {
  public:
    TiedParameters(const AnsatzSpec &spec, const std::vector<std::size_t> &perm) : spec_(spec) {
        const std::size_t n = spec.n_qubits;
        if (perm.size() != n) {
            throw ValidationError("tied parameters: permutation length must equal n_qubits");
        }
        std::vector<std::size_t> rep(n, n);
        for (std::size_t q = 0; q < n; ++q) {
            if (perm[q] >= n) {
                throw ValidationError("tied parameters: permutation entry out of range");
            }
            if (perm[perm[q]] != q) {
                throw ValidationError("tied parameters: permutation must be an involution");
            }
        }
        std::vector<std::size_t> qubit_class(n);
        std::size_t n_orbits = 0;
        for (std::size_t q = 0; q < n; ++q) {
            if (rep[q] == n) {
                rep[q] = rep[perm[q]] = n_orbits++;
            }
            qubit_class[q] = rep[q];
        }
        const std::size_t per = 2 * (spec.depth + 1);
        n_free_ = n_orbits * per;
        class_of_.assign(spec.n_params(), 0);
        for (std::size_t q = 0; q < n; ++q) {
            for (std::size_t l = 0; l <= spec.depth; ++l) {
                for (std::size_t s = 0; s < 2; ++s) {
                    class_of_[spec.index(q, l, static_cast<AngleSlot>(s))] =
                        qubit_class[q] * per + 2 * l + s;
                }
            }
        }
    }

    /// Tie qubit q to qubit n - 1 - q.
    static TiedParameters mirror(const AnsatzSpec &spec) {
        std::vector<std::size_t> perm(spec.n_qubits);
        for (std::size_t q = 0; q < perm.size(); ++q) {
            perm[q] = spec.n_qubits - 1 - q;
        }
        return {spec, perm};
    }

    [[nodiscard]] std::size_t n_free() const { return n_free_; }
    [[nodiscard]] const AnsatzSpec &spec() const { return spec_; }

    [[nodiscard]] ParameterVector expand(const std::vector<real_t> &z) const {
        if (z.size() != n_free_) {
            throw ValidationError("tied parameters: wrong free-parameter count");
        }
        ParameterVector theta(class_of_.size());
        for (std::size_t k = 0; k < theta.size(); ++k) {
            theta[k] = z[class_of_[k]];
        }
        return theta;
    }

    /// Chain rule: d/dz_c = sum of d/dtheta_k over k in class c.
    [[nodiscard]] std::vector<real_t> reduce(const std::vector<real_t> &g) const {
        std::vector<real_t> out(n_free_, 0.0);
        for (std::size_t k = 0; k < g.size(); ++k) {
            out[class_of_[k]] += g[k];
        }
        return out;
    }

  private:
    AnsatzSpec spec_;
    std::size_t n_free_ = 0;
    std::vector<std::size_t> class_of_;
};

/**
 * Basin hopping restricted to the tied subspace, started from uniform free
 * angles drawn with bh.seed. final_parameters holds the expanded vector.
 */
inline optim::OptimizerReport tied_basin_hopping(const TiedParameters &ties,
                                                 const QubitHamiltonian &h,
                                                 optim::BasinHoppingConfig bh) {
    basinvqe::detail::check_spec_hamiltonian(ties.spec(), h);
    bh.local.wrap_final_parameters = true;
    const optim::Objective f = [&](const std::vector<real_t> &z) {
        return energy(ties.spec(), ties.expand(z), h);
    };
    const optim::GradientFn g = [&](const std::vector<real_t> &z) {
        return ties.reduce(gradient(ties.spec(), ties.expand(z), h));
    };
    auto rep = optim::basin_hopping(f, g, uniform_random_angles(ties.n_free(), bh.seed), bh);
    rep.final_parameters = ties.expand(rep.final_parameters);
    return rep;
}

} // namespace basinvqe::precond
