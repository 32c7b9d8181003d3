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

#include <cstdint>
#include <random>
#include <vector>

#include "circuit.hpp"
#include "common.hpp"
#include "hamiltonian.hpp"
#include "optim/lbfgs.hpp"
#include "optim/report.hpp"

namespace basinvqe {

/// theta -> E(theta) as an optimizer objective.
inline optim::Objective energy_objective(const AnsatzSpec &spec, const QubitHamiltonian &h) {
    return [spec, &h](const std::vector<real_t> &theta) { return energy(spec, theta, h); };
}

inline optim::GradientFn energy_gradient(const AnsatzSpec &spec, const QubitHamiltonian &h,
                                         unsigned workers = 1) {
    return [spec, &h, workers](const std::vector<real_t> &theta) {
        return gradient(spec, theta, h, workers);
    };
}

/// Local L-BFGS refinement of the circuit energy; final angles wrapped.
inline optim::OptimizerReport minimize_energy(const AnsatzSpec &spec, const QubitHamiltonian &h,
                                              const ParameterVector &theta0,
                                              optim::LbfgsOptions opt = {}, unsigned workers = 1) {
    opt.wrap_final_parameters = true;
    return optim::minimize_lbfgs(energy_objective(spec, h), energy_gradient(spec, h, workers),
                                 theta0, opt);
}

/// Angles i.i.d. uniform on (-pi, pi].
inline ParameterVector uniform_random_angles(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<real_t> u(-kPi, kPi);
    ParameterVector t(n);
    for (auto &x : t) {
        x = wrap_angle(u(rng));
    }
    return t;
}

/**
 * Angles whose prepared state is the computational basis state `bits`, for
 * any depth: initial-layer Ry = pi on the bits of the preimage of `bits`
 * under the depth-L entangler cascade, every other angle zero. For L = 0 or
 * when no entangler sees a set control, the preimage is `bits` itself.
 */
inline ParameterVector hf_theta(const AnsatzSpec &spec, const std::vector<int> &bits) {
    if (bits.size() != spec.n_qubits) {
        throw ValidationError("hf_theta: bitstring length does not match n_qubits");
    }
    std::vector<int> pre = bits;
    const std::size_t n = spec.n_qubits;
    // Inverse of (odd pass o even pass) is (even pass o odd pass).
    for (std::size_t l = 0; l < spec.depth; ++l) {
        for (std::size_t start : {std::size_t{1}, std::size_t{0}}) {
            for (std::size_t i = start; i + 1 < n; i += 2) {
                if (pre[i] != 0) {
                    pre[i + 1] ^= 1;
                }
            }
        }
    }
    ParameterVector theta(spec.n_params(), 0.0);
    for (std::size_t q = 0; q < n; ++q) {
        if (pre[q] != 0) {
            theta[spec.index(q, 0, AngleSlot::y)] = kPi;
        }
    }
    return theta;
}

} // namespace basinvqe
