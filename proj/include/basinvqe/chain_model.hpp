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
#include <string>
#include <vector>

#include "common.hpp"
#include "geometry.hpp"
#include "hamiltonian.hpp"

namespace basinvqe {

/// Heisenberg chain with exponentially decaying, distance-dependent exchange.
struct ChainModelParams {
    real_t J0 = 0.1;     // Hartree
    real_t r0 = 1.0;     // Angstrom
    real_t xi = 0.5;     // Angstrom
    real_t h = 0.0;      // Hartree
    real_t r_cut = 1.5;  // Angstrom
};

/**
 * H = sum_{(i,j) in G} J_ij (X_i X_j + Y_i Y_j + Z_i Z_j) + h sum_i Z_i,
 * J_ij = J0 exp(-(r_ij - r0) / xi), G the r_cut neighbor graph. One qubit per
 * atom in atom order. Depends on the geometry only through distances.
 */
inline QubitHamiltonian build_chain_model(const MolecularGeometry &geom,
                                          const ChainModelParams &p) {
    geom.validate();
    if (!(p.xi > 0.0)) {
        throw ValidationError("chain model: xi must be positive");
    }
    for (const auto &a : geom.atoms()) {
        if (a.element != geom[0].element) {
            throw ValidationError("chain model requires a single element");
        }
    }
    std::vector<PauliTerm> terms;
    for (const auto &[i, j] : neighbor_graph(geom, p.r_cut)) {
        const real_t J = p.J0 * std::exp(-(geom.distance(i, j) - p.r0) / p.xi);
        for (const Pauli op : {Pauli::X, Pauli::Y, Pauli::Z}) {
            PauliTerm t;
            t.coefficient = J;
            t.factors = {{i, op}, {j, op}};
            terms.push_back(std::move(t));
        }
    }
    if (p.h != 0.0 || terms.empty()) {
        for (std::size_t i = 0; i < geom.size(); ++i) {
            PauliTerm t;
            t.coefficient = p.h;
            t.factors = {{i, Pauli::Z}};
            terms.push_back(std::move(t));
        }
    }
    HamiltonianMetadata meta;
    meta.source = "chain_model";
    meta.geometry = geom;
    std::vector<std::vector<std::size_t>> aq(geom.size());
    for (std::size_t i = 0; i < geom.size(); ++i) {
        aq[i] = {i};
    }
    meta.atom_qubit_map = std::move(aq);
    return QubitHamiltonian(geom.size(), std::move(terms), std::move(meta));
}

} // namespace basinvqe
