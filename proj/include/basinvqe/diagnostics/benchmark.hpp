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
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "../circuit.hpp"
#include "../common.hpp"
#include "../hamiltonian.hpp"
#include "../precond/model.hpp"
#include "../spectrum.hpp"
#include "csv.hpp"

namespace basinvqe::diagnostics {

struct BenchmarkCase {
    std::string name;
    std::shared_ptr<const QubitHamiltonian> hamiltonian;
    AnsatzSpec spec;
    /// Overrides the model prediction when set.
    std::optional<ParameterVector> theta0;
};

struct BenchmarkRow {
    std::string name;
    std::size_t n_qubits = 0;
    real_t e_ref = std::nan("");
    std::string ref_source;
    real_t de_hf = std::nan("");
    real_t de_peq = std::nan("");
    real_t improvement = std::nan("");
    bool complete = false;
    std::string note;
};

/**
 * Initialization errors against the reference energy (file fci when present,
 * exact diagonalization otherwise): HF determinant and preconditioned
 * angles. Rows with missing inputs are kept and marked incomplete.
 */
inline std::vector<BenchmarkRow> benchmark_table(const std::vector<BenchmarkCase> &cases,
                                                 const precond::PreconditionerModel *model) {
    std::vector<BenchmarkRow> rows;
    for (const auto &c : cases) {
        BenchmarkRow r;
        r.name = c.name;
        std::vector<std::string> missing;
        try {
            if (!c.hamiltonian) {
                throw ValidationError("no Hamiltonian");
            }
            const auto &h = *c.hamiltonian;
            const auto &meta = h.metadata();
            r.n_qubits = h.n_qubits();
            if (meta.energies.fci) {
                r.e_ref = *meta.energies.fci;
                r.ref_source = "fci";
            } else {
                r.e_ref = exact_ground_state(h).ground_energy;
                r.ref_source = "exact";
            }
            if (meta.hf_bitstring) {
                r.de_hf = basis_state_energy(h, *meta.hf_bitstring) - r.e_ref;
            } else {
                missing.emplace_back("hf_bitstring");
            }
            std::optional<ParameterVector> theta = c.theta0;
            if (!theta) {
                if (model == nullptr) {
                    missing.emplace_back("model");
                } else if (!meta.geometry) {
                    missing.emplace_back("geometry");
                } else {
                    theta = precond::predict(*model, *meta.geometry, c.spec, meta.atom_qubit_map);
                }
            }
            if (theta) {
                r.de_peq = energy(c.spec, *theta, h) - r.e_ref;
            }
            if (missing.empty()) {
                r.improvement = r.de_peq != 0.0 ? r.de_hf / r.de_peq
                                                : std::numeric_limits<real_t>::infinity();
                r.complete = true;
            } else {
                r.note = "missing:";
                for (const auto &m : missing) {
                    r.note += " " + m;
                }
            }
        } catch (const std::exception &e) {
            r.note = e.what();
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

inline Table benchmark_to_table(const std::vector<BenchmarkRow> &rows) {
    Table t({"system", "n_qubits", "e_ref", "ref", "dE_HF", "dE_Peq", "improvement", "status"});
    for (const auto &r : rows) {
        t.add_row({r.name, std::to_string(r.n_qubits), format_real(r.e_ref), r.ref_source,
                   format_real(r.de_hf), format_real(r.de_peq), format_real(r.improvement),
                   r.complete ? "complete" : ("incomplete " + r.note)});
    }
    return t;
}

} // namespace basinvqe::diagnostics
