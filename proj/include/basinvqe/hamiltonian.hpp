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

#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "common.hpp"
#include "geometry.hpp"
#include "statevector.hpp"

namespace basinvqe {

enum class Pauli : char { X = 'X', Y = 'Y', Z = 'Z' };

/// coefficient * prod_q P_q. Identity factors are implicit.
struct PauliTerm {
    real_t coefficient = 0.0;
    std::map<std::size_t, Pauli> factors;

    /// "X0 Z3 Y5"; the empty string is the identity.
    static PauliTerm parse(real_t coefficient, const std::string &text) {
        PauliTerm t;
        t.coefficient = coefficient;
        std::istringstream in(text);
        std::string tok;
        while (in >> tok) {
            if (tok.size() < 2 || (tok[0] != 'X' && tok[0] != 'Y' && tok[0] != 'Z')) {
                throw ConfigError("malformed Pauli factor '" + tok + "'");
            }
            std::size_t pos = 0;
            unsigned long q = 0;
            try {
                q = std::stoul(tok.substr(1), &pos);
            } catch (const std::exception &) {
                throw ConfigError("malformed Pauli factor '" + tok + "'");
            }
            if (pos != tok.size() - 1) {
                throw ConfigError("malformed Pauli factor '" + tok + "'");
            }
            if (!t.factors.emplace(q, static_cast<Pauli>(tok[0])).second) {
                throw ValidationError("qubit " + std::to_string(q) + " appears twice in '" +
                                      text + "'");
            }
        }
        return t;
    }

    [[nodiscard]] std::string label() const {
        std::string s;
        for (const auto &[q, p] : factors) {
            if (!s.empty()) {
                s += ' ';
            }
            s += static_cast<char>(p);
            s += std::to_string(q);
        }
        return s;
    }

    [[nodiscard]] bool is_diagonal() const {
        for (const auto &[q, p] : factors) {
            if (p != Pauli::Z) {
                return false;
            }
        }
        return true;
    }
};

struct ReferenceEnergies {
    std::optional<real_t> fci;
    std::optional<real_t> hf;
};

struct HamiltonianMetadata {
    std::string source;
    std::optional<MolecularGeometry> geometry;
    ReferenceEnergies energies;
    std::optional<std::vector<int>> hf_bitstring;
    /// atom index -> qubits owned by that atom
    std::optional<std::vector<std::vector<std::size_t>>> atom_qubit_map;
    /// Pass-through document keys (provenance, spin_ordering), serialized JSON.
    std::map<std::string, std::string> annotations;
};

/**
 * Weighted sum of Pauli strings on n_qubits. Real coefficients make it
 * Hermitian. Terms keep input order; each is compiled to bit masks so that
 * P|b> = i^{n_Y} (-1)^{popcount(b & z_mask)} |b xor x_mask>.
 */
class QubitHamiltonian {
  public:
    static constexpr std::size_t kDefaultQubitCap = 14;

    QubitHamiltonian() = default;
    QubitHamiltonian(std::size_t n_qubits, std::vector<PauliTerm> terms,
                     HamiltonianMetadata metadata = {})
        : n_qubits_(n_qubits), terms_(std::move(terms)), metadata_(std::move(metadata)) {
        if (n_qubits_ == 0 || n_qubits_ > 62) {
            throw ValidationError("n_qubits must be in [1, 62]");
        }
        if (terms_.empty()) {
            throw ValidationError("Hamiltonian has no terms");
        }
        compiled_.reserve(terms_.size());
        for (const auto &t : terms_) {
            if (!std::isfinite(t.coefficient)) {
                throw ValidationError("non-finite Pauli coefficient");
            }
            Compiled c;
            c.coefficient = t.coefficient;
            for (const auto &[q, p] : t.factors) {
                if (q >= n_qubits_) {
                    throw ValidationError("term '" + t.label() + "' acts on qubit " +
                                          std::to_string(q) + " but n_qubits = " +
                                          std::to_string(n_qubits_));
                }
                const std::uint64_t bit = std::uint64_t{1} << q;
                if (p == Pauli::X || p == Pauli::Y) {
                    c.x_mask |= bit;
                }
                if (p == Pauli::Z || p == Pauli::Y) {
                    c.z_mask |= bit;
                }
                if (p == Pauli::Y) {
                    ++c.n_y;
                }
            }
            // i^{n_Y}
            static constexpr std::array<complex_t, 4> kIPow{complex_t{1, 0}, complex_t{0, 1},
                                                           complex_t{-1, 0}, complex_t{0, -1}};
            c.phase = kIPow[c.n_y % 4];
            compiled_.push_back(c);
        }
        if (metadata_.hf_bitstring && metadata_.hf_bitstring->size() != n_qubits_) {
            throw ValidationError("hf_bitstring length does not match n_qubits");
        }
        if (metadata_.atom_qubit_map) {
            for (const auto &block : *metadata_.atom_qubit_map) {
                for (auto q : block) {
                    if (q >= n_qubits_) {
                        throw ValidationError("atom_qubit_map references qubit out of range");
                    }
                }
            }
        }
    }

    [[nodiscard]] std::size_t n_qubits() const { return n_qubits_; }
    [[nodiscard]] std::size_t dim() const { return std::size_t{1} << n_qubits_; }
    [[nodiscard]] const std::vector<PauliTerm> &terms() const { return terms_; }
    [[nodiscard]] const HamiltonianMetadata &metadata() const { return metadata_; }
    HamiltonianMetadata &metadata() { return metadata_; }

    /// Sum of |c|, an upper bound on the spectral norm.
    [[nodiscard]] real_t norm_bound() const {
        real_t s = 0.0;
        for (const auto &t : terms_) {
            s += std::abs(t.coefficient);
        }
        return s;
    }

    /// True when every term has an even number of Y factors (real matrix).
    [[nodiscard]] bool is_real() const {
        for (const auto &c : compiled_) {
            if (c.n_y % 2 != 0) {
                return false;
            }
        }
        return true;
    }

    struct Compiled {
        real_t coefficient = 0.0;
        std::uint64_t x_mask = 0;
        std::uint64_t z_mask = 0;
        unsigned n_y = 0;
        complex_t phase{1.0, 0.0};
    };
    [[nodiscard]] const std::vector<Compiled> &compiled() const { return compiled_; }

  private:
    std::size_t n_qubits_ = 0;
    std::vector<PauliTerm> terms_;
    std::vector<Compiled> compiled_;
    HamiltonianMetadata metadata_;
};

namespace detail {
inline real_t parity_sign(std::uint64_t b) { return (std::popcount(b) & 1U) ? -1.0 : 1.0; }

inline void check_dim(const QubitHamiltonian &h, const Statevector &psi) {
    if (psi.dim() != h.dim()) {
        throw ValidationError("statevector dimension " + std::to_string(psi.dim()) +
                              " does not match Hamiltonian dimension " + std::to_string(h.dim()));
    }
}

inline void check_normalized(const Statevector &psi) {
    if (std::abs(psi.norm() - 1.0) > 1e-10) {
        throw ValidationError("statevector is not normalized");
    }
}
} // namespace detail

/// H|psi> as a fresh vector.
inline Statevector apply_hamiltonian(const QubitHamiltonian &h, const Statevector &psi) {
    detail::check_dim(h, psi);
    std::vector<complex_t> out(psi.dim(), complex_t{0.0, 0.0});
    const auto in = psi.amplitudes();
    for (const auto &t : h.compiled()) {
        const complex_t f = t.coefficient * t.phase;
        for (std::uint64_t b = 0; b < in.size(); ++b) {
            out[b ^ t.x_mask] += f * detail::parity_sign(b & t.z_mask) * in[b];
        }
    }
    return Statevector(psi.n_qubits(), std::move(out));
}

/// <psi|H|psi> without normalization checks; used by the circuit hot path.
inline real_t expectation_unchecked(const QubitHamiltonian &h, const Statevector &psi) {
    const auto a = psi.amplitudes();
    real_t re = 0.0;
    for (const auto &t : h.compiled()) {
        complex_t acc{0.0, 0.0};
        if (t.x_mask == 0) {
            real_t d = 0.0;
            for (std::uint64_t b = 0; b < a.size(); ++b) {
                d += detail::parity_sign(b & t.z_mask) * std::norm(a[b]);
            }
            acc = d;
        } else {
            for (std::uint64_t b = 0; b < a.size(); ++b) {
                acc += std::conj(a[b ^ t.x_mask]) * (detail::parity_sign(b & t.z_mask) * a[b]);
            }
        }
        re += t.coefficient * (t.phase * acc).real();
    }
    return re;
}

/// <psi|H|psi> for normalized psi.
inline real_t expectation(const QubitHamiltonian &h, const Statevector &psi) {
    detail::check_dim(h, psi);
    detail::check_normalized(psi);
    const Statevector hpsi = apply_hamiltonian(h, psi);
    const complex_t e = inner_product(psi, hpsi);
    if (std::abs(e.imag()) > 1e-10 * std::max(1.0, h.norm_bound())) {
        throw NumericalError("expectation value has an imaginary part");
    }
    return e.real();
}

/// <H^2> - <H>^2, clamped at zero.
inline real_t hamiltonian_variance(const QubitHamiltonian &h, const Statevector &psi) {
    detail::check_dim(h, psi);
    detail::check_normalized(psi);
    const Statevector hpsi = apply_hamiltonian(h, psi);
    const real_t mean = inner_product(psi, hpsi).real();
    const real_t second = inner_product(hpsi, hpsi).real();
    return std::max(0.0, second - mean * mean);
}

/// <bits|H|bits>. Only all-Z terms contribute.
inline real_t basis_state_energy(const QubitHamiltonian &h, const std::vector<int> &bits) {
    if (bits.size() != h.n_qubits()) {
        throw ValidationError("bitstring length does not match n_qubits");
    }
    std::uint64_t b = 0;
    for (std::size_t q = 0; q < bits.size(); ++q) {
        if (bits[q] != 0 && bits[q] != 1) {
            throw ValidationError("bitstring entries must be 0 or 1");
        }
        b |= static_cast<std::uint64_t>(bits[q]) << q;
    }
    real_t e = 0.0;
    for (const auto &t : h.compiled()) {
        if (t.x_mask == 0) {
            e += t.coefficient * detail::parity_sign(b & t.z_mask);
        }
    }
    return e;
}

/// Dense 2^n x 2^n matrix. Only for small n (tests, eigensolver).
inline Eigen::MatrixXcd dense_matrix(const QubitHamiltonian &h) {
    const auto d = static_cast<Eigen::Index>(h.dim());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
    for (const auto &t : h.compiled()) {
        const complex_t f = t.coefficient * t.phase;
        for (std::uint64_t b = 0; b < h.dim(); ++b) {
            m(static_cast<Eigen::Index>(b ^ t.x_mask), static_cast<Eigen::Index>(b)) +=
                f * detail::parity_sign(b & t.z_mask);
        }
    }
    return m;
}

} // namespace basinvqe
