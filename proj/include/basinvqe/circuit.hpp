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
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "common.hpp"
#include "hamiltonian.hpp"
#include "statevector.hpp"

namespace basinvqe {

using ParameterVector = std::vector<real_t>;

enum class AngleSlot : std::size_t { y = 0, z = 1 };

/**
 * Brick-wall hardware-efficient ansatz: an initial layer of Ry(theta) Rz(phi)
 * on every qubit, then `depth` blocks of the same rotations followed by the
 * entangling layer. Flat layout: index(q, l, slot) = 2 (l N + q) + slot, so
 * each qubit owns a contiguous (y, z) pair per layer.
 */
struct AnsatzSpec {
    std::size_t n_qubits = 1;
    std::size_t depth = 0;

    [[nodiscard]] std::size_t n_params() const { return 2 * n_qubits * (depth + 1); }

    [[nodiscard]] std::size_t index(std::size_t qubit, std::size_t layer, AngleSlot slot) const {
        return 2 * (layer * n_qubits + qubit) + static_cast<std::size_t>(slot);
    }

    struct Location {
        std::size_t qubit;
        std::size_t layer;
        AngleSlot slot;
    };

    [[nodiscard]] Location locate(std::size_t k) const {
        const std::size_t pair = k / 2;
        return {pair % n_qubits, pair / n_qubits, static_cast<AngleSlot>(k % 2)};
    }

    void check(const ParameterVector &theta) const {
        if (theta.size() != n_params()) {
            throw ValidationError("parameter vector has length " + std::to_string(theta.size()) +
                                  ", ansatz expects " + std::to_string(n_params()));
        }
    }
};

inline std::size_t param_count(std::size_t n_qubits, std::size_t depth) {
    return 2 * n_qubits * (depth + 1);
}

namespace detail {

/// Applies the 2x2 unitary [[u00, u01], [u10, u11]] to qubit q.
inline void apply_1q(std::span<complex_t> a, std::size_t q, complex_t u00, complex_t u01,
                     complex_t u10, complex_t u11) {
    const std::size_t stride = std::size_t{1} << q;
    for (std::size_t base = 0; base < a.size(); base += 2 * stride) {
        for (std::size_t j = base; j < base + stride; ++j) {
            const complex_t a0 = a[j];
            const complex_t a1 = a[j + stride];
            a[j] = u00 * a0 + u01 * a1;
            a[j + stride] = u10 * a0 + u11 * a1;
        }
    }
}

/// Ry(theta) Rz(phi) with Ry = exp(-i theta Y / 2), Rz = exp(-i phi Z / 2).
inline void apply_ry_rz(std::span<complex_t> a, std::size_t q, real_t theta, real_t phi) {
    const real_t c = std::cos(0.5 * theta);
    const real_t s = std::sin(0.5 * theta);
    const complex_t em = std::polar(1.0, -0.5 * phi);
    const complex_t ep = std::polar(1.0, 0.5 * phi);
    apply_1q(a, q, c * em, -s * ep, s * em, c * ep);
}

inline void apply_cnot(std::span<complex_t> a, std::size_t control, std::size_t target) {
    const std::size_t cb = std::size_t{1} << control;
    const std::size_t tb = std::size_t{1} << target;
    for (std::size_t b = 0; b < a.size(); ++b) {
        if ((b & cb) != 0 && (b & tb) == 0) {
            std::swap(a[b], a[b | tb]);
        }
    }
}

} // namespace detail

/// CNOT(i -> i+1) for even i, then for odd i. Open boundary.
inline void apply_entangling_layer(Statevector &psi) {
    const std::size_t n = psi.n_qubits();
    for (std::size_t start : {std::size_t{0}, std::size_t{1}}) {
        for (std::size_t i = start; i + 1 < n; i += 2) {
            detail::apply_cnot(psi.amplitudes(), i, i + 1);
        }
    }
}

inline Statevector entangling_layer(Statevector psi, std::size_t n_qubits) {
    if (psi.n_qubits() != n_qubits) {
        throw ValidationError("entangling_layer: qubit count mismatch");
    }
    apply_entangling_layer(psi);
    return psi;
}

inline Statevector prepare_state(const AnsatzSpec &spec, const ParameterVector &theta) {
    spec.check(theta);
    Statevector psi(spec.n_qubits);
    for (std::size_t l = 0; l <= spec.depth; ++l) {
        for (std::size_t q = 0; q < spec.n_qubits; ++q) {
            detail::apply_ry_rz(psi.amplitudes(), q, theta[spec.index(q, l, AngleSlot::y)],
                                theta[spec.index(q, l, AngleSlot::z)]);
        }
        if (l > 0) {
            apply_entangling_layer(psi);
        }
    }
    return psi;
}

namespace detail {
inline void check_spec_hamiltonian(const AnsatzSpec &spec, const QubitHamiltonian &h) {
    if (spec.n_qubits != h.n_qubits()) {
        throw ValidationError("ansatz has " + std::to_string(spec.n_qubits) +
                              " qubits, Hamiltonian has " + std::to_string(h.n_qubits()));
    }
}
} // namespace detail

inline real_t energy(const AnsatzSpec &spec, const ParameterVector &theta,
                     const QubitHamiltonian &h) {
    detail::check_spec_hamiltonian(spec, h);
    return expectation_unchecked(h, prepare_state(spec, theta));
}

inline constexpr real_t kShift = kPi / 2.0;

/// Single gradient entry by the two-point shift rule.
inline real_t gradient_entry(const AnsatzSpec &spec, const ParameterVector &theta,
                             const QubitHamiltonian &h, std::size_t k) {
    ParameterVector t = theta;
    t[k] = theta[k] + kShift;
    const real_t ep = energy(spec, t, h);
    t[k] = theta[k] - kShift;
    const real_t em = energy(spec, t, h);
    return 0.5 * (ep - em);
}

/// Exact gradient: dE/dtheta_k = [E(theta + pi/2 e_k) - E(theta - pi/2 e_k)] / 2.
inline std::vector<real_t> gradient(const AnsatzSpec &spec, const ParameterVector &theta,
                                    const QubitHamiltonian &h, unsigned workers = 1) {
    detail::check_spec_hamiltonian(spec, h);
    spec.check(theta);
    std::vector<real_t> g(theta.size());
    parallel_for(theta.size(), workers,
                 [&](std::size_t k) { g[k] = gradient_entry(spec, theta, h, k); });
    return g;
}

/**
 * Exact Hessian by the four-point double-shift rule,
 * H_jk = [E(++) - E(+-) - E(-+) + E(--)] / 4 with shifts of pi/2.
 * Entries are computed for j <= k and mirrored; `raw` (optional) receives the
 * unsymmetrized matrix with both triangles evaluated independently.
 */
inline Eigen::MatrixXd hessian(const AnsatzSpec &spec, const ParameterVector &theta,
                               const QubitHamiltonian &h, unsigned workers = 1,
                               Eigen::MatrixXd *raw = nullptr) {
    detail::check_spec_hamiltonian(spec, h);
    spec.check(theta);
    const std::size_t p = theta.size();
    auto entry = [&](std::size_t j, std::size_t k) {
        ParameterVector t = theta;
        auto eval = [&](real_t sj, real_t sk) {
            t = theta;
            t[j] += sj;
            t[k] += sk;
            return energy(spec, t, h);
        };
        return 0.25 * (eval(kShift, kShift) - eval(kShift, -kShift) - eval(-kShift, kShift) +
                       eval(-kShift, -kShift));
    };
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p),
                                              static_cast<Eigen::Index>(p));
    if (raw != nullptr) {
        parallel_for(p * p, workers, [&](std::size_t idx) {
            m(static_cast<Eigen::Index>(idx / p), static_cast<Eigen::Index>(idx % p)) =
                entry(idx / p, idx % p);
        });
        *raw = m;
        return 0.5 * (m + m.transpose());
    }
    // Upper triangle including diagonal, row-major enumeration.
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(p * (p + 1) / 2);
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t k = j; k < p; ++k) {
            pairs.emplace_back(j, k);
        }
    }
    std::vector<real_t> vals(pairs.size());
    parallel_for(pairs.size(), workers,
                 [&](std::size_t i) { vals[i] = entry(pairs[i].first, pairs[i].second); });
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto j = static_cast<Eigen::Index>(pairs[i].first);
        const auto k = static_cast<Eigen::Index>(pairs[i].second);
        m(j, k) = vals[i];
        m(k, j) = vals[i];
    }
    return m;
}

/// |<psi(theta)|psi(theta')>|^2
inline real_t fidelity(const AnsatzSpec &spec, const ParameterVector &theta,
                       const ParameterVector &theta_prime) {
    spec.check(theta);
    spec.check(theta_prime);
    return std::norm(inner_product(prepare_state(spec, theta), prepare_state(spec, theta_prime)));
}

} // namespace basinvqe
