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
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "common.hpp"
#include "hamiltonian.hpp"
#include "statevector.hpp"

namespace basinvqe {

struct SpectrumResult {
    real_t ground_energy = 0.0;
    Statevector ground_state;
    std::optional<real_t> gap;
};

enum class EigenMethod { automatic, dense, lanczos };

struct SpectrumOptions {
    std::size_t qubit_cap = QubitHamiltonian::kDefaultQubitCap;
    /// Dense diagonalization up to this many qubits, Lanczos above.
    std::size_t dense_max_qubits = 10;
    EigenMethod method = EigenMethod::automatic;
    std::size_t max_iterations = 400;
    real_t residual_tol = 1e-9;
};

namespace detail {

/// Makes the first amplitude with |a| > 1e-10 real and positive.
inline void fix_global_phase(Statevector &psi) {
    auto a = psi.amplitudes();
    for (const auto &x : a) {
        if (std::abs(x) > 1e-10) {
            const complex_t ph = std::conj(x) / std::abs(x);
            for (auto &y : a) {
                y *= ph;
            }
            return;
        }
    }
}

inline SpectrumResult dense_ground_state(const QubitHamiltonian &h) {
    const Eigen::MatrixXcd m = dense_matrix(h);
    const auto n = h.n_qubits();
    std::vector<complex_t> amps(h.dim());
    real_t e0 = 0.0;
    std::optional<real_t> gap;
    if (h.is_real()) {
        const Eigen::MatrixXd mr = m.real();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mr);
        if (es.info() != Eigen::Success) {
            throw NumericalError("dense eigensolver failed");
        }
        e0 = es.eigenvalues()(0);
        if (es.eigenvalues().size() > 1) {
            gap = es.eigenvalues()(1) - e0;
        }
        for (std::size_t i = 0; i < amps.size(); ++i) {
            amps[i] = es.eigenvectors()(static_cast<Eigen::Index>(i), 0);
        }
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
        if (es.info() != Eigen::Success) {
            throw NumericalError("dense eigensolver failed");
        }
        e0 = es.eigenvalues()(0);
        if (es.eigenvalues().size() > 1) {
            gap = es.eigenvalues()(1) - e0;
        }
        for (std::size_t i = 0; i < amps.size(); ++i) {
            amps[i] = es.eigenvectors()(static_cast<Eigen::Index>(i), 0);
        }
    }
    Statevector psi(n, std::move(amps));
    psi.normalize();
    fix_global_phase(psi);
    return {e0, std::move(psi), gap};
}

/// Lanczos with full reorthogonalization (two Gram-Schmidt passes per step).
inline SpectrumResult lanczos_ground_state(const QubitHamiltonian &h, const SpectrumOptions &opt) {
    const std::size_t dim = h.dim();
    const std::size_t n = h.n_qubits();
    const std::size_t max_m = std::min(opt.max_iterations, dim);
    std::vector<Statevector> basis;
    std::vector<real_t> alpha;
    std::vector<real_t> beta;

    Statevector v(n);
    {
        std::mt19937_64 rng(0x5eed1a2c05ULL);
        std::normal_distribution<real_t> normal(0.0, 1.0);
        for (std::size_t i = 0; i < dim; ++i) {
            v[i] = complex_t{normal(rng), h.is_real() ? 0.0 : normal(rng)};
        }
        v.normalize();
    }
    const real_t scale = std::max(1.0, h.norm_bound());

    real_t ritz = 0.0;
    Eigen::VectorXd ritz_vec;
    bool converged = false;
    for (std::size_t j = 0; j < max_m; ++j) {
        basis.push_back(v);
        Statevector w = apply_hamiltonian(h, basis.back());
        const real_t a = inner_product(basis.back(), w).real();
        alpha.push_back(a);
        auto wa = w.amplitudes();
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto &q : basis) {
                const complex_t c = inner_product(q, w);
                const auto qa = q.amplitudes();
                for (std::size_t i = 0; i < dim; ++i) {
                    wa[i] -= c * qa[i];
                }
            }
        }
        const real_t b = w.norm();

        const auto m = static_cast<Eigen::Index>(alpha.size());
        const bool check = (j % 5 == 4) || b < 1e-12 * scale || j + 1 == max_m;
        if (check) {
            Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
            for (Eigen::Index k = 0; k < m; ++k) {
                t(k, k) = alpha[static_cast<std::size_t>(k)];
                if (k + 1 < m) {
                    t(k, k + 1) = t(k + 1, k) = beta[static_cast<std::size_t>(k)];
                }
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
            ritz = es.eigenvalues()(0);
            ritz_vec = es.eigenvectors().col(0);
            const real_t resid = b * std::abs(ritz_vec(m - 1));
            if (resid < 0.1 * opt.residual_tol * scale || b < 1e-12 * scale) {
                converged = true;
                break;
            }
        }
        beta.push_back(b);
        for (auto &x : wa) {
            x /= b;
        }
        v = std::move(w);
    }
    if (!converged) {
        throw NumericalError("Lanczos did not converge within " +
                             std::to_string(opt.max_iterations) + " iterations");
    }
    std::vector<complex_t> amps(dim, complex_t{0.0, 0.0});
    for (std::size_t k = 0; k < static_cast<std::size_t>(ritz_vec.size()); ++k) {
        const auto qa = basis[k].amplitudes();
        for (std::size_t i = 0; i < dim; ++i) {
            amps[i] += ritz_vec(static_cast<Eigen::Index>(k)) * qa[i];
        }
    }
    Statevector psi(n, std::move(amps));
    psi.normalize();
    fix_global_phase(psi);
    return {ritz, std::move(psi), std::nullopt};
}

} // namespace detail

/// Lowest eigenpair of H. Ground-state phase fixed so that the first
/// non-negligible amplitude is real and positive.
inline SpectrumResult exact_ground_state(const QubitHamiltonian &h, const SpectrumOptions &opt = {}) {
    if (h.n_qubits() > opt.qubit_cap) {
        throw ValidationError("exact_ground_state: " + std::to_string(h.n_qubits()) +
                              " qubits exceeds cap " + std::to_string(opt.qubit_cap));
    }
    bool dense = h.n_qubits() <= opt.dense_max_qubits;
    if (opt.method == EigenMethod::dense) {
        dense = true;
    } else if (opt.method == EigenMethod::lanczos) {
        dense = false;
    }
    SpectrumResult r = dense ? detail::dense_ground_state(h) : detail::lanczos_ground_state(h, opt);

    const Statevector hpsi = apply_hamiltonian(h, r.ground_state);
    real_t resid = 0.0;
    for (std::size_t i = 0; i < hpsi.dim(); ++i) {
        resid += std::norm(hpsi[i] - r.ground_energy * r.ground_state[i]);
    }
    if (std::sqrt(resid) > opt.residual_tol * std::max(1.0, h.norm_bound())) {
        throw NumericalError("ground state residual above tolerance");
    }
    return r;
}

} // namespace basinvqe
