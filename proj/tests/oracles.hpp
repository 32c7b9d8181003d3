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

// Independent reference implementations used as test oracles. Everything
// here builds full matrices with Kronecker products, so it is only meant for
// a handful of qubits.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "basinvqe/circuit.hpp"
#include "basinvqe/hamiltonian.hpp"

namespace oracle {

using basinvqe::real_t;
using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;

inline Mat pauli(char p) {
    Mat m(2, 2);
    switch (p) {
    case 'X':
        m << 0, 1, 1, 0;
        break;
    case 'Y':
        m << 0, cplx(0, -1), cplx(0, 1), 0;
        break;
    case 'Z':
        m << 1, 0, 0, -1;
        break;
    default:
        m = Mat::Identity(2, 2);
    }
    return m;
}

inline Mat kron(const Mat &a, const Mat &b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

/// Embeds single-qubit operators: ops[q] acts on qubit q (qubit 0 least
/// significant, so it is the rightmost Kronecker factor).
inline Mat embed(const std::vector<Mat> &ops) {
    Mat out = Mat::Identity(1, 1);
    for (std::size_t q = ops.size(); q-- > 0;) {
        out = kron(out, ops[q]);
    }
    return out;
}

inline Mat pauli_string(std::size_t n, const std::map<std::size_t, basinvqe::Pauli> &f) {
    std::vector<Mat> ops(n, Mat::Identity(2, 2));
    for (const auto &[q, p] : f) {
        ops[q] = pauli(static_cast<char>(p));
    }
    return embed(ops);
}

inline Mat dense(const basinvqe::QubitHamiltonian &h) {
    const auto n = h.n_qubits();
    Mat m = Mat::Zero(1 << n, 1 << n);
    for (const auto &t : h.terms()) {
        m += t.coefficient * pauli_string(n, t.factors);
    }
    return m;
}

inline Mat ry(real_t t) {
    Mat m(2, 2);
    m << std::cos(t / 2), -std::sin(t / 2), std::sin(t / 2), std::cos(t / 2);
    return m;
}

inline Mat rz(real_t p) {
    Mat m = Mat::Zero(2, 2);
    m(0, 0) = std::polar(1.0, -p / 2);
    m(1, 1) = std::polar(1.0, p / 2);
    return m;
}

/// CNOT as a permutation matrix on basis indices.
inline Mat cnot(std::size_t n, std::size_t c, std::size_t t) {
    const std::size_t d = std::size_t{1} << n;
    Mat m = Mat::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t b = 0; b < d; ++b) {
        const std::size_t out = ((b >> c) & 1U) ? (b ^ (std::size_t{1} << t)) : b;
        m(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(b)) = 1.0;
    }
    return m;
}

/// Full circuit unitary as a product of dense gate matrices.
inline Mat circuit_unitary(const basinvqe::AnsatzSpec &spec, const std::vector<real_t> &theta) {
    const auto n = spec.n_qubits;
    Mat u = Mat::Identity(1 << n, 1 << n);
    for (std::size_t l = 0; l <= spec.depth; ++l) {
        std::vector<Mat> layer(n);
        for (std::size_t q = 0; q < n; ++q) {
            const real_t ty = theta[2 * (l * n + q)];
            const real_t tz = theta[2 * (l * n + q) + 1];
            layer[q] = ry(ty) * rz(tz);
        }
        u = embed(layer) * u;
        if (l > 0) {
            for (std::size_t i = 0; i + 1 < n; i += 2) {
                u = cnot(n, i, i + 1) * u;
            }
            for (std::size_t i = 1; i + 1 < n; i += 2) {
                u = cnot(n, i, i + 1) * u;
            }
        }
    }
    return u;
}

inline Eigen::VectorXcd circuit_state(const basinvqe::AnsatzSpec &spec,
                                      const std::vector<real_t> &theta) {
    Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(1 << spec.n_qubits);
    e0(0) = 1.0;
    return circuit_unitary(spec, theta) * e0;
}

inline real_t energy(const basinvqe::AnsatzSpec &spec, const std::vector<real_t> &theta,
                     const Mat &h) {
    const auto psi = circuit_state(spec, theta);
    return (psi.adjoint() * h * psi)(0, 0).real();
}

/// Random Hamiltonian with n_terms non-identity Pauli strings, coefficients
/// uniform in [-1, 1].
inline basinvqe::QubitHamiltonian random_hamiltonian(std::size_t n, std::size_t n_terms,
                                                     std::mt19937_64 &rng) {
    std::uniform_real_distribution<real_t> coef(-1.0, 1.0);
    std::uniform_int_distribution<int> pick(0, 3);
    std::vector<basinvqe::PauliTerm> terms;
    while (terms.size() < n_terms) {
        basinvqe::PauliTerm t;
        t.coefficient = coef(rng);
        for (std::size_t q = 0; q < n; ++q) {
            const int p = pick(rng);
            if (p > 0) {
                t.factors[q] = static_cast<basinvqe::Pauli>("XYZ"[p - 1]);
            }
        }
        if (!t.factors.empty()) {
            terms.push_back(t);
        }
    }
    return {n, terms};
}

inline std::vector<real_t> random_angles(std::size_t p, std::mt19937_64 &rng) {
    std::uniform_real_distribution<real_t> u(-M_PI, M_PI);
    std::vector<real_t> t(p);
    for (auto &x : t) {
        x = u(rng);
    }
    return t;
}

/// Central finite-difference gradient of f.
template <class F>
std::vector<real_t> fd_gradient(F &&f, const std::vector<real_t> &x, real_t h) {
    std::vector<real_t> g(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        auto xp = x;
        auto xm = x;
        xp[k] += h;
        xm[k] -= h;
        g[k] = (f(xp) - f(xm)) / (2 * h);
    }
    return g;
}

/// Central finite-difference Hessian of f.
template <class F> Eigen::MatrixXd fd_hessian(F &&f, const std::vector<real_t> &x, real_t h) {
    const auto p = static_cast<Eigen::Index>(x.size());
    Eigen::MatrixXd m(p, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index k = 0; k < p; ++k) {
            auto at = [&](real_t sj, real_t sk) {
                auto y = x;
                y[static_cast<std::size_t>(j)] += sj;
                y[static_cast<std::size_t>(k)] += sk;
                return f(y);
            };
            m(j, k) = (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4 * h * h);
        }
    }
    return m;
}

} // namespace oracle
