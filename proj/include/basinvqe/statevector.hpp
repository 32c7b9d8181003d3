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
#include <span>
#include <vector>

#include "common.hpp"

namespace basinvqe {

/// Dense n-qubit amplitude vector. Qubit 0 is the least significant bit of
/// the basis-state index.
class Statevector {
  public:
    Statevector() = default;

    /// |0...0> on n qubits.
    explicit Statevector(std::size_t n_qubits)
        : n_qubits_(n_qubits), amps_(std::size_t{1} << n_qubits, complex_t{0.0, 0.0}) {
        amps_[0] = 1.0;
    }

    Statevector(std::size_t n_qubits, std::vector<complex_t> amps)
        : n_qubits_(n_qubits), amps_(std::move(amps)) {
        if (amps_.size() != (std::size_t{1} << n_qubits_)) {
            throw ValidationError("statevector length does not match 2^n_qubits");
        }
    }

    static Statevector basis(std::size_t n_qubits, std::size_t index) {
        Statevector s(n_qubits);
        s.amps_[0] = 0.0;
        s.amps_.at(index) = 1.0;
        return s;
    }

    [[nodiscard]] std::size_t n_qubits() const { return n_qubits_; }
    [[nodiscard]] std::size_t dim() const { return amps_.size(); }
    [[nodiscard]] std::span<const complex_t> amplitudes() const { return amps_; }
    [[nodiscard]] std::span<complex_t> amplitudes() { return amps_; }
    complex_t &operator[](std::size_t i) { return amps_[i]; }
    const complex_t &operator[](std::size_t i) const { return amps_[i]; }

    [[nodiscard]] real_t norm() const {
        real_t s = 0.0;
        for (const auto &a : amps_) {
            s += std::norm(a);
        }
        return std::sqrt(s);
    }

    void normalize() {
        const real_t n = norm();
        if (!(n > 0.0)) {
            throw NumericalError("cannot normalize a zero statevector");
        }
        for (auto &a : amps_) {
            a /= n;
        }
    }

  private:
    std::size_t n_qubits_ = 0;
    std::vector<complex_t> amps_;
};

/// <a|b>
inline complex_t inner_product(const Statevector &a, const Statevector &b) {
    if (a.dim() != b.dim()) {
        throw ValidationError("inner product of statevectors with different dimensions");
    }
    complex_t s{0.0, 0.0};
    const auto x = a.amplitudes();
    const auto y = b.amplitudes();
    for (std::size_t i = 0; i < x.size(); ++i) {
        s += std::conj(x[i]) * y[i];
    }
    return s;
}

} // namespace basinvqe
