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
#include <gtest/gtest.h>

#include <random>

#include "basinvqe/circuit.hpp"
#include "basinvqe/hamiltonian.hpp"
#include "basinvqe/vqe.hpp"
#include "oracles.hpp"

using namespace basinvqe;

namespace {

QubitHamiltonian single(const std::string &label, std::size_t n) {
    return {n, {PauliTerm::parse(1.0, label)}};
}

} // namespace

TEST(AnsatzSpec, ParameterCountAndLayoutBijection) {
    EXPECT_EQ(param_count(12, 4), 120U);
    EXPECT_EQ(param_count(1, 0), 2U);
    EXPECT_EQ(param_count(8, 4), 80U);
    const AnsatzSpec spec{5, 3};
    std::vector<int> hit(spec.n_params(), 0);
    for (std::size_t q = 0; q < 5; ++q) {
        for (std::size_t l = 0; l <= 3; ++l) {
            for (auto s : {AngleSlot::y, AngleSlot::z}) {
                const auto k = spec.index(q, l, s);
                ASSERT_LT(k, spec.n_params());
                ++hit[k];
                const auto loc = spec.locate(k);
                EXPECT_EQ(loc.qubit, q);
                EXPECT_EQ(loc.layer, l);
                EXPECT_EQ(loc.slot, s);
            }
        }
    }
    for (int h : hit) {
        EXPECT_EQ(h, 1);
    }
}

TEST(PrepareState, SingleQubitExamples) {
    const AnsatzSpec spec{1, 0};
    const auto zero = prepare_state(spec, {0.0, 0.0});
    EXPECT_NEAR(std::abs(zero[0]), 1.0, 1e-15);
    const auto one = prepare_state(spec, {kPi, 0.0});
    EXPECT_NEAR(std::abs(one[1]), 1.0, 1e-15);
    EXPECT_THROW(prepare_state(spec, {0.0}), ValidationError);
}

TEST(PrepareState, MatchesDenseGateProductOracle) {
    std::mt19937_64 rng(1);
    for (const auto &spec : {AnsatzSpec{2, 1}, AnsatzSpec{3, 2}, AnsatzSpec{4, 2}}) {
        for (int t = 0; t < 5; ++t) {
            const auto theta = oracle::random_angles(spec.n_params(), rng);
            const auto psi = prepare_state(spec, theta);
            const auto ref = oracle::circuit_state(spec, theta);
            for (std::size_t i = 0; i < psi.dim(); ++i) {
                EXPECT_NEAR(std::abs(psi[i] - ref(static_cast<Eigen::Index>(i))), 0.0, 1e-12);
            }
            EXPECT_NEAR(psi.norm(), 1.0, 1e-10);
        }
    }
}

TEST(EntanglingLayer, Examples) {
    // |10> with qubit 0 set is basis index 1; CNOT(0->1) gives index 3.
    auto a = entangling_layer(Statevector::basis(2, 1), 2);
    EXPECT_NEAR(std::abs(a[3]), 1.0, 1e-15);
    auto b = entangling_layer(Statevector::basis(2, 2), 2);
    EXPECT_NEAR(std::abs(b[2]), 1.0, 1e-15);
    // N=4, qubits (0,1,2,3) = (1,0,1,0): even pass CNOT(0,1), CNOT(2,3) -> 1111,
    // odd pass CNOT(1,2) -> 1101 (qubit 2 cleared).
    const std::size_t in = 0b0101;
    std::size_t want = in;
    auto cnot = [](std::size_t b, std::size_t c, std::size_t t) {
        return ((b >> c) & 1U) ? b ^ (std::size_t{1} << t) : b;
    };
    want = cnot(cnot(want, 0, 1), 2, 3);
    want = cnot(want, 1, 2);
    EXPECT_EQ(want, 0b1011U);
    auto c = entangling_layer(Statevector::basis(4, in), 4);
    EXPECT_NEAR(std::abs(c[want]), 1.0, 1e-15);
    EXPECT_THROW(entangling_layer(Statevector(3), 4), ValidationError);
}

TEST(Energy, SingleQubitClosedForm) {
    const AnsatzSpec spec{1, 0};
    const auto z = single("Z0", 1);
    EXPECT_NEAR(energy(spec, {0.0, 0.0}, z), 1.0, 1e-15);
    EXPECT_NEAR(energy(spec, {kPi / 2, 0.0}, z), 0.0, 1e-15);
    EXPECT_NEAR(energy(spec, {kPi, 0.0}, z), -1.0, 1e-15);
    EXPECT_THROW(energy(spec, {0.0, 0.0}, single("Z1", 2)), ValidationError);
}

TEST(Gradient, SingleQubitClosedForm) {
    const auto g = gradient(AnsatzSpec{1, 0}, {kPi / 2, 0.0}, single("Z0", 1));
    EXPECT_NEAR(g[0], -1.0, 1e-14);
    EXPECT_NEAR(g[1], 0.0, 1e-14);
}

TEST(Gradient, MatchesFiniteDifferences) {
    std::mt19937_64 rng(7);
    const AnsatzSpec spec{3, 2};
    for (int t = 0; t < 5; ++t) {
        const auto h = oracle::random_hamiltonian(3, 5, rng);
        const auto theta = oracle::random_angles(spec.n_params(), rng);
        const auto g = gradient(spec, theta, h);
        const auto fd = oracle::fd_gradient(
            [&](const std::vector<real_t> &x) { return energy(spec, x, h); }, theta, 1e-5);
        for (std::size_t k = 0; k < g.size(); ++k) {
            EXPECT_NEAR(g[k], fd[k], 1e-6);
        }
        EXPECT_EQ(g, gradient(spec, theta, h, 3));
    }
}

TEST(Hessian, SingleQubitClosedForm) {
    const auto m = hessian(AnsatzSpec{1, 0}, {0.0, 0.0}, single("Z0", 1));
    EXPECT_NEAR(m(0, 0), -1.0, 1e-14);
}

TEST(Hessian, MatchesFiniteDifferencesAndIsSymmetric) {
    std::mt19937_64 rng(9);
    const AnsatzSpec spec{3, 1};
    for (int t = 0; t < 3; ++t) {
        const auto h = oracle::random_hamiltonian(3, 5, rng);
        const auto theta = oracle::random_angles(spec.n_params(), rng);
        Eigen::MatrixXd raw;
        const auto m = hessian(spec, theta, h, 2, &raw);
        EXPECT_LT((raw - raw.transpose()).cwiseAbs().maxCoeff(), 1e-8);
        const auto fd = oracle::fd_hessian(
            [&](const std::vector<real_t> &x) { return energy(spec, x, h); }, theta, 1e-4);
        EXPECT_LT((m - fd).cwiseAbs().maxCoeff(), 1e-4);
        EXPECT_LT((m - hessian(spec, theta, h)).cwiseAbs().maxCoeff(), 1e-14);
    }
}

TEST(Hessian, ShapeForTwelveQubitsDepthFour) {
    const AnsatzSpec spec{12, 4};
    EXPECT_EQ(spec.n_params(), 120U);
}

TEST(Fidelity, Examples) {
    std::mt19937_64 rng(3);
    const AnsatzSpec spec{3, 2};
    const auto theta = oracle::random_angles(spec.n_params(), rng);
    EXPECT_NEAR(fidelity(spec, theta, theta), 1.0, 1e-12);
    EXPECT_NEAR(fidelity(AnsatzSpec{1, 0}, {0.0, 0.0}, {kPi, 0.0}), 0.0, 1e-15);
    for (std::size_t k = 0; k < spec.n_params(); ++k) {
        auto shifted = theta;
        shifted[k] += 2 * kPi;
        EXPECT_NEAR(fidelity(spec, theta, shifted), 1.0, 1e-12);
    }
    EXPECT_THROW(fidelity(spec, theta, {0.0}), ValidationError);
}

TEST(Periodicity, EnergyGradientHessianUnderTwoPiShifts) {
    std::mt19937_64 rng(12);
    const AnsatzSpec spec{2, 1};
    const auto h = oracle::random_hamiltonian(2, 4, rng);
    const auto theta = oracle::random_angles(spec.n_params(), rng);
    const auto e = energy(spec, theta, h);
    const auto g = gradient(spec, theta, h);
    const auto m = hessian(spec, theta, h);
    for (std::size_t k = 0; k < spec.n_params(); ++k) {
        auto s = theta;
        s[k] += 2 * kPi;
        EXPECT_NEAR(energy(spec, s, h), e, 1e-12);
        const auto gs = gradient(spec, s, h);
        for (std::size_t j = 0; j < g.size(); ++j) {
            EXPECT_NEAR(gs[j], g[j], 1e-12);
        }
        EXPECT_LT((hessian(spec, s, h) - m).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(LightCone, GradientVanishesOutsideCausalCone) {
    std::mt19937_64 rng(13);
    const std::size_t n = 10;
    const std::size_t depth = 1;
    const AnsatzSpec spec{n, depth};
    const std::size_t q = 8;
    const auto h = single("Z" + std::to_string(q), n);
    const auto theta = oracle::random_angles(spec.n_params(), rng);
    const auto g = gradient(spec, theta, h);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const auto loc = spec.locate(k);
        const auto lo = q >= 2 * depth ? q - 2 * depth : 0;
        if (loc.qubit < lo || loc.qubit > q + 2 * depth) {
            EXPECT_LT(std::abs(g[k]), 1e-10) << "parameter " << k;
        }
    }
}

TEST(Norm, PreservedForRandomCircuits) {
    std::mt19937_64 rng(14);
    for (std::size_t n = 1; n <= 6; ++n) {
        const AnsatzSpec spec{n, 3};
        const auto psi = prepare_state(spec, oracle::random_angles(spec.n_params(), rng));
        EXPECT_NEAR(psi.norm(), 1.0, 1e-10);
    }
}

TEST(HfTheta, PreparesDeterminant) {
    EXPECT_EQ(hf_theta(AnsatzSpec{3, 2}, {0, 0, 0}), ParameterVector(18, 0.0));
    const auto one = prepare_state(AnsatzSpec{1, 0}, hf_theta(AnsatzSpec{1, 0}, {1}));
    EXPECT_NEAR(std::abs(one[1]), 1.0, 1e-15);
    std::mt19937_64 rng(15);
    for (std::size_t depth : {0U, 1U, 3U}) {
        const AnsatzSpec spec{4, depth};
        const std::vector<int> bits{1, 1, 0, 1};
        const auto h = oracle::random_hamiltonian(4, 8, rng);
        EXPECT_NEAR(energy(spec, hf_theta(spec, bits), h), basis_state_energy(h, bits), 1e-12);
        const auto psi = prepare_state(spec, hf_theta(spec, bits));
        EXPECT_NEAR(std::abs(psi[0b1011]), 1.0, 1e-12);
    }
    EXPECT_THROW(hf_theta(AnsatzSpec{2, 0}, {1}), ValidationError);
}
