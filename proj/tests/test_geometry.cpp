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

#include "basinvqe/chain_model.hpp"
#include "basinvqe/features.hpp"
#include "basinvqe/geometry.hpp"
#include "basinvqe/hamiltonian_io.hpp"

using namespace basinvqe;

namespace {

Eigen::MatrixXd distance_matrix(const MolecularGeometry &g) {
    Eigen::MatrixXd d(g.size(), g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (std::size_t j = 0; j < g.size(); ++j) {
            d(i, j) = g.distance(i, j);
        }
    }
    return d;
}

MolecularGeometry random_cluster(std::size_t n, std::mt19937_64 &rng,
                                 const std::vector<std::string> &elements) {
    std::uniform_real_distribution<real_t> u(-1.5, 1.5);
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < n; ++i) {
        atoms.push_back({elements[i % elements.size()], Vec3(u(rng), u(rng), u(rng))});
    }
    return MolecularGeometry(std::move(atoms));
}

real_t max_diff(const std::vector<real_t> &a, const std::vector<real_t> &b) {
    real_t m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}

const FeatureConfig kSmallFeatures{3.0, 6, 0.0, true, 3};

} // namespace

TEST(Geometry, ValidationErrors) {
    EXPECT_THROW(MolecularGeometry(std::vector<Atom>{}), ValidationError);
    EXPECT_THROW(MolecularGeometry({{"H", Vec3::Zero()}, {"H", Vec3(1e-7, 0, 0)}}), ValidationError);
    EXPECT_THROW(MolecularGeometry({{"H", Vec3(std::nan(""), 0, 0)}}), ValidationError);
}

TEST(RigidMotion, IdentityAndTranslation) {
    const auto g = linear_chain("H", 4, 1.0);
    const auto same = apply_rigid_motion(g, RigidMotion{});
    for (std::size_t i = 0; i < g.size(); ++i) {
        EXPECT_EQ(same[i].position, g[i].position);
        EXPECT_EQ(same[i].element, g[i].element);
    }
    RigidMotion t;
    t.translation = Vec3(1.5, -2.0, 3.25);
    EXPECT_LT((distance_matrix(apply_rigid_motion(g, t)) - distance_matrix(g)).cwiseAbs().maxCoeff(),
              1e-12);
}

TEST(RigidMotion, RotationPreservesDistanceMatrix) {
    const auto g = linear_chain("H", 4, 0.9);
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto m = random_rigid_motion(s);
        EXPECT_LT((distance_matrix(apply_rigid_motion(g, m)) - distance_matrix(g)).cwiseAbs().maxCoeff(),
                  1e-12);
    }
}

TEST(RigidMotion, RejectsImproperRotation) {
    RigidMotion m;
    m.rotation(0, 0) = -1.0;
    EXPECT_THROW(apply_rigid_motion(linear_chain("H", 2, 1.0), m), ValidationError);
}

TEST(RandomRigidMotion, InvariantsDeterminismAndSymmetry) {
    Eigen::Matrix3d sum = Eigen::Matrix3d::Zero();
    const int n = 10000;
    for (int s = 0; s < n; ++s) {
        const auto m = random_rigid_motion(static_cast<std::uint64_t>(s));
        EXPECT_NO_THROW(m.validate());
        EXPECT_LE(m.translation.cwiseAbs().maxCoeff(), 5.0);
        sum += m.rotation;
    }
    EXPECT_LT((sum / n).cwiseAbs().maxCoeff(), 0.02);
    const auto a = random_rigid_motion(77);
    const auto b = random_rigid_motion(77);
    EXPECT_EQ(a.rotation, b.rotation);
    EXPECT_EQ(a.translation, b.translation);
}

TEST(PerturbPositions, ZeroSigmaAndSeedReproducible) {
    const auto g = linear_chain("H", 4, 1.0);
    const auto z = perturb_positions(g, 0.0, 3);
    for (std::size_t i = 0; i < g.size(); ++i) {
        EXPECT_EQ(z[i].position, g[i].position);
    }
    const auto a = perturb_positions(g, 0.05, 3);
    const auto b = perturb_positions(g, 0.05, 3);
    for (std::size_t i = 0; i < g.size(); ++i) {
        EXPECT_EQ(a[i].position, b[i].position);
    }
    EXPECT_THROW(perturb_positions(g, -0.1, 0), ValidationError);
}

TEST(PerturbPositions, DisplacementRms) {
    const auto g = linear_chain("H", 4, 1.0);
    real_t s2 = 0.0;
    const int n = 10000;
    for (int s = 0; s < n; ++s) {
        const auto p = perturb_positions(g, 0.05, static_cast<std::uint64_t>(s));
        for (std::size_t i = 0; i < g.size(); ++i) {
            s2 += (p[i].position - g[i].position).squaredNorm();
        }
    }
    const real_t rms = std::sqrt(s2 / (n * 4.0));
    EXPECT_NEAR(rms, 0.05 * std::sqrt(3.0), 0.02 * 0.05 * std::sqrt(3.0));
}

TEST(NeighborGraph, Examples) {
    const MolecularGeometry two({{"H", Vec3::Zero()}, {"H", Vec3(6, 0, 0)}});
    EXPECT_TRUE(neighbor_graph(two, 5.0).empty());
    const auto chain = linear_chain("H", 4, 1.0);
    using E = std::vector<std::pair<std::size_t, std::size_t>>;
    EXPECT_EQ(neighbor_graph(chain, 1.5), (E{{0, 1}, {1, 2}, {2, 3}}));
    EXPECT_EQ(neighbor_graph(chain, 2.5), (E{{0, 1}, {0, 2}, {1, 2}, {1, 3}, {2, 3}}));
    EXPECT_THROW(neighbor_graph(chain, 0.0), ValidationError);
}

TEST(Features, IsolatedAtomIsZero) {
    const MolecularGeometry g({{"H", Vec3::Zero()}, {"H", Vec3(10, 0, 0)}});
    const ElementVocabulary vocab({"H"});
    for (auto v : invariant_features(g, 0, kSmallFeatures, vocab)) {
        EXPECT_EQ(v, 0.0);
    }
}

TEST(Features, LengthAndVocabularyOrder) {
    const ElementVocabulary vocab({"O", "H", "Li"});
    EXPECT_EQ(vocab.symbols(), (std::vector<std::string>{"H", "Li", "O"}));
    FeatureConfig cfg;
    EXPECT_EQ(feature_length(cfg, vocab), 3U * 8 + 6U * 4 * 8);
    cfg.include_three_body = false;
    EXPECT_EQ(feature_length(cfg, vocab), 24U);
    EXPECT_THROW(static_cast<void>(vocab.index_of("C")), ValidationError);
}

TEST(Features, InvariantUnderRigidMotions) {
    std::mt19937_64 rng(5);
    const ElementVocabulary vocab({"H", "Li"});
    for (std::uint64_t s = 0; s < 100; ++s) {
        const auto g = random_cluster(5, rng, {"H", "Li"});
        const auto moved = apply_rigid_motion(g, random_rigid_motion(s));
        for (std::size_t i = 0; i < g.size(); ++i) {
            EXPECT_LT(max_diff(invariant_features(g, i, kSmallFeatures, vocab),
                               invariant_features(moved, i, kSmallFeatures, vocab)),
                      1e-12);
        }
    }
}

TEST(Features, PermutationEquivariant) {
    std::mt19937_64 rng(6);
    const ElementVocabulary vocab({"H", "Li"});
    const auto g = random_cluster(6, rng, {"H", "Li"});
    std::vector<std::size_t> perm{3, 0, 5, 1, 4, 2};
    std::vector<Atom> atoms;
    for (auto p : perm) {
        atoms.push_back(g[p]);
    }
    const MolecularGeometry relabeled(std::move(atoms));
    for (std::size_t i = 0; i < perm.size(); ++i) {
        EXPECT_LT(max_diff(invariant_features(relabeled, i, kSmallFeatures, vocab),
                           invariant_features(g, perm[i], kSmallFeatures, vocab)),
                  1e-13);
    }
}

TEST(Features, ThreeBodyResolvesEqualDistanceMultisets) {
    // Tetrahedra with edge multiset {1,1,1,1.3,1.3,1.3}: a triangular pyramid
    // (unit base, apex at 1.3) and a star (unit spokes, 1.3 rim).
    const real_t a = 1.0;
    const real_t b = 1.3;
    const real_t rb = a / std::sqrt(3.0);
    const real_t rs = b / std::sqrt(3.0);
    auto ring = [](real_t r, real_t z) {
        std::vector<Atom> out;
        for (int k = 0; k < 3; ++k) {
            const real_t phi = 2.0 * kPi * k / 3.0;
            out.push_back({"H", Vec3(r * std::cos(phi), r * std::sin(phi), z)});
        }
        return out;
    };
    auto pyr = ring(rb, 0.0);
    pyr.push_back({"H", Vec3(0, 0, std::sqrt(b * b - rb * rb))});
    auto star = ring(rs, 0.0);
    star.push_back({"H", Vec3(0, 0, std::sqrt(a * a - rs * rs))});
    const MolecularGeometry gp(pyr);
    const MolecularGeometry gs(star);
    std::vector<real_t> dp;
    std::vector<real_t> ds;
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = i + 1; j < 4; ++j) {
            dp.push_back(gp.distance(i, j));
            ds.push_back(gs.distance(i, j));
        }
    }
    std::sort(dp.begin(), dp.end());
    std::sort(ds.begin(), ds.end());
    for (std::size_t k = 0; k < dp.size(); ++k) {
        ASSERT_NEAR(dp[k], ds[k], 1e-12);
    }
    const ElementVocabulary vocab({"H"});
    auto total = [&](const MolecularGeometry &g, const FeatureConfig &cfg) {
        std::vector<real_t> s(feature_length(cfg, vocab), 0.0);
        for (std::size_t i = 0; i < g.size(); ++i) {
            const auto f = invariant_features(g, i, cfg, vocab);
            for (std::size_t k = 0; k < s.size(); ++k) {
                s[k] += f[k];
            }
        }
        return s;
    };
    FeatureConfig cfg = kSmallFeatures;
    cfg.include_three_body = false;
    // The summed two-body block sees only the distance multiset.
    EXPECT_LT(max_diff(total(gp, cfg), total(gs, cfg)), 1e-12);
    cfg.include_three_body = true;
    EXPECT_GT(max_diff(total(gp, cfg), total(gs, cfg)), 1e-3);
}

TEST(Features, ThreeBodySeesAnglesAtFixedRadialShell) {
    const FeatureConfig cfg{1.2, 4, 0.0, true, 3};
    const ElementVocabulary vocab({"H"});
    auto bent = [](real_t angle) {
        return MolecularGeometry({{"H", Vec3::Zero()},
                                  {"H", Vec3(1, 0, 0)},
                                  {"H", Vec3(std::cos(angle), std::sin(angle), 0)}});
    };
    const auto f90 = invariant_features(bent(kPi / 2), 0, cfg, vocab);
    const auto f120 = invariant_features(bent(2 * kPi / 3), 0, cfg, vocab);
    for (std::size_t k = 0; k < cfg.n_radial; ++k) {
        EXPECT_NEAR(f90[k], f120[k], 1e-14);
    }
    EXPECT_GT(max_diff(f90, f120), 1e-3);
}

TEST(Features, SmoothAtCutoff) {
    const FeatureConfig cfg{2.0, 4, 0.0, false, 1};
    const ElementVocabulary vocab({"H"});
    auto at = [&](real_t r) {
        return invariant_features(MolecularGeometry({{"H", Vec3::Zero()}, {"H", Vec3(r, 0, 0)}}), 0,
                                  cfg, vocab);
    };
    real_t peak = 0.0;
    for (real_t r = 0.1; r < 2.0; r += 0.01) {
        for (auto v : at(r)) {
            peak = std::max(peak, v);
        }
    }
    for (auto v : at(2.0 - 1e-6)) {
        EXPECT_LT(v, 1e-8 * peak);
    }
    for (auto v : at(2.0)) {
        EXPECT_EQ(v, 0.0);
    }
}

TEST(ChainModel, TermIdenticalUnderRigidMotions) {
    const auto g = perturb_positions(linear_chain("H", 4, 1.0), 0.05, 1);
    const auto h = build_chain_model(g, {});
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto hm = build_chain_model(apply_rigid_motion(g, random_rigid_motion(s)), {});
        ASSERT_EQ(hm.terms().size(), h.terms().size());
        for (std::size_t k = 0; k < h.terms().size(); ++k) {
            EXPECT_EQ(hm.terms()[k].factors, h.terms()[k].factors);
            EXPECT_NEAR(hm.terms()[k].coefficient, h.terms()[k].coefficient, 1e-12);
        }
    }
}

TEST(Xyz, RoundTripAndErrors) {
    const auto g = perturb_positions(linear_chain("Li", 3, 1.6), 0.1, 2);
    const auto back = io::parse_xyz(io::format_xyz(g, "c"));
    for (std::size_t i = 0; i < g.size(); ++i) {
        EXPECT_EQ(back[i].element, "Li");
        EXPECT_EQ(back[i].position, g[i].position);
    }
    EXPECT_THROW(io::parse_xyz("x\n"), ConfigError);
    EXPECT_THROW(io::parse_xyz("2\nc\nH 0 0 0\n"), ConfigError);
    EXPECT_THROW(io::parse_xyz("1\nc\nH 0 zero 0\n"), ConfigError);
}
