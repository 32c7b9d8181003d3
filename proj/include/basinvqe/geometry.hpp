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

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "common.hpp"

namespace basinvqe {

using Vec3 = Eigen::Vector3d;

struct Atom {
    std::string element;
    Vec3 position; // Angstrom
};

/// Ordered list of atoms. Positions in Angstrom.
class MolecularGeometry {
  public:
    static constexpr real_t kMinSeparation = 1e-6;

    MolecularGeometry() = default;
    explicit MolecularGeometry(std::vector<Atom> atoms) : atoms_(std::move(atoms)) { validate(); }

    [[nodiscard]] std::size_t size() const { return atoms_.size(); }
    [[nodiscard]] const std::vector<Atom> &atoms() const { return atoms_; }
    [[nodiscard]] const Atom &operator[](std::size_t i) const { return atoms_[i]; }

    [[nodiscard]] real_t distance(std::size_t i, std::size_t j) const {
        return (atoms_[i].position - atoms_[j].position).norm();
    }

    /// Throws ValidationError on an empty list, non-finite coordinates or
    /// coincident atoms.
    void validate() const {
        if (atoms_.empty()) {
            throw ValidationError("geometry has no atoms");
        }
        for (const auto &a : atoms_) {
            if (!a.position.allFinite()) {
                throw ValidationError("geometry has non-finite coordinates");
            }
        }
        for (std::size_t i = 0; i < atoms_.size(); ++i) {
            for (std::size_t j = i + 1; j < atoms_.size(); ++j) {
                if (distance(i, j) < kMinSeparation) {
                    throw ValidationError("atoms " + std::to_string(i) + " and " +
                                          std::to_string(j) + " coincide");
                }
            }
        }
    }

  private:
    std::vector<Atom> atoms_;
};

/// Proper rigid motion r -> R r + t.
struct RigidMotion {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Vec3 translation = Vec3::Zero();

    void validate(real_t tol = 1e-12) const {
        const Eigen::Matrix3d err = rotation.transpose() * rotation - Eigen::Matrix3d::Identity();
        if (err.cwiseAbs().maxCoeff() > tol || std::abs(rotation.determinant() - 1.0) > tol) {
            throw ValidationError("rigid motion rotation is not in SO(3)");
        }
        if (!translation.allFinite()) {
            throw ValidationError("rigid motion translation is not finite");
        }
    }
};

inline MolecularGeometry apply_rigid_motion(const MolecularGeometry &geom, const RigidMotion &g) {
    g.validate();
    std::vector<Atom> out;
    out.reserve(geom.size());
    for (const auto &a : geom.atoms()) {
        out.push_back({a.element, g.rotation * a.position + g.translation});
    }
    return MolecularGeometry(std::move(out));
}

/// Uniform rotation on SO(3) from a normalized Gaussian quaternion, and a
/// translation uniform in [-5, 5]^3 Angstrom.
inline RigidMotion random_rigid_motion(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<real_t> normal(0.0, 1.0);
    std::uniform_real_distribution<real_t> shift(-5.0, 5.0);
    Eigen::Quaterniond q;
    do {
        q = Eigen::Quaterniond(normal(rng), normal(rng), normal(rng), normal(rng));
    } while (q.norm() < 1e-8);
    q.normalize();
    RigidMotion g;
    g.rotation = q.toRotationMatrix();
    g.translation = Vec3(shift(rng), shift(rng), shift(rng));
    return g;
}

/// Adds i.i.d. N(0, sigma_pos^2) noise to every coordinate. Draws that put two
/// atoms closer than the minimum separation are redrawn (up to 100 times).
inline MolecularGeometry perturb_positions(const MolecularGeometry &geom, real_t sigma_pos,
                                           std::uint64_t seed) {
    if (!(sigma_pos >= 0.0)) {
        throw ValidationError("sigma_pos must be non-negative");
    }
    if (sigma_pos == 0.0) {
        return geom;
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<real_t> normal(0.0, sigma_pos);
    for (int attempt = 0; attempt < 100; ++attempt) {
        std::vector<Atom> atoms = geom.atoms();
        for (auto &a : atoms) {
            a.position += Vec3(normal(rng), normal(rng), normal(rng));
        }
        try {
            return MolecularGeometry(std::move(atoms));
        } catch (const ValidationError &) {
            continue;
        }
    }
    throw ValidationError("perturb_positions: could not draw a valid geometry in 100 attempts");
}

/// Undirected edges with r_ij < r_cut, i < j, in lexicographic order.
inline std::vector<std::pair<std::size_t, std::size_t>> neighbor_graph(const MolecularGeometry &geom,
                                                                       real_t r_cut) {
    if (!(r_cut > 0.0)) {
        throw ValidationError("r_cut must be positive");
    }
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i < geom.size(); ++i) {
        for (std::size_t j = i + 1; j < geom.size(); ++j) {
            if (geom.distance(i, j) < r_cut) {
                edges.emplace_back(i, j);
            }
        }
    }
    return edges;
}

/// Linear chain along x with uniform spacing (Angstrom).
inline MolecularGeometry linear_chain(const std::string &element, std::size_t n_atoms,
                                      real_t spacing) {
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < n_atoms; ++i) {
        atoms.push_back({element, Vec3(spacing * static_cast<real_t>(i), 0.0, 0.0)});
    }
    return MolecularGeometry(std::move(atoms));
}

inline int atomic_number(const std::string &symbol) {
    static const std::map<std::string, int> table{
        {"H", 1},   {"He", 2},  {"Li", 3},  {"Be", 4},  {"B", 5},   {"C", 6},   {"N", 7},
        {"O", 8},   {"F", 9},   {"Ne", 10}, {"Na", 11}, {"Mg", 12}, {"Al", 13}, {"Si", 14},
        {"P", 15},  {"S", 16},  {"Cl", 17}, {"Ar", 18}, {"K", 19},  {"Ca", 20}};
    const auto it = table.find(symbol);
    if (it == table.end()) {
        throw ValidationError("unknown element symbol '" + symbol + "'");
    }
    return it->second;
}

} // namespace basinvqe
