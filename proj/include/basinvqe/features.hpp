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
#include <string>
#include <vector>

#include "common.hpp"
#include "geometry.hpp"

namespace basinvqe {

struct FeatureConfig {
    real_t r_cut = 5.0;        // Angstrom
    std::size_t n_radial = 8;
    real_t radial_width = 0.0; // Angstrom; <= 0 selects r_cut / n_radial
    bool include_three_body = true;
    std::size_t n_angular = 4; // Chebyshev orders T_0 .. T_{n_angular-1}

    void validate() const {
        if (!(r_cut > 0.0)) {
            throw ValidationError("feature config: r_cut must be positive");
        }
        if (n_radial < 1) {
            throw ValidationError("feature config: n_radial must be >= 1");
        }
        if (include_three_body && n_angular < 1) {
            throw ValidationError("feature config: n_angular must be >= 1");
        }
    }

    [[nodiscard]] real_t width() const {
        return radial_width > 0.0 ? radial_width : r_cut / static_cast<real_t>(n_radial);
    }

    [[nodiscard]] real_t center(std::size_t m) const {
        return r_cut * static_cast<real_t>(m + 1) / static_cast<real_t>(n_radial);
    }
};

/// Element symbols ordered by atomic number.
class ElementVocabulary {
  public:
    ElementVocabulary() = default;
    explicit ElementVocabulary(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
        std::sort(symbols_.begin(), symbols_.end(), [](const auto &a, const auto &b) {
            return atomic_number(a) < atomic_number(b);
        });
        symbols_.erase(std::unique(symbols_.begin(), symbols_.end()), symbols_.end());
    }

    static ElementVocabulary from_geometries(const std::vector<MolecularGeometry> &geoms) {
        std::vector<std::string> s;
        for (const auto &g : geoms) {
            for (const auto &a : g.atoms()) {
                s.push_back(a.element);
            }
        }
        return ElementVocabulary(std::move(s));
    }

    [[nodiscard]] std::size_t size() const { return symbols_.size(); }
    [[nodiscard]] const std::vector<std::string> &symbols() const { return symbols_; }

    [[nodiscard]] std::size_t index_of(const std::string &el) const {
        const auto it = std::find(symbols_.begin(), symbols_.end(), el);
        if (it == symbols_.end()) {
            throw ValidationError("element '" + el + "' is not in the model vocabulary");
        }
        return static_cast<std::size_t>(it - symbols_.begin());
    }

    /// Number of unordered element pairs (a <= b).
    [[nodiscard]] std::size_t n_pairs() const { return size() * (size() + 1) / 2; }

    [[nodiscard]] std::size_t pair_index(std::size_t a, std::size_t b) const {
        if (a > b) {
            std::swap(a, b);
        }
        // rows a = 0.., columns b >= a
        return a * size() - a * (a - 1) / 2 + (b - a);
    }

  private:
    std::vector<std::string> symbols_;
};

/// Smooth cutoff 1/2 (cos(pi r / r_cut) + 1) inside r_cut, 0 outside.
inline real_t cutoff_factor(real_t r, real_t r_cut) {
    return r < r_cut ? 0.5 * (std::cos(kPi * r / r_cut) + 1.0) : 0.0;
}

/// phi_m(r): Gaussian radial basis times the cutoff factor.
inline std::vector<real_t> radial_basis(real_t r, const FeatureConfig &cfg) {
    std::vector<real_t> phi(cfg.n_radial, 0.0);
    const real_t fc = cutoff_factor(r, cfg.r_cut);
    if (fc == 0.0) {
        return phi;
    }
    const real_t w = cfg.width();
    for (std::size_t m = 0; m < cfg.n_radial; ++m) {
        const real_t d = r - cfg.center(m);
        phi[m] = std::exp(-d * d / (2.0 * w * w)) * fc;
    }
    return phi;
}

inline std::size_t feature_length(const FeatureConfig &cfg, const ElementVocabulary &vocab) {
    std::size_t n = vocab.size() * cfg.n_radial;
    if (cfg.include_three_body) {
        n += vocab.n_pairs() * cfg.n_angular * cfg.n_radial;
    }
    return n;
}

/**
 * Rotation- and translation-invariant descriptor of one atom's neighborhood.
 *
 * Two-body block: for each neighbor element e, sum_j phi_m(r_ij).
 * Three-body block: for each unordered neighbor-element pair and each
 * neighbor pair j < k, sum T_p(cos angle_jik) phi_m(r_ij) phi_m(r_ik).
 * Layout: [2-body: element-major, radial-minor]
 *         [3-body: pair-major, angular, radial-minor].
 */
inline std::vector<real_t> invariant_features(const MolecularGeometry &geom, std::size_t atom,
                                              const FeatureConfig &cfg,
                                              const ElementVocabulary &vocab) {
    cfg.validate();
    if (atom >= geom.size()) {
        throw ValidationError("invariant_features: atom index out of range");
    }
    std::vector<real_t> f(feature_length(cfg, vocab), 0.0);
    const std::size_t nr = cfg.n_radial;

    struct Neighbor {
        std::size_t element;
        Vec3 unit;
        std::vector<real_t> phi;
    };
    std::vector<Neighbor> nbrs;
    for (std::size_t j = 0; j < geom.size(); ++j) {
        if (j == atom) {
            continue;
        }
        const Vec3 d = geom[j].position - geom[atom].position;
        const real_t r = d.norm();
        if (r >= cfg.r_cut) {
            continue;
        }
        Neighbor nb{vocab.index_of(geom[j].element), d / r, radial_basis(r, cfg)};
        for (std::size_t m = 0; m < nr; ++m) {
            f[nb.element * nr + m] += nb.phi[m];
        }
        nbrs.push_back(std::move(nb));
    }
    if (!cfg.include_three_body) {
        return f;
    }
    const std::size_t offset = vocab.size() * nr;
    std::vector<real_t> cheb(cfg.n_angular);
    for (std::size_t a = 0; a < nbrs.size(); ++a) {
        for (std::size_t b = a + 1; b < nbrs.size(); ++b) {
            const real_t c = std::clamp(nbrs[a].unit.dot(nbrs[b].unit), -1.0, 1.0);
            cheb[0] = 1.0;
            if (cfg.n_angular > 1) {
                cheb[1] = c;
            }
            for (std::size_t p = 2; p < cfg.n_angular; ++p) {
                cheb[p] = 2.0 * c * cheb[p - 1] - cheb[p - 2];
            }
            const std::size_t pair = vocab.pair_index(nbrs[a].element, nbrs[b].element);
            for (std::size_t p = 0; p < cfg.n_angular; ++p) {
                for (std::size_t m = 0; m < nr; ++m) {
                    f[offset + (pair * cfg.n_angular + p) * nr + m] +=
                        cheb[p] * nbrs[a].phi[m] * nbrs[b].phi[m];
                }
            }
        }
    }
    return f;
}

} // namespace basinvqe
