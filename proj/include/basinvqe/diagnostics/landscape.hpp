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
#include <vector>

#include "../circuit.hpp"
#include "../common.hpp"
#include "../hamiltonian.hpp"
#include "csv.hpp"

namespace basinvqe::diagnostics {

struct LandscapePoint {
    real_t a = 0.0;
    real_t b = 0.0;
    real_t energy = 0.0;
};

/**
 * Energies on theta_center + a dir1 + b dir2 with `resolution` points per
 * axis (odd, so the centre is sampled) spanning [-half_a, half_a] x
 * [-half_b, half_b]. Rows are a-major.
 */
inline std::vector<LandscapePoint> landscape_grid(const AnsatzSpec &spec,
                                                  const ParameterVector &center,
                                                  const std::vector<real_t> &dir1,
                                                  const std::vector<real_t> &dir2, real_t half_a,
                                                  real_t half_b, std::size_t resolution,
                                                  const QubitHamiltonian &h, unsigned workers = 1) {
    spec.check(center);
    if (dir1.size() != center.size() || dir2.size() != center.size()) {
        throw ValidationError("landscape_grid: direction length mismatch");
    }
    real_t n1 = 0.0;
    real_t n2 = 0.0;
    real_t dot = 0.0;
    for (std::size_t i = 0; i < dir1.size(); ++i) {
        n1 += dir1[i] * dir1[i];
        n2 += dir2[i] * dir2[i];
        dot += dir1[i] * dir2[i];
    }
    if (std::abs(n1 - 1.0) > 1e-8 || std::abs(n2 - 1.0) > 1e-8) {
        throw ValidationError("landscape_grid: directions must be unit norm");
    }
    if (std::abs(dot) > 1e-8) {
        throw ValidationError("landscape_grid: directions must be orthogonal");
    }
    if (resolution == 0 || resolution % 2 == 0) {
        throw ValidationError("landscape_grid: resolution must be odd");
    }
    const auto k = static_cast<real_t>(resolution / 2);
    auto coord = [&](std::size_t i, real_t half) {
        return resolution == 1 ? 0.0 : half * (static_cast<real_t>(i) - k) / k;
    };
    std::vector<LandscapePoint> pts(resolution * resolution);
    parallel_for(pts.size(), workers, [&](std::size_t idx) {
        const real_t a = coord(idx / resolution, half_a);
        const real_t b = coord(idx % resolution, half_b);
        ParameterVector t = center;
        for (std::size_t j = 0; j < t.size(); ++j) {
            t[j] += a * dir1[j] + b * dir2[j];
        }
        pts[idx] = {a, b, energy(spec, t, h)};
    });
    return pts;
}

inline Table landscape_table(const std::vector<LandscapePoint> &pts) {
    Table t({"a", "b", "E"});
    for (const auto &p : pts) {
        t.add_row({format_real(p.a), format_real(p.b), format_real(p.energy)});
    }
    return t;
}

} // namespace basinvqe::diagnostics
