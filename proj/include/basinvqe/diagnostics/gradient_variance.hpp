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
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "../circuit.hpp"
#include "../common.hpp"
#include "../hamiltonian.hpp"
#include "../vqe.hpp"
#include "csv.hpp"

namespace basinvqe::diagnostics {

/// Half-Pauli generator A = P_q / 2 of one rotation angle.
struct GeneratorSpec {
    std::size_t qubit = 0;
    Pauli pauli = Pauli::Y;
};

/// Generator of parameter k under the ansatz layout (y slot: Y, z slot: Z).
inline GeneratorSpec generator_of(const AnsatzSpec &spec, std::size_t k) {
    const auto loc = spec.locate(k);
    return {loc.qubit, loc.slot == AngleSlot::y ? Pauli::Y : Pauli::Z};
}

inline constexpr std::size_t kHaarMaxQubits = 6;

/**
 * Haar-ensemble variance of dE/dtheta: with G = i[A, H] and normalized trace
 * tr_(X) = Tr(X) / d, returns (tr_(G^2) - tr_(G)^2) / (d + 1).
 */
inline real_t haar_variance_prediction(const QubitHamiltonian &h, const GeneratorSpec &gen,
                                       std::size_t d) {
    const std::size_t n = h.n_qubits();
    if (n > kHaarMaxQubits) {
        throw ValidationError("haar_variance_prediction: dense trace limited to " +
                              std::to_string(kHaarMaxQubits) + " qubits");
    }
    if (d != (std::size_t{1} << n)) {
        throw ValidationError("haar_variance_prediction: d must equal 2^n_qubits");
    }
    if (gen.qubit >= n) {
        throw ValidationError("haar_variance_prediction: invalid generator");
    }
    const Eigen::MatrixXcd H = dense_matrix(h);
    std::map<std::size_t, Pauli> f{{gen.qubit, gen.pauli}};
    const QubitHamiltonian a_op(n, {PauliTerm{0.5, f}});
    const Eigen::MatrixXcd A = dense_matrix(a_op);
    const Eigen::MatrixXcd G = complex_t(0.0, 1.0) * (A * H - H * A);
    const auto dd = static_cast<real_t>(d);
    const complex_t tr = G.trace() / dd;
    if (std::abs(tr) > 1e-10 * (1.0 + h.norm_bound())) {
        throw NumericalError("haar_variance_prediction: gradient operator is not traceless");
    }
    const real_t tr2 = (G * G).trace().real() / dd;
    return (tr2 - std::norm(tr)) / (dd + 1.0);
}

/// Variance of an i.i.d. sample and the standard error of that estimate.
struct SampleVariance {
    real_t mean = 0.0;
    real_t variance = 0.0;
    real_t standard_error = 0.0;
    std::size_t n = 0;
};

inline SampleVariance sample_variance(const std::vector<real_t> &x) {
    if (x.size() < 2) {
        throw ValidationError("sample variance needs at least two samples");
    }
    SampleVariance s;
    s.n = x.size();
    const auto n = static_cast<real_t>(x.size());
    for (real_t v : x) {
        s.mean += v;
    }
    s.mean /= n;
    real_t m2 = 0.0;
    real_t m4 = 0.0;
    for (real_t v : x) {
        const real_t d2 = (v - s.mean) * (v - s.mean);
        m2 += d2;
        m4 += d2 * d2;
    }
    s.variance = m2 / (n - 1.0);
    const real_t pop = m2 / n;
    s.standard_error = std::sqrt(std::max(0.0, m4 / n - pop * pop) / n);
    return s;
}

/// theta* + N(0, diag(variances)); a single entry means isotropic.
struct BasinEnsemble {
    ParameterVector center;
    std::vector<real_t> variances{1e-4};

    [[nodiscard]] real_t variance(std::size_t k) const {
        return variances.size() == 1 ? variances[0] : variances.at(k);
    }

    void validate() const {
        if (variances.size() != 1 && variances.size() != center.size()) {
            throw ValidationError("basin ensemble: covariance length mismatch");
        }
        for (real_t v : variances) {
            if (!(v >= 0.0)) {
                throw ValidationError("basin ensemble: variances must be non-negative");
            }
        }
    }
};

enum class EnsembleKind { uniform_random, basin };

inline std::string to_string(EnsembleKind k) {
    return k == EnsembleKind::uniform_random ? "uniform" : "basin";
}

struct VarianceScanConfig {
    std::vector<std::size_t> sizes;
    std::size_t depth = 4;
    std::size_t n_samples = 2000;
    std::uint64_t seed = 0;
    std::vector<EnsembleKind> ensembles{EnsembleKind::uniform_random, EnsembleKind::basin};
    std::function<QubitHamiltonian(std::size_t)> hamiltonian;
    /// Required for the basin ensemble.
    std::function<BasinEnsemble(const AnsatzSpec &, const QubitHamiltonian &)> basin;
    /// Parameter whose derivative is sampled; default the central index P / 2.
    std::function<std::size_t(const AnsatzSpec &)> parameter;
    unsigned workers = 1;
};

struct VarianceRow {
    std::size_t n_qubits = 0;
    EnsembleKind ensemble = EnsembleKind::uniform_random;
    std::size_t parameter = 0;
    real_t variance = 0.0;
    real_t standard_error = 0.0;
    real_t dimension = 0.0;
    /// Basin rows: Hessian diagonal kappa_k at the center and kappa_k^2 sigma_k^2.
    real_t curvature = std::nan("");
    real_t predicted = std::nan("");
};

/// Diagonal Hessian entry [E(t + pi e_k) - 2E(t) + E(t - pi e_k)] / 4.
inline real_t hessian_diagonal_entry(const AnsatzSpec &spec, const ParameterVector &theta,
                                     const QubitHamiltonian &h, std::size_t k) {
    ParameterVector t = theta;
    t[k] = theta[k] + 2.0 * kShift;
    const real_t ep = energy(spec, t, h);
    t[k] = theta[k] - 2.0 * kShift;
    const real_t em = energy(spec, t, h);
    return 0.25 * (ep - 2.0 * energy(spec, theta, h) + em);
}

/**
 * Empirical variance of one gradient entry under the uniform (-pi, pi] and
 * basin ensembles, per system size. Samples use seeds derived from
 * (seed, size, ensemble, sample), so results do not depend on workers.
 */
inline std::vector<VarianceRow> gradient_variance_scan(const VarianceScanConfig &cfg) {
    if (cfg.n_samples < 2) {
        throw ValidationError("gradient_variance_scan: n_samples must be at least 2");
    }
    if (!cfg.hamiltonian) {
        throw ValidationError("gradient_variance_scan: no Hamiltonian builder");
    }
    std::vector<VarianceRow> rows;
    for (std::size_t si = 0; si < cfg.sizes.size(); ++si) {
        const std::size_t n = cfg.sizes[si];
        const AnsatzSpec spec{n, cfg.depth};
        const QubitHamiltonian h = cfg.hamiltonian(n);
        const std::size_t k = cfg.parameter ? cfg.parameter(spec) : spec.n_params() / 2;
        if (k >= spec.n_params()) {
            throw ValidationError("gradient_variance_scan: parameter index out of range");
        }
        for (std::size_t ei = 0; ei < cfg.ensembles.size(); ++ei) {
            const EnsembleKind kind = cfg.ensembles[ei];
            std::optional<BasinEnsemble> basin;
            if (kind == EnsembleKind::basin) {
                if (!cfg.basin) {
                    throw ValidationError("gradient_variance_scan: basin ensemble needs theta*");
                }
                basin = cfg.basin(spec, h);
                spec.check(basin->center);
                basin->validate();
            }
            const std::uint64_t stream =
                derive_seed(derive_seed(cfg.seed, si), static_cast<std::uint64_t>(kind));
            std::vector<real_t> g(cfg.n_samples);
            parallel_for(cfg.n_samples, cfg.workers, [&](std::size_t s) {
                const std::uint64_t sd = derive_seed(stream, s);
                ParameterVector theta;
                if (kind == EnsembleKind::uniform_random) {
                    theta = uniform_random_angles(spec.n_params(), sd);
                } else {
                    std::mt19937_64 rng(sd);
                    std::normal_distribution<real_t> nd(0.0, 1.0);
                    theta = basin->center;
                    for (std::size_t j = 0; j < theta.size(); ++j) {
                        theta[j] += std::sqrt(basin->variance(j)) * nd(rng);
                    }
                }
                g[s] = gradient_entry(spec, theta, h, k);
            });
            const auto sv = sample_variance(g);
            VarianceRow row;
            row.n_qubits = n;
            row.ensemble = kind;
            row.parameter = k;
            row.variance = sv.variance;
            row.standard_error = sv.standard_error;
            row.dimension = std::ldexp(1.0, static_cast<int>(n));
            if (basin) {
                row.curvature = hessian_diagonal_entry(spec, basin->center, h, k);
                row.predicted = row.curvature * row.curvature * basin->variance(k);
            }
            rows.push_back(row);
        }
    }
    return rows;
}

/// Least-squares slope of log2(variance) against N over rows of one ensemble.
inline real_t log2_variance_slope(const std::vector<VarianceRow> &rows, EnsembleKind kind) {
    std::vector<real_t> xs;
    std::vector<real_t> ys;
    for (const auto &r : rows) {
        if (r.ensemble == kind && r.variance > 0.0) {
            xs.push_back(static_cast<real_t>(r.n_qubits));
            ys.push_back(std::log2(r.variance));
        }
    }
    if (xs.size() < 2) {
        throw ValidationError("slope fit needs at least two sizes");
    }
    const auto n = static_cast<real_t>(xs.size());
    real_t mx = 0.0;
    real_t my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    real_t sxy = 0.0;
    real_t sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    return sxy / sxx;
}

inline Table variance_table(const std::vector<VarianceRow> &rows) {
    Table t({"N", "ensemble", "parameter", "var", "stderr", "d", "kappa", "predicted"});
    for (const auto &r : rows) {
        t.add_row({std::to_string(r.n_qubits), to_string(r.ensemble), std::to_string(r.parameter),
                   format_real(r.variance), format_real(r.standard_error),
                   format_real(r.dimension), format_real(r.curvature), format_real(r.predicted)});
    }
    return t;
}

} // namespace basinvqe::diagnostics
