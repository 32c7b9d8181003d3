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
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "../circuit.hpp"
#include "../common.hpp"
#include "../hamiltonian.hpp"
#include "gradient_variance.hpp"

namespace basinvqe::diagnostics {

inline constexpr std::size_t kHessianMaxParams = 200;

struct HessianSpectrum {
    std::vector<real_t> eigenvalues; // ascending, Ha / rad^2
    std::size_t n_negative = 0;      // below -tol_neg
    std::size_t n_near_zero = 0;     // within [-tol_zero, tol_zero]
    real_t tol_neg = 1e-6;
    real_t tol_zero = 1e-6;
};

inline HessianSpectrum spectrum_of(const Eigen::MatrixXd &hess, real_t tol_neg, real_t tol_zero) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hess, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw NumericalError("Hessian eigensolver failed");
    }
    HessianSpectrum s;
    s.tol_neg = tol_neg;
    s.tol_zero = tol_zero;
    const auto &ev = es.eigenvalues();
    s.eigenvalues.assign(ev.data(), ev.data() + ev.size());
    for (real_t e : s.eigenvalues) {
        if (e < -tol_neg) {
            ++s.n_negative;
        }
        if (std::abs(e) <= tol_zero) {
            ++s.n_near_zero;
        }
    }
    return s;
}

/// Eigenvalues of the exact shift-rule Hessian at theta0.
inline HessianSpectrum hessian_spectrum(const AnsatzSpec &spec, const ParameterVector &theta0,
                                        const QubitHamiltonian &h, real_t tol_neg = 1e-6,
                                        real_t tol_zero = 1e-6, unsigned workers = 1) {
    if (spec.n_params() > kHessianMaxParams) {
        throw ValidationError("hessian_spectrum: " + std::to_string(spec.n_params()) +
                              " parameters exceed the cost guard of " +
                              std::to_string(kHessianMaxParams));
    }
    return spectrum_of(hessian(spec, theta0, h, workers), tol_neg, tol_zero);
}

struct CurvatureCheckConfig {
    std::size_t n_samples = 200;
    std::uint64_t seed = 0;
    real_t tol_zero = 1e-6;
    /// Stationarity required of theta*.
    real_t gradient_tol = 1e-6;
    real_t slack = 2.0;
    real_t sigma_max = 0.05;
    unsigned workers = 1;
};

struct CurvatureReport {
    real_t kappa_min = 0.0; // smallest Hessian eigenvalue above tol_zero
    real_t kappa_max = 0.0;
    std::size_t n_redundant = 0;
    real_t sigma_min2 = 0.0; // lambda_min(Sigma)
    real_t sigma_max2 = 0.0;
    real_t lower = 0.0;      // kappa_min^2 lambda_min(Sigma) / slack
    real_t upper = 0.0;      // slack kappa_max^2 lambda_max(Sigma)
    real_t variance = 0.0;   // empirical Var(u . grad E)
    real_t standard_error = 0.0;
    real_t quadratic_prediction = 0.0; // u^T H Sigma H u
    bool redundant_direction = false;
    bool passed = false;
};

/**
 * Samples theta0 = theta* + N(0, Sigma) and compares Var(u . grad E(theta0))
 * with the curvature sandwich kappa_m^2 lambda_min(Sigma) <= Var <=
 * kappa_M^2 lambda_max(Sigma), each side relaxed by cfg.slack. Eigenvalues
 * at or below tol_zero span the redundant subspace. A direction u inside
 * that subspace is checked against Var <= 10 tol_zero^2 lambda_max(Sigma)
 * instead. Sigma is diagonal (one entry: isotropic).
 */
inline CurvatureReport curvature_bounds_check(const AnsatzSpec &spec, const ParameterVector &theta_star,
                                              const std::vector<real_t> &sigma_diag,
                                              const QubitHamiltonian &h, const std::vector<real_t> &u,
                                              const CurvatureCheckConfig &cfg = {}) {
    spec.check(theta_star);
    const std::size_t p = spec.n_params();
    if (u.size() != p) {
        throw ValidationError("curvature_bounds_check: direction has wrong length");
    }
    BasinEnsemble ens{theta_star, sigma_diag};
    ens.validate();
    real_t unorm = 0.0;
    for (real_t x : u) {
        unorm += x * x;
    }
    if (std::abs(std::sqrt(unorm) - 1.0) > 1e-8) {
        throw ValidationError("curvature_bounds_check: direction must be unit norm");
    }
    CurvatureReport rep;
    rep.sigma_min2 = std::numeric_limits<real_t>::infinity();
    for (std::size_t j = 0; j < p; ++j) {
        rep.sigma_min2 = std::min(rep.sigma_min2, ens.variance(j));
        rep.sigma_max2 = std::max(rep.sigma_max2, ens.variance(j));
    }
    if (std::sqrt(rep.sigma_max2) > cfg.sigma_max) {
        throw ValidationError("curvature_bounds_check: Sigma exceeds the quadratic-region limit");
    }
    const auto g0 = gradient(spec, theta_star, h, cfg.workers);
    for (real_t g : g0) {
        if (std::abs(g) >= cfg.gradient_tol) {
            throw ValidationError("curvature_bounds_check: theta* is not stationary");
        }
    }
    const Eigen::MatrixXd hs = hessian(spec, theta_star, h, cfg.workers);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hs);
    if (es.info() != Eigen::Success) {
        throw NumericalError("curvature_bounds_check: eigensolver failed");
    }
    const Eigen::Map<const Eigen::VectorXd> uv(u.data(), static_cast<Eigen::Index>(p));
    rep.kappa_min = std::numeric_limits<real_t>::infinity();
    real_t nonred_weight = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const real_t e = es.eigenvalues()(i);
        if (e > cfg.tol_zero) {
            rep.kappa_min = std::min(rep.kappa_min, e);
            rep.kappa_max = std::max(rep.kappa_max, e);
            const real_t c = es.eigenvectors().col(i).dot(uv);
            nonred_weight += c * c;
        } else {
            ++rep.n_redundant;
        }
    }
    if (rep.n_redundant == p) {
        throw ValidationError("curvature_bounds_check: every Hessian direction is redundant");
    }
    if (nonred_weight < 1e-12) {
        rep.redundant_direction = true;
    } else if (nonred_weight < 1.0 - 1e-8) {
        throw ValidationError(
            "curvature_bounds_check: direction mixes redundant and non-redundant subspaces");
    }
    Eigen::VectorXd sig(static_cast<Eigen::Index>(p));
    for (std::size_t j = 0; j < p; ++j) {
        sig(static_cast<Eigen::Index>(j)) = ens.variance(j);
    }
    const Eigen::VectorXd hu = hs * uv;
    rep.quadratic_prediction = hu.dot(sig.cwiseProduct(hu));

    const std::size_t n = cfg.n_samples;
    if (rep.sigma_max2 == 0.0 || n < 2) {
        rep.variance = 0.0;
    } else {
        std::vector<real_t> proj(n);
        parallel_for(n, cfg.workers, [&](std::size_t s) {
            std::mt19937_64 rng(derive_seed(cfg.seed, s));
            std::normal_distribution<real_t> nd(0.0, 1.0);
            ParameterVector t = theta_star;
            for (std::size_t j = 0; j < p; ++j) {
                t[j] += std::sqrt(ens.variance(j)) * nd(rng);
            }
            real_t acc = 0.0;
            for (std::size_t j = 0; j < p; ++j) {
                if (u[j] != 0.0) {
                    acc += u[j] * gradient_entry(spec, t, h, j);
                }
            }
            proj[s] = acc;
        });
        const auto sv = sample_variance(proj);
        rep.variance = sv.variance;
        rep.standard_error = sv.standard_error;
    }
    if (rep.redundant_direction) {
        rep.lower = 0.0;
        rep.upper = 10.0 * cfg.tol_zero * cfg.tol_zero * rep.sigma_max2;
        rep.passed = rep.variance <= rep.upper;
    } else {
        rep.lower = rep.kappa_min * rep.kappa_min * rep.sigma_min2 / cfg.slack;
        rep.upper = cfg.slack * rep.kappa_max * rep.kappa_max * rep.sigma_max2;
        rep.passed = rep.variance >= rep.lower && rep.variance <= rep.upper;
    }
    return rep;
}

} // namespace basinvqe::diagnostics
