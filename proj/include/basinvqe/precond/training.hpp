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
#include <memory>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "../circuit.hpp"
#include "../common.hpp"
#include "../geometry.hpp"
#include "../hamiltonian.hpp"
#include "../optim/adamw.hpp"
#include "model.hpp"

namespace basinvqe::precond {

struct TrainingExample {
    MolecularGeometry geometry;
    std::shared_ptr<const QubitHamiltonian> hamiltonian; // may be null
    ParameterVector target;
    real_t target_energy = 0.0;
    std::optional<real_t> exact_energy;
    bool suspect = false;
    std::optional<std::vector<std::vector<std::size_t>>> atom_qubit_map;

    [[nodiscard]] std::vector<std::vector<std::size_t>> qubit_map() const {
        return atom_qubit_map ? *atom_qubit_map : identity_atom_qubit_map(geometry.size());
    }
};

struct TrainingSet {
    std::vector<TrainingExample> examples;

    [[nodiscard]] std::size_t size() const { return examples.size(); }
    [[nodiscard]] bool empty() const { return examples.empty(); }

    /// Target lengths match spec; where a Hamiltonian is attached, the target
    /// reproduces target_energy within energy_tol.
    void validate(const AnsatzSpec &spec, real_t energy_tol = 1e-6) const {
        for (std::size_t i = 0; i < examples.size(); ++i) {
            const auto &ex = examples[i];
            if (ex.target.size() != spec.n_params()) {
                throw ValidationError("training example " + std::to_string(i) +
                                      ": target has wrong length");
            }
            if (!all_finite(ex.target)) {
                throw ValidationError("training example " + std::to_string(i) +
                                      ": non-finite target");
            }
            if (ex.hamiltonian) {
                const real_t e = energy(spec, ex.target, *ex.hamiltonian);
                if (std::abs(e - ex.target_energy) > energy_tol) {
                    throw ValidationError("training example " + std::to_string(i) +
                                          ": target energy mismatch");
                }
            }
        }
    }
};

enum class FidelityTerm { exact, off };

/// How the output layer is set before gradient training starts.
enum class ReadoutInit {
    keep,
    /// Ridge least squares of the output layer onto atanh(theta*/pi), hidden
    /// layers fixed.
    least_squares,
};

struct TrainConfig {
    real_t lambda_fidelity = 0.1;
    std::size_t epochs = 200;
    std::size_t batch_size = 8;
    optim::TrainOptimConfig optimizer;
    std::uint64_t seed = 0;
    FidelityTerm fidelity_term = FidelityTerm::exact;
    /// Empty: every parameter trains.
    std::vector<bool> trainable_mask;
    ReadoutInit readout_init = ReadoutInit::keep;
    real_t ridge = 1e-10;
    /// When true, optimizer.total_steps is replaced by epochs * batches.
    bool schedule_from_epochs = true;

    void validate() const {
        if (!(lambda_fidelity >= 0.0) || !std::isfinite(lambda_fidelity)) {
            throw ValidationError("lambda_fidelity must be finite and non-negative");
        }
        if (batch_size == 0) {
            throw ValidationError("batch_size must be positive");
        }
        if (!(ridge >= 0.0)) {
            throw ValidationError("ridge must be non-negative");
        }
    }
};

struct GaugeLossTerms {
    real_t anchor = 0.0;   // |theta - theta*|^2
    real_t fidelity = 0.0; // lambda (1 - F)
    [[nodiscard]] real_t total() const { return anchor + fidelity; }
};

inline GaugeLossTerms gauge_loss_terms(const ParameterVector &theta, const ParameterVector &target,
                                       const AnsatzSpec &spec, real_t lambda) {
    if (theta.size() != target.size()) {
        throw ValidationError("gauge_loss: length mismatch");
    }
    GaugeLossTerms t;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const real_t d = theta[i] - target[i];
        t.anchor += d * d;
    }
    // Identical angles prepare identical states: F = 1 without rounding.
    if (lambda != 0.0 && theta != target) {
        t.fidelity = lambda * std::max(0.0, 1.0 - fidelity(spec, theta, target));
    }
    return t;
}

/// |theta - theta*|^2 + lambda (1 - F(theta, theta*)).
inline real_t gauge_loss(const ParameterVector &theta, const ParameterVector &target,
                         const AnsatzSpec &spec, real_t lambda) {
    return gauge_loss_terms(theta, target, spec, lambda).total();
}

/**
 * dF/dtheta for F = |<psi(theta)|psi(theta*)>|^2. F is the expectation of a
 * projector, so the two-point shift rule is exact.
 */
inline std::vector<real_t> fidelity_gradient(const AnsatzSpec &spec, const ParameterVector &theta,
                                             const ParameterVector &target) {
    spec.check(theta);
    spec.check(target);
    const Statevector ref = prepare_state(spec, target);
    std::vector<real_t> g(theta.size());
    ParameterVector t = theta;
    for (std::size_t k = 0; k < theta.size(); ++k) {
        t[k] = theta[k] + kShift;
        const real_t fp = std::norm(inner_product(prepare_state(spec, t), ref));
        t[k] = theta[k] - kShift;
        const real_t fm = std::norm(inner_product(prepare_state(spec, t), ref));
        t[k] = theta[k];
        g[k] = 0.5 * (fp - fm);
    }
    return g;
}

struct TrainTracePoint {
    std::size_t epoch = 0;
    real_t mean_loss = 0.0;
    real_t anchor_term = 0.0;
    real_t fidelity_term = 0.0;
};

using TrainTrace = std::vector<TrainTracePoint>;

class TrainingDiverged : public NumericalError {
  public:
    TrainingDiverged(const std::string &what, TrainTrace trace)
        : NumericalError(what), trace_(std::move(trace)) {}
    [[nodiscard]] const TrainTrace &trace() const { return trace_; }

  private:
    TrainTrace trace_;
};

struct TrainResult {
    PreconditionerModel model;
    TrainTrace trace;
};

inline void write_loss_trace_csv(std::ostream &os, const TrainTrace &trace) {
    os << "epoch,mean_loss,anchor_term,fidelity_term\n";
    os.precision(17);
    for (const auto &p : trace) {
        os << p.epoch << ',' << p.mean_loss << ',' << p.anchor_term << ',' << p.fidelity_term
           << '\n';
    }
}

/// Sets feature_shift / feature_scale to the per-coordinate mean and standard
/// deviation over every atom in the dataset (scale 1 for constant coordinates).
inline void fit_feature_standardization(PreconditionerModel &m, const TrainingSet &data) {
    const std::size_t d = m.feature_dim();
    std::vector<real_t> sum(d, 0.0);
    std::vector<real_t> sq(d, 0.0);
    std::size_t count = 0;
    for (const auto &ex : data.examples) {
        for (std::size_t a = 0; a < ex.geometry.size(); ++a) {
            const auto f = invariant_features(ex.geometry, a, m.feature_config, m.vocabulary);
            for (std::size_t i = 0; i < d; ++i) {
                sum[i] += f[i];
                sq[i] += f[i] * f[i];
            }
            ++count;
        }
    }
    if (count == 0) {
        return;
    }
    const auto n = static_cast<real_t>(count);
    for (std::size_t i = 0; i < d; ++i) {
        const real_t mean = sum[i] / n;
        const real_t var = std::max(0.0, sq[i] / n - mean * mean);
        m.feature_shift[i] = mean;
        m.feature_scale[i] = std::sqrt(var) > 1e-12 ? std::sqrt(var) : 1.0;
    }
}

namespace detail {

inline constexpr real_t kTargetClamp = 1.0 - 1e-9;

/// Output-layer ridge fit: z targets are atanh(theta*/pi), inputs are the last
/// hidden activations, one system per element.
inline void least_squares_readout(PreconditionerModel &m, const TrainingSet &data,
                                  const AnsatzSpec &spec, real_t ridge) {
    for (std::size_t e = 0; e < m.readouts.size(); ++e) {
        const auto &net = m.readouts[e];
        std::vector<Eigen::VectorXd> hs;
        std::vector<Eigen::VectorXd> zs;
        for (const auto &ex : data.examples) {
            const auto map = ex.qubit_map();
            for (std::size_t a = 0; a < ex.geometry.size(); ++a) {
                if (ex.geometry[a].element != net.element) {
                    continue;
                }
                ForwardCache cache;
                readout_forward(m, net, standardized_features(m, ex.geometry, a), &cache);
                hs.push_back(cache.activations[cache.activations.size() - 2]);
                const auto &last = net.layers.back();
                Eigen::VectorXd z(static_cast<Eigen::Index>(last.rows));
                for (std::size_t j = 0; j < last.rows; ++j) {
                    const real_t r = std::clamp(ex.target[routed_index(spec, map[a], j)] / kPi,
                                                -kTargetClamp, kTargetClamp);
                    z(static_cast<Eigen::Index>(j)) = std::atanh(r);
                }
                zs.push_back(std::move(z));
            }
        }
        if (hs.empty()) {
            continue;
        }
        const auto &last = net.layers.back();
        const auto n = static_cast<Eigen::Index>(hs.size());
        const auto in = static_cast<Eigen::Index>(last.cols);
        const auto out = static_cast<Eigen::Index>(last.rows);
        // Augmented design [h, 1]; the bias column is not penalized.
        Eigen::MatrixXd X(n, in + 1);
        Eigen::MatrixXd Z(n, out);
        for (Eigen::Index i = 0; i < n; ++i) {
            X.row(i).head(in) = hs[static_cast<std::size_t>(i)].transpose();
            X(i, in) = 1.0;
            Z.row(i) = zs[static_cast<std::size_t>(i)].transpose();
        }
        Eigen::MatrixXd reg = Eigen::MatrixXd::Identity(in + 1, in + 1) * ridge;
        reg(in, in) = 0.0;
        Eigen::MatrixXd A = X.transpose() * X + reg;
        Eigen::MatrixXd W;
        if (n <= in) {
            // Minimum-norm interpolant through the dual system.
            Eigen::MatrixXd K = X * X.transpose();
            K.diagonal().array() += ridge;
            W = X.transpose() * K.completeOrthogonalDecomposition().solve(Z);
        } else {
            W = A.ldlt().solve(X.transpose() * Z);
        }
        for (Eigen::Index r = 0; r < out; ++r) {
            for (Eigen::Index c = 0; c < in; ++c) {
                m.params[last.weight_offset + static_cast<std::size_t>(r * in + c)] = W(c, r);
            }
            m.params[last.bias_offset + static_cast<std::size_t>(r)] = W(in, r);
        }
    }
}

inline std::vector<std::size_t> epoch_order(std::size_t n, std::mt19937_64 &rng) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    // Fisher-Yates with explicit draws; std::shuffle is implementation-defined.
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(idx[i - 1], idx[j]);
    }
    return idx;
}

/// Loss terms for one example, accumulating d(loss)/d(params) into grad.
inline GaugeLossTerms example_loss_and_gradient(const PreconditionerModel &m,
                                                const TrainingExample &ex, const AnsatzSpec &spec,
                                                const TrainConfig &cfg,
                                                std::vector<real_t> *grad) {
    const auto map = ex.qubit_map();
    const bool use_fid = cfg.fidelity_term == FidelityTerm::exact && cfg.lambda_fidelity != 0.0;
    ParameterVector theta(spec.n_params(), 0.0);
    std::vector<ForwardCache> caches(ex.geometry.size());
    std::vector<Eigen::VectorXd> zs(ex.geometry.size());
    for (std::size_t a = 0; a < ex.geometry.size(); ++a) {
        const auto &net = m.readout_for(ex.geometry[a].element);
        zs[a] = readout_forward(m, net, standardized_features(m, ex.geometry, a), &caches[a]);
        for (Eigen::Index j = 0; j < zs[a].size(); ++j) {
            theta[routed_index(spec, map[a], static_cast<std::size_t>(j))] =
                kPi * std::tanh(zs[a](j));
        }
    }
    GaugeLossTerms terms = gauge_loss_terms(theta, ex.target, spec,
                                            use_fid ? cfg.lambda_fidelity : 0.0);
    if (grad == nullptr) {
        return terms;
    }
    std::vector<real_t> dtheta(theta.size());
    for (std::size_t k = 0; k < theta.size(); ++k) {
        dtheta[k] = 2.0 * (theta[k] - ex.target[k]);
    }
    if (use_fid) {
        const auto gf = fidelity_gradient(spec, theta, ex.target);
        for (std::size_t k = 0; k < theta.size(); ++k) {
            dtheta[k] -= cfg.lambda_fidelity * gf[k];
        }
    }
    for (std::size_t a = 0; a < ex.geometry.size(); ++a) {
        const auto &net = m.readout_for(ex.geometry[a].element);
        Eigen::VectorXd dz(zs[a].size());
        for (Eigen::Index j = 0; j < zs[a].size(); ++j) {
            const real_t t = std::tanh(zs[a](j));
            dz(j) = dtheta[routed_index(spec, map[a], static_cast<std::size_t>(j))] * kPi *
                    (1.0 - t * t);
        }
        readout_backward(m, net, caches[a], std::move(dz), *grad);
    }
    return terms;
}

} // namespace detail

/// Mean gauge loss of the model over a dataset.
inline GaugeLossTerms dataset_loss(const PreconditionerModel &m, const TrainingSet &data,
                                   const AnsatzSpec &spec, const TrainConfig &cfg) {
    GaugeLossTerms acc;
    for (const auto &ex : data.examples) {
        const auto t = detail::example_loss_and_gradient(m, ex, spec, cfg, nullptr);
        acc.anchor += t.anchor;
        acc.fidelity += t.fidelity;
    }
    const auto n = static_cast<real_t>(std::max<std::size_t>(1, data.size()));
    acc.anchor /= n;
    acc.fidelity /= n;
    return acc;
}

/**
 * Mini-batch AdamW on the mean gauge loss. Feature standardization is fitted
 * on the dataset unless the model's scale is frozen. Reproducible given
 * (model, dataset, cfg). Throws TrainingDiverged if an epoch's mean loss
 * exceeds 1e3 times the initial loss.
 */
inline TrainResult train(PreconditionerModel model, const TrainingSet &data,
                         const AnsatzSpec &spec, const TrainConfig &cfg) {
    cfg.validate();
    if (data.empty()) {
        throw ValidationError("train: dataset is empty");
    }
    data.validate(spec);
    for (const auto &ex : data.examples) {
        detail::check_routing(model, ex.geometry, spec, ex.qubit_map());
    }
    if (!cfg.trainable_mask.empty() && cfg.trainable_mask.size() != model.params.size()) {
        throw ValidationError("train: trainable mask has wrong length");
    }
    if (!model.frozen_feature_scale) {
        fit_feature_standardization(model, data);
    }
    if (cfg.readout_init == ReadoutInit::least_squares) {
        detail::least_squares_readout(model, data, spec, cfg.ridge);
    }

    const std::size_t n = data.size();
    const std::size_t batches = (n + cfg.batch_size - 1) / cfg.batch_size;
    optim::TrainOptimConfig ocfg = cfg.optimizer;
    if (cfg.schedule_from_epochs) {
        ocfg.total_steps = std::max<std::size_t>(1, cfg.epochs * batches);
        ocfg.warmup_steps = std::min(ocfg.warmup_steps, ocfg.total_steps);
    }
    ocfg.validate();

    const real_t initial = dataset_loss(model, data, spec, cfg).total();
    const real_t limit = 1e3 * std::max(initial, 1e-12);

    // std::vector<bool> has no contiguous storage.
    std::unique_ptr<bool[]> mask_buf;
    std::span<const bool> mask;
    if (!cfg.trainable_mask.empty()) {
        mask_buf = std::make_unique<bool[]>(cfg.trainable_mask.size());
        for (std::size_t i = 0; i < cfg.trainable_mask.size(); ++i) {
            mask_buf[i] = cfg.trainable_mask[i];
        }
        mask = std::span<const bool>(mask_buf.get(), cfg.trainable_mask.size());
    }

    std::mt19937_64 rng(cfg.seed);
    optim::MomentState state;
    TrainTrace trace;
    std::size_t step = 0;
    std::vector<real_t> grad(model.params.size());
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const auto order = detail::epoch_order(n, rng);
        GaugeLossTerms sum;
        for (std::size_t b = 0; b < batches; ++b) {
            const std::size_t lo = b * cfg.batch_size;
            const std::size_t hi = std::min(n, lo + cfg.batch_size);
            std::fill(grad.begin(), grad.end(), 0.0);
            for (std::size_t i = lo; i < hi; ++i) {
                const auto t = detail::example_loss_and_gradient(model, data.examples[order[i]],
                                                                 spec, cfg, &grad);
                sum.anchor += t.anchor;
                sum.fidelity += t.fidelity;
            }
            const auto bs = static_cast<real_t>(hi - lo);
            for (auto &g : grad) {
                g /= bs;
            }
            ++step;
            if (!optim::decayed_weight_gradient_step(model.params, grad, step, ocfg, state,
                                                     mask)) {
                throw TrainingDiverged("train: non-finite gradient at epoch " +
                                           std::to_string(epoch),
                                       trace);
            }
        }
        TrainTracePoint p;
        p.epoch = epoch;
        p.anchor_term = sum.anchor / static_cast<real_t>(n);
        p.fidelity_term = sum.fidelity / static_cast<real_t>(n);
        p.mean_loss = p.anchor_term + p.fidelity_term;
        trace.push_back(p);
        if (!std::isfinite(p.mean_loss) || p.mean_loss > limit) {
            throw TrainingDiverged("train: loss diverged at epoch " + std::to_string(epoch),
                                   trace);
        }
    }
    return {std::move(model), std::move(trace)};
}

/**
 * Few-label adaptation: as train, but only the output layer of each readout
 * updates and the feature standardization is left as is.
 */
inline TrainResult adapt_readout(PreconditionerModel model, const TrainingSet &small,
                                 const AnsatzSpec &spec, TrainConfig cfg) {
    if (small.empty()) {
        throw ValidationError("adapt_readout: dataset is empty");
    }
    cfg.trainable_mask = model.final_layer_mask();
    const bool frozen = model.frozen_feature_scale;
    model.frozen_feature_scale = true;
    auto result = train(std::move(model), small, spec, cfg);
    result.model.frozen_feature_scale = frozen;
    return result;
}

} // namespace basinvqe::precond
