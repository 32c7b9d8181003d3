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
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "../circuit.hpp"
#include "../common.hpp"
#include "../features.hpp"
#include "../geometry.hpp"

namespace basinvqe::precond {

using RowMatrix = Eigen::Matrix<real_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Dense layer stored in the model's flat parameter array.
struct DenseLayer {
    std::size_t rows = 0; // outputs
    std::size_t cols = 0; // inputs
    std::size_t weight_offset = 0;
    std::size_t bias_offset = 0;
};

/// Per-element readout: tanh hidden layers, linear output.
struct ReadoutNet {
    std::string element;
    std::size_t qubits_per_atom = 1;
    std::vector<DenseLayer> layers;
};

/**
 * Geometry-to-angles map: invariant per-atom features, standardized, fed to
 * the readout of the atom's element; outputs pass through pi * tanh and are
 * routed to the atom's qubits. Readout output width is 2 (L + 1) per qubit,
 * ordered (qubit in block, layer, {y, z}).
 */
struct PreconditionerModel {
    FeatureConfig feature_config;
    ElementVocabulary vocabulary;
    std::size_t depth = 0;
    std::size_t hidden_width = 64;
    std::vector<ReadoutNet> readouts; // parallel to vocabulary
    std::vector<real_t> params;
    std::vector<real_t> feature_shift;
    std::vector<real_t> feature_scale;
    bool frozen_feature_scale = false;

    [[nodiscard]] std::size_t feature_dim() const {
        return feature_length(feature_config, vocabulary);
    }

    [[nodiscard]] std::size_t outputs_per_qubit() const { return 2 * (depth + 1); }

    [[nodiscard]] const ReadoutNet &readout_for(const std::string &element) const {
        return readouts.at(vocabulary.index_of(element));
    }

    /// Trainable mask selecting only the final (output) layer of each readout.
    [[nodiscard]] std::vector<bool> final_layer_mask() const {
        std::vector<bool> mask(params.size(), false);
        for (const auto &net : readouts) {
            const auto &last = net.layers.back();
            for (std::size_t i = 0; i < last.rows * last.cols; ++i) {
                mask[last.weight_offset + i] = true;
            }
            for (std::size_t i = 0; i < last.rows; ++i) {
                mask[last.bias_offset + i] = true;
            }
        }
        return mask;
    }
};

struct ModelInit {
    FeatureConfig feature_config;
    std::vector<std::string> elements;
    std::map<std::string, std::size_t> qubits_per_atom; // default 1
    std::size_t depth = 0;
    std::size_t hidden_width = 64;
    std::size_t hidden_layers = 2;
    std::uint64_t seed = 0;
};

/// Hidden layers uniform in +-1/sqrt(fan_in); output layer zero so the fresh
/// model predicts all-zero angles.
inline PreconditionerModel init_model(const ModelInit &init) {
    init.feature_config.validate();
    if (init.hidden_layers < 1 || init.hidden_width < 1) {
        throw ValidationError("readout needs at least one hidden layer of positive width");
    }
    PreconditionerModel m;
    m.feature_config = init.feature_config;
    m.vocabulary = ElementVocabulary(init.elements);
    m.depth = init.depth;
    m.hidden_width = init.hidden_width;
    const std::size_t fdim = m.feature_dim();
    m.feature_shift.assign(fdim, 0.0);
    m.feature_scale.assign(fdim, 1.0);
    std::mt19937_64 rng(init.seed);
    for (const auto &el : m.vocabulary.symbols()) {
        ReadoutNet net;
        net.element = el;
        if (auto it = init.qubits_per_atom.find(el); it != init.qubits_per_atom.end()) {
            net.qubits_per_atom = it->second;
        }
        std::size_t in = fdim;
        auto add_layer = [&](std::size_t out, bool zero) {
            DenseLayer L{out, in, m.params.size(), 0};
            const real_t bound = 1.0 / std::sqrt(static_cast<real_t>(in));
            std::uniform_real_distribution<real_t> u(-bound, bound);
            for (std::size_t i = 0; i < out * in; ++i) {
                m.params.push_back(zero ? 0.0 : u(rng));
            }
            L.bias_offset = m.params.size();
            for (std::size_t i = 0; i < out; ++i) {
                m.params.push_back(zero ? 0.0 : u(rng));
            }
            net.layers.push_back(L);
            in = out;
        };
        for (std::size_t h = 0; h < init.hidden_layers; ++h) {
            add_layer(init.hidden_width, false);
        }
        add_layer(net.qubits_per_atom * m.outputs_per_qubit(), true);
        m.readouts.push_back(std::move(net));
    }
    return m;
}

/// Forward pass cache for one atom.
struct ForwardCache {
    std::vector<Eigen::VectorXd> activations; // input, hidden..., pre-tanh output z
};

inline Eigen::VectorXd standardized_features(const PreconditionerModel &m,
                                             const MolecularGeometry &geom, std::size_t atom) {
    const auto f = invariant_features(geom, atom, m.feature_config, m.vocabulary);
    Eigen::VectorXd x(static_cast<Eigen::Index>(f.size()));
    for (std::size_t i = 0; i < f.size(); ++i) {
        x(static_cast<Eigen::Index>(i)) = (f[i] - m.feature_shift[i]) / m.feature_scale[i];
    }
    return x;
}

/// Output-layer pre-activations z for one atom (angles are pi * tanh(z)).
inline Eigen::VectorXd readout_forward(const PreconditionerModel &m, const ReadoutNet &net,
                                       const Eigen::VectorXd &x, ForwardCache *cache = nullptr) {
    Eigen::VectorXd a = x;
    if (cache != nullptr) {
        cache->activations.clear();
        cache->activations.push_back(a);
    }
    for (std::size_t li = 0; li < net.layers.size(); ++li) {
        const auto &L = net.layers[li];
        Eigen::Map<const RowMatrix> W(m.params.data() + L.weight_offset,
                                      static_cast<Eigen::Index>(L.rows),
                                      static_cast<Eigen::Index>(L.cols));
        Eigen::Map<const Eigen::VectorXd> b(m.params.data() + L.bias_offset,
                                            static_cast<Eigen::Index>(L.rows));
        Eigen::VectorXd z = W * a + b;
        if (li + 1 < net.layers.size()) {
            a = z.array().tanh().matrix();
        } else {
            a = std::move(z);
        }
        if (cache != nullptr) {
            cache->activations.push_back(a);
        }
    }
    return a;
}

/// Accumulates d(loss)/d(params) given d(loss)/dz at the output.
inline void readout_backward(const PreconditionerModel &m, const ReadoutNet &net,
                             const ForwardCache &cache, Eigen::VectorXd dz,
                             std::vector<real_t> &grad) {
    for (std::size_t li = net.layers.size(); li-- > 0;) {
        const auto &L = net.layers[li];
        const Eigen::VectorXd &input = cache.activations[li];
        Eigen::Map<RowMatrix> dW(grad.data() + L.weight_offset, static_cast<Eigen::Index>(L.rows),
                                 static_cast<Eigen::Index>(L.cols));
        Eigen::Map<Eigen::VectorXd> db(grad.data() + L.bias_offset,
                                       static_cast<Eigen::Index>(L.rows));
        dW.noalias() += dz * input.transpose();
        db += dz;
        if (li == 0) {
            break;
        }
        Eigen::Map<const RowMatrix> W(m.params.data() + L.weight_offset,
                                      static_cast<Eigen::Index>(L.rows),
                                      static_cast<Eigen::Index>(L.cols));
        Eigen::VectorXd da = W.transpose() * dz;
        // input is tanh(previous z): derivative 1 - a^2
        dz = (da.array() * (1.0 - input.array().square())).matrix();
    }
}

/// Default map for chain models: atom i owns qubit i.
inline std::vector<std::vector<std::size_t>> identity_atom_qubit_map(std::size_t n_atoms) {
    std::vector<std::vector<std::size_t>> map(n_atoms);
    for (std::size_t i = 0; i < n_atoms; ++i) {
        map[i] = {i};
    }
    return map;
}

namespace detail {
inline void check_routing(const PreconditionerModel &m, const MolecularGeometry &geom,
                          const AnsatzSpec &spec,
                          const std::vector<std::vector<std::size_t>> &atom_qubits) {
    if (spec.depth != m.depth) {
        throw ValidationError("model was built for depth " + std::to_string(m.depth) +
                              ", ansatz has depth " + std::to_string(spec.depth));
    }
    if (atom_qubits.size() != geom.size()) {
        throw ValidationError("atom_qubit_map has " + std::to_string(atom_qubits.size()) +
                              " entries for " + std::to_string(geom.size()) + " atoms");
    }
    std::vector<int> seen(spec.n_qubits, 0);
    for (std::size_t a = 0; a < geom.size(); ++a) {
        const auto &net = m.readout_for(geom[a].element);
        if (atom_qubits[a].size() != net.qubits_per_atom) {
            throw ValidationError("atom " + std::to_string(a) + " (" + geom[a].element +
                                  ") maps to " + std::to_string(atom_qubits[a].size()) +
                                  " qubits, readout expects " +
                                  std::to_string(net.qubits_per_atom));
        }
        for (auto q : atom_qubits[a]) {
            if (q >= spec.n_qubits) {
                throw ValidationError("atom_qubit_map references qubit out of range");
            }
            ++seen[q];
        }
    }
    for (std::size_t q = 0; q < spec.n_qubits; ++q) {
        if (seen[q] != 1) {
            throw ValidationError("qubit " + std::to_string(q) +
                                  " is not covered exactly once by atom_qubit_map");
        }
    }
}
} // namespace detail

/// Flat parameter index for readout output slot j of an atom.
inline std::size_t routed_index(const AnsatzSpec &spec, const std::vector<std::size_t> &qubits,
                                std::size_t slot) {
    const std::size_t per_qubit = 2 * (spec.depth + 1);
    const std::size_t qb = slot / per_qubit;
    const std::size_t rem = slot % per_qubit;
    return spec.index(qubits[qb], rem / 2, static_cast<AngleSlot>(rem % 2));
}

/**
 * Predicted angles for geom. Every entry lies in (-pi, pi). Depends on the
 * geometry only through interatomic distances and angles.
 */
inline ParameterVector predict(const PreconditionerModel &m, const MolecularGeometry &geom,
                               const AnsatzSpec &spec,
                               std::optional<std::vector<std::vector<std::size_t>>> atom_qubits =
                                   std::nullopt) {
    const auto map = atom_qubits ? *atom_qubits : identity_atom_qubit_map(geom.size());
    detail::check_routing(m, geom, spec, map);
    ParameterVector theta(spec.n_params(), 0.0);
    for (std::size_t a = 0; a < geom.size(); ++a) {
        const auto &net = m.readout_for(geom[a].element);
        const Eigen::VectorXd z = readout_forward(m, net, standardized_features(m, geom, a));
        for (Eigen::Index j = 0; j < z.size(); ++j) {
            theta[routed_index(spec, map[a], static_cast<std::size_t>(j))] = kPi * std::tanh(z(j));
        }
    }
    return theta;
}

} // namespace basinvqe::precond
