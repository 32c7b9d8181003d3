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

#include <memory>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "../hamiltonian_io.hpp"
#include "model.hpp"
#include "training.hpp"

namespace basinvqe::precond {

using json = nlohmann::json;

namespace detail {

inline void reject_unknown(const json &doc, const std::set<std::string> &known,
                           const std::string &where) {
    if (!doc.is_object()) {
        throw ConfigError(where + ": expected an object");
    }
    for (const auto &[key, _] : doc.items()) {
        if (!known.contains(key)) {
            throw ConfigError(where + ": unknown key '" + key + "'");
        }
    }
}

inline json parse_json(const std::string &text, const std::string &what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error &e) {
        throw ConfigError(what + " is not valid JSON: " + e.what());
    }
}

} // namespace detail

inline json feature_config_to_json(const FeatureConfig &c) {
    return {{"r_cut", c.r_cut},
            {"n_radial", c.n_radial},
            {"radial_width", c.radial_width},
            {"include_three_body", c.include_three_body},
            {"n_angular", c.n_angular}};
}

inline FeatureConfig feature_config_from_json(const json &j) {
    const std::string where = "feature_config";
    detail::reject_unknown(j, {"r_cut", "n_radial", "radial_width", "include_three_body", "n_angular"},
                           where);
    FeatureConfig c;
    c.r_cut = io::detail::get_key<real_t>(j, "r_cut", where);
    c.n_radial = io::detail::get_key<std::size_t>(j, "n_radial", where);
    c.radial_width = io::detail::get_key<real_t>(j, "radial_width", where);
    c.include_three_body = io::detail::get_key<bool>(j, "include_three_body", where);
    c.n_angular = io::detail::get_key<std::size_t>(j, "n_angular", where);
    c.validate();
    return c;
}

/**
 * Checkpoint document (format_version 1): feature config, vocabulary,
 * standardization, and for each element its layers as row-major weight
 * arrays with explicit shapes.
 */
inline json model_to_json(const PreconditionerModel &m) {
    json readouts = json::array();
    for (const auto &net : m.readouts) {
        json layers = json::array();
        for (const auto &L : net.layers) {
            const auto w0 = m.params.begin() + static_cast<std::ptrdiff_t>(L.weight_offset);
            const auto b0 = m.params.begin() + static_cast<std::ptrdiff_t>(L.bias_offset);
            layers.push_back({{"shape", {L.rows, L.cols}},
                              {"weights", std::vector<real_t>(w0, w0 + static_cast<std::ptrdiff_t>(L.rows * L.cols))},
                              {"bias", std::vector<real_t>(b0, b0 + static_cast<std::ptrdiff_t>(L.rows))}});
        }
        readouts.push_back(
            {{"element", net.element}, {"qubits_per_atom", net.qubits_per_atom}, {"layers", layers}});
    }
    return {{"format_version", 1},
            {"feature_config", feature_config_to_json(m.feature_config)},
            {"vocabulary", m.vocabulary.symbols()},
            {"depth", m.depth},
            {"hidden_width", m.hidden_width},
            {"feature_shift", m.feature_shift},
            {"feature_scale", m.feature_scale},
            {"frozen_feature_scale", m.frozen_feature_scale},
            {"readouts", readouts}};
}

inline PreconditionerModel model_from_json(const json &doc) {
    const std::string where = "checkpoint";
    detail::reject_unknown(doc,
                           {"format_version", "feature_config", "vocabulary", "depth", "hidden_width",
                            "feature_shift", "feature_scale", "frozen_feature_scale", "readouts"},
                           where);
    if (io::detail::get_key<int>(doc, "format_version", where) != 1) {
        throw ConfigError(where + ": unsupported format_version");
    }
    PreconditionerModel m;
    m.feature_config = feature_config_from_json(doc.at("feature_config"));
    m.vocabulary =
        ElementVocabulary(io::detail::get_key<std::vector<std::string>>(doc, "vocabulary", where));
    m.depth = io::detail::get_key<std::size_t>(doc, "depth", where);
    m.hidden_width = io::detail::get_key<std::size_t>(doc, "hidden_width", where);
    m.feature_shift = io::detail::get_key<std::vector<real_t>>(doc, "feature_shift", where);
    m.feature_scale = io::detail::get_key<std::vector<real_t>>(doc, "feature_scale", where);
    m.frozen_feature_scale = io::detail::get_key<bool>(doc, "frozen_feature_scale", where);
    const std::size_t fdim = m.feature_dim();
    if (m.feature_shift.size() != fdim || m.feature_scale.size() != fdim) {
        throw ConfigError(where + ": standardization length does not match feature length");
    }
    for (real_t s : m.feature_scale) {
        if (!(s > 0.0)) {
            throw ConfigError(where + ": feature_scale entries must be positive");
        }
    }
    const auto &rs = doc.at("readouts");
    if (!rs.is_array() || rs.size() != m.vocabulary.size()) {
        throw ConfigError(where + ": need one readout per vocabulary element");
    }
    for (std::size_t e = 0; e < rs.size(); ++e) {
        const auto &r = rs[e];
        const std::string rw = where + ".readouts[" + std::to_string(e) + "]";
        detail::reject_unknown(r, {"element", "qubits_per_atom", "layers"}, rw);
        ReadoutNet net;
        net.element = io::detail::get_key<std::string>(r, "element", rw);
        if (net.element != m.vocabulary.symbols()[e]) {
            throw ConfigError(rw + ": element out of vocabulary order");
        }
        net.qubits_per_atom = io::detail::get_key<std::size_t>(r, "qubits_per_atom", rw);
        std::size_t in = fdim;
        for (const auto &lj : r.at("layers")) {
            detail::reject_unknown(lj, {"shape", "weights", "bias"}, rw + ".layers");
            const auto shape = io::detail::get_key<std::vector<std::size_t>>(lj, "shape", rw);
            const auto w = io::detail::get_key<std::vector<real_t>>(lj, "weights", rw);
            const auto b = io::detail::get_key<std::vector<real_t>>(lj, "bias", rw);
            if (shape.size() != 2 || shape[1] != in || w.size() != shape[0] * shape[1] ||
                b.size() != shape[0]) {
                throw ConfigError(rw + ": inconsistent layer shape");
            }
            DenseLayer L{shape[0], shape[1], m.params.size(), 0};
            m.params.insert(m.params.end(), w.begin(), w.end());
            L.bias_offset = m.params.size();
            m.params.insert(m.params.end(), b.begin(), b.end());
            net.layers.push_back(L);
            in = shape[0];
        }
        if (net.layers.empty() || in != net.qubits_per_atom * m.outputs_per_qubit()) {
            throw ConfigError(rw + ": output width does not match depth and qubits_per_atom");
        }
        m.readouts.push_back(std::move(net));
    }
    if (!all_finite(m.params)) {
        throw ConfigError(where + ": non-finite weights");
    }
    return m;
}

inline void save_model(const PreconditionerModel &m, const std::string &path) {
    io::write_file(path, model_to_json(m).dump(1) + "\n");
}

inline PreconditionerModel load_model(const std::string &path) {
    return model_from_json(detail::parse_json(io::read_file(path), "checkpoint " + path));
}

/// Labels document: each example embeds its Hamiltonian document.
inline json dataset_to_json(const TrainingSet &data) {
    json arr = json::array();
    for (const auto &ex : data.examples) {
        json e{{"geometry", io::geometry_to_json(ex.geometry)},
               {"theta", ex.target},
               {"energy", ex.target_energy},
               {"suspect", ex.suspect}};
        if (ex.exact_energy) {
            e["exact_energy"] = *ex.exact_energy;
        }
        if (ex.atom_qubit_map) {
            e["atom_qubit_map"] = *ex.atom_qubit_map;
        }
        if (ex.hamiltonian) {
            e["hamiltonian"] = io::hamiltonian_to_json(*ex.hamiltonian);
        }
        arr.push_back(std::move(e));
    }
    return {{"format_version", 1}, {"examples", arr}};
}

inline TrainingSet dataset_from_json(const json &doc) {
    const std::string where = "labels";
    detail::reject_unknown(doc, {"format_version", "examples"}, where);
    if (io::detail::get_key<int>(doc, "format_version", where) != 1) {
        throw ConfigError(where + ": unsupported format_version");
    }
    TrainingSet set;
    for (const auto &e : doc.at("examples")) {
        const std::string ew = where + ".examples[" + std::to_string(set.size()) + "]";
        detail::reject_unknown(
            e, {"geometry", "theta", "energy", "suspect", "exact_energy", "atom_qubit_map", "hamiltonian"},
            ew);
        TrainingExample ex;
        ex.geometry = io::geometry_from_json(e.at("geometry"), ew);
        ex.target = io::detail::get_key<std::vector<real_t>>(e, "theta", ew);
        ex.target_energy = io::detail::get_key<real_t>(e, "energy", ew);
        ex.suspect = io::detail::get_key<bool>(e, "suspect", ew);
        if (e.contains("exact_energy")) {
            ex.exact_energy = io::detail::get_key<real_t>(e, "exact_energy", ew);
        }
        if (e.contains("atom_qubit_map")) {
            ex.atom_qubit_map =
                io::detail::get_key<std::vector<std::vector<std::size_t>>>(e, "atom_qubit_map", ew);
        }
        if (e.contains("hamiltonian")) {
            ex.hamiltonian = std::make_shared<const QubitHamiltonian>(
                io::parse_hamiltonian(e.at("hamiltonian").dump()));
        }
        set.examples.push_back(std::move(ex));
    }
    return set;
}

inline void save_dataset(const TrainingSet &data, const std::string &path) {
    io::write_file(path, dataset_to_json(data).dump(1) + "\n");
}

inline TrainingSet load_dataset(const std::string &path) {
    return dataset_from_json(detail::parse_json(io::read_file(path), "labels " + path));
}

} // namespace basinvqe::precond
