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

#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "common.hpp"
#include "geometry.hpp"
#include "hamiltonian.hpp"

namespace basinvqe {

namespace io {

using json = nlohmann::json;

inline std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write '" + path + "'");
    }
    out << text;
}

namespace detail {

template <class T> T get_key(const json &j, const std::string &key, const std::string &where) {
    if (!j.contains(key)) {
        throw ConfigError(where + ": missing key '" + key + "'");
    }
    try {
        return j.at(key).get<T>();
    } catch (const json::exception &) {
        throw ConfigError(where + ": key '" + key + "' has the wrong type");
    }
}

inline const std::set<std::string> &passthrough_keys() {
    static const std::set<std::string> keys{"provenance", "spin_ordering"};
    return keys;
}

} // namespace detail

inline json geometry_to_json(const MolecularGeometry &g) {
    json arr = json::array();
    for (const auto &a : g.atoms()) {
        arr.push_back({{"element", a.element},
                       {"xyz", {a.position.x(), a.position.y(), a.position.z()}}});
    }
    return arr;
}

inline MolecularGeometry geometry_from_json(const json &arr, const std::string &where) {
    if (!arr.is_array()) {
        throw ConfigError(where + ": 'geometry' must be a list");
    }
    std::vector<Atom> atoms;
    for (const auto &a : arr) {
        const auto el = detail::get_key<std::string>(a, "element", where + ".geometry");
        const auto xyz = detail::get_key<std::vector<real_t>>(a, "xyz", where + ".geometry");
        if (xyz.size() != 3) {
            throw ConfigError(where + ": key 'xyz' must have 3 entries");
        }
        atoms.push_back({el, Vec3(xyz[0], xyz[1], xyz[2])});
    }
    return MolecularGeometry(std::move(atoms));
}

/**
 * Parses a Hamiltonian interchange document (format_version 1). Unknown
 * top-level keys are rejected. Terms keep input order.
 */
inline QubitHamiltonian parse_hamiltonian(const std::string &text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error &e) {
        throw ConfigError(std::string("hamiltonian document is not valid JSON: ") + e.what());
    }
    const std::string where = "hamiltonian";
    if (!doc.is_object()) {
        throw ConfigError(where + ": document must be an object");
    }
    static const std::set<std::string> known{"format_version", "n_qubits", "source",
                                             "geometry",       "hf_bitstring", "energies",
                                             "terms",          "atom_qubit_map"};
    for (const auto &[key, _] : doc.items()) {
        if (!known.contains(key) && !detail::passthrough_keys().contains(key)) {
            throw ConfigError(where + ": unknown key '" + key + "'");
        }
    }
    if (detail::get_key<int>(doc, "format_version", where) != 1) {
        throw ConfigError(where + ": unsupported 'format_version'");
    }
    const auto n = detail::get_key<long long>(doc, "n_qubits", where);
    if (n < 1) {
        throw ConfigError(where + ": 'n_qubits' must be positive");
    }
    HamiltonianMetadata meta;
    if (doc.contains("source")) {
        meta.source = detail::get_key<std::string>(doc, "source", where);
    }
    if (doc.contains("geometry") && !doc["geometry"].is_null()) {
        meta.geometry = geometry_from_json(doc["geometry"], where);
    }
    if (doc.contains("hf_bitstring") && !doc["hf_bitstring"].is_null()) {
        meta.hf_bitstring = detail::get_key<std::vector<int>>(doc, "hf_bitstring", where);
    }
    if (doc.contains("energies") && !doc["energies"].is_null()) {
        const auto &e = doc["energies"];
        if (!e.is_object()) {
            throw ConfigError(where + ": 'energies' must be an object");
        }
        for (const auto &[key, _] : e.items()) {
            if (key != "hf" && key != "fci") {
                throw ConfigError(where + ".energies: unknown key '" + key + "'");
            }
        }
        if (e.contains("hf") && !e["hf"].is_null()) {
            meta.energies.hf = detail::get_key<real_t>(e, "hf", where + ".energies");
        }
        if (e.contains("fci") && !e["fci"].is_null()) {
            meta.energies.fci = detail::get_key<real_t>(e, "fci", where + ".energies");
        }
    }
    if (doc.contains("atom_qubit_map") && !doc["atom_qubit_map"].is_null()) {
        meta.atom_qubit_map =
            detail::get_key<std::vector<std::vector<std::size_t>>>(doc, "atom_qubit_map", where);
    }
    for (const auto &key : detail::passthrough_keys()) {
        if (doc.contains(key)) {
            meta.annotations[key] = doc[key].dump();
        }
    }
    const auto &terms_j = doc.contains("terms") ? doc["terms"] : json();
    if (!terms_j.is_array()) {
        throw ConfigError(where + ": missing key 'terms'");
    }
    std::vector<PauliTerm> terms;
    terms.reserve(terms_j.size());
    for (std::size_t i = 0; i < terms_j.size(); ++i) {
        const auto &t = terms_j[i];
        const std::string w = where + ".terms[" + std::to_string(i) + "]";
        if (!t.is_object()) {
            throw ConfigError(w + ": term must be an object");
        }
        for (const auto &[key, _] : t.items()) {
            if (key != "c" && key != "p") {
                throw ConfigError(w + ": unknown key '" + key + "'");
            }
        }
        terms.push_back(PauliTerm::parse(detail::get_key<real_t>(t, "c", w),
                                         detail::get_key<std::string>(t, "p", w)));
    }
    return QubitHamiltonian(static_cast<std::size_t>(n), std::move(terms), std::move(meta));
}

inline QubitHamiltonian load_hamiltonian(const std::string &path) {
    return parse_hamiltonian(read_file(path));
}

inline json hamiltonian_to_json(const QubitHamiltonian &h) {
    const auto &m = h.metadata();
    json doc;
    doc["format_version"] = 1;
    doc["n_qubits"] = h.n_qubits();
    doc["source"] = m.source;
    if (m.geometry) {
        doc["geometry"] = geometry_to_json(*m.geometry);
    }
    if (m.hf_bitstring) {
        doc["hf_bitstring"] = *m.hf_bitstring;
    }
    if (m.energies.hf || m.energies.fci) {
        json e = json::object();
        if (m.energies.hf) {
            e["hf"] = *m.energies.hf;
        }
        if (m.energies.fci) {
            e["fci"] = *m.energies.fci;
        }
        doc["energies"] = e;
    }
    if (m.atom_qubit_map) {
        doc["atom_qubit_map"] = *m.atom_qubit_map;
    }
    for (const auto &[k, v] : m.annotations) {
        doc[k] = json::parse(v);
    }
    json terms = json::array();
    for (const auto &t : h.terms()) {
        terms.push_back({{"c", t.coefficient}, {"p", t.label()}});
    }
    doc["terms"] = terms;
    return doc;
}

/// Doubles are written in shortest round-trip form.
inline std::string serialize_hamiltonian(const QubitHamiltonian &h) {
    return hamiltonian_to_json(h).dump(2) + "\n";
}

/// Standard XYZ text: count line, comment line, "El x y z" per atom (Angstrom).
inline MolecularGeometry parse_xyz(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) {
        throw ConfigError("xyz: missing atom count line");
    }
    std::size_t n = 0;
    try {
        n = std::stoul(line);
    } catch (const std::exception &) {
        throw ConfigError("xyz: malformed atom count line");
    }
    std::getline(in, line); // comment
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::getline(in, line)) {
            throw ConfigError("xyz: expected " + std::to_string(n) + " atoms");
        }
        std::istringstream ls(line);
        Atom a;
        real_t x = 0;
        real_t y = 0;
        real_t z = 0;
        if (!(ls >> a.element >> x >> y >> z)) {
            throw ConfigError("xyz: malformed atom line " + std::to_string(i + 1));
        }
        a.position = Vec3(x, y, z);
        atoms.push_back(a);
    }
    return MolecularGeometry(std::move(atoms));
}

inline std::string format_xyz(const MolecularGeometry &g, const std::string &comment = "") {
    std::ostringstream out;
    out << g.size() << "\n" << comment << "\n" << std::setprecision(17);
    for (const auto &a : g.atoms()) {
        out << a.element << " " << a.position.x() << " " << a.position.y() << " "
            << a.position.z() << "\n";
    }
    return out.str();
}

} // namespace io

using io::parse_hamiltonian;

} // namespace basinvqe
