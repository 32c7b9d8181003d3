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

#include <chrono>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "../chain_model.hpp"
#include "../diagnostics/csv.hpp"
#include "../circuit.hpp"
#include "../common.hpp"
#include "../geometry.hpp"
#include "../hamiltonian.hpp"
#include "../hamiltonian_io.hpp"
#include "../optim/basin_hopping.hpp"
#include "../optim/lbfgs.hpp"
#include "../optim/shot_noise.hpp"
#include "../optim/spsa.hpp"
#include "../precond/checkpoint.hpp"
#include "../precond/labels.hpp"
#include "../precond/model.hpp"
#include "../precond/tied.hpp"
#include "../precond/training.hpp"
#include "../spectrum.hpp"
#include "../vqe.hpp"
#include "config.hpp"
#include "manifest.hpp"

namespace basinvqe::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

struct RunContext {
    RunConfig cfg;
    std::filesystem::path out;
    unsigned workers = 1;
    RunManifest manifest;
    std::ostream *log = &std::cout;

    std::ostream &os() { return *log; }

    /// run.seed; absent is a configuration error.
    std::uint64_t seed() { return cfg.get_uint("run", "seed"); }

    std::string write_output(const std::string &name, const std::string &text) {
        const auto path = (out / name).string();
        io::write_file(path, text);
        manifest.outputs.push_back(name);
        return path;
    }
};

struct System {
    std::shared_ptr<const QubitHamiltonian> hamiltonian;
    std::optional<MolecularGeometry> geometry;
    std::optional<ChainModelParams> chain;
    std::optional<std::vector<std::vector<std::size_t>>> atom_qubit_map;
};

inline ChainModelParams chain_params(RunContext &ctx, const std::string &sec = "system") {
    ChainModelParams p;
    p.J0 = ctx.cfg.get_real(sec, "J0", p.J0);
    p.r0 = ctx.cfg.get_real(sec, "r0", p.r0);
    p.xi = ctx.cfg.get_real(sec, "xi", p.xi);
    p.h = ctx.cfg.get_real(sec, "h", p.h);
    p.r_cut = ctx.cfg.get_real(sec, "r_cut", p.r_cut);
    return p;
}

/// Base geometry of a chain-model system: an xyz file or a straight chain.
inline MolecularGeometry chain_geometry(RunContext &ctx, const std::string &sec = "system") {
    const auto xyz = ctx.cfg.get_string(sec, "geometry", std::string{});
    if (!xyz.empty()) {
        ctx.manifest.add_input(xyz);
        return io::parse_xyz(io::read_file(xyz));
    }
    const auto n = ctx.cfg.get_uint(sec, "atoms", 4);
    const auto spacing = ctx.cfg.get_real(sec, "spacing", 1.0);
    const auto el = ctx.cfg.get_string(sec, "element", std::string("H"));
    return linear_chain(el, n, spacing);
}

/// [system] source = file | chain.
inline System load_system(RunContext &ctx) {
    const auto source = ctx.cfg.get_string("system", "source", std::string("chain"));
    System s;
    if (source == "file") {
        const auto path = ctx.cfg.require_string("system", "path");
        ctx.manifest.add_input(path);
        auto h = io::load_hamiltonian(path);
        s.geometry = h.metadata().geometry;
        s.atom_qubit_map = h.metadata().atom_qubit_map;
        s.hamiltonian = std::make_shared<const QubitHamiltonian>(std::move(h));
    } else if (source == "chain") {
        s.geometry = chain_geometry(ctx);
        s.chain = chain_params(ctx);
        s.hamiltonian =
            std::make_shared<const QubitHamiltonian>(build_chain_model(*s.geometry, *s.chain));
    } else {
        throw ConfigError("system.source must be 'file' or 'chain', got '" + source + "'");
    }
    return s;
}

inline AnsatzSpec load_spec(RunContext &ctx, std::size_t n_qubits) {
    const auto depth = ctx.cfg.get_uint("ansatz", "depth", 4);
    if (ctx.cfg.has("ansatz", "n_qubits")) {
        const auto n = ctx.cfg.get_uint("ansatz", "n_qubits");
        if (n != n_qubits) {
            throw ConfigError("ansatz.n_qubits = " + std::to_string(n) +
                              " but the Hamiltonian has " + std::to_string(n_qubits));
        }
    }
    return {n_qubits, depth};
}

inline std::shared_ptr<const precond::PreconditionerModel> load_model_key(RunContext &ctx,
                                                                          const std::string &sec,
                                                                          const std::string &key) {
    const auto path = ctx.cfg.require_string(sec, key);
    ctx.manifest.add_input(path);
    return std::make_shared<const precond::PreconditionerModel>(precond::load_model(path));
}

inline ParameterVector read_theta_file(RunContext &ctx, const std::string &path) {
    ctx.manifest.add_input(path);
    const auto doc = precond::detail::parse_json(io::read_file(path), path);
    const auto &arr = doc.is_object() ? doc.at("theta") : doc;
    return arr.get<std::vector<real_t>>();
}

/// [init] source = zeros | hf | random | predict | file.
inline ParameterVector initial_theta(RunContext &ctx, const System &sys, const AnsatzSpec &spec) {
    const auto source = ctx.cfg.get_string("init", "source", std::string("zeros"));
    ParameterVector theta;
    if (source == "zeros") {
        theta.assign(spec.n_params(), 0.0);
    } else if (source == "hf") {
        const auto &bits = sys.hamiltonian->metadata().hf_bitstring;
        if (!bits) {
            throw ConfigError("init.source = hf needs an hf_bitstring in the Hamiltonian file");
        }
        theta = hf_theta(spec, *bits);
    } else if (source == "random") {
        theta = uniform_random_angles(spec.n_params(), derive_seed(ctx.seed(), 0x696e6974));
    } else if (source == "predict") {
        if (!sys.geometry) {
            throw ConfigError("init.source = predict needs a geometry");
        }
        const auto model = load_model_key(ctx, "init", "model");
        theta = precond::predict(*model, *sys.geometry, spec, sys.atom_qubit_map);
    } else if (source == "file") {
        theta = read_theta_file(ctx, ctx.cfg.require_string("init", "path"));
    } else {
        throw ConfigError("unknown init.source '" + source + "'");
    }
    spec.check(theta);
    return theta;
}

/// Reference energy: file fci if present, else exact diagonalization.
inline std::pair<real_t, std::string> reference_energy(const QubitHamiltonian &h) {
    if (h.metadata().energies.fci) {
        return {*h.metadata().energies.fci, "fci"};
    }
    return {exact_ground_state(h).ground_energy, "exact"};
}

inline optim::LbfgsOptions lbfgs_options(RunContext &ctx, const std::string &sec) {
    optim::LbfgsOptions o;
    o.ftol = ctx.cfg.get_real(sec, "ftol", o.ftol);
    o.gtol = ctx.cfg.get_real(sec, "gtol", o.gtol);
    o.max_evals = ctx.cfg.get_uint(sec, "max_evals", o.max_evals);
    o.memory = ctx.cfg.get_uint(sec, "memory", o.memory);
    return o;
}

inline optim::SPSAConfig spsa_config(RunContext &ctx, const std::string &sec) {
    optim::SPSAConfig s;
    s.a = ctx.cfg.get_real(sec, "a", s.a);
    s.c = ctx.cfg.get_real(sec, "c", s.c);
    s.A = ctx.cfg.get_real(sec, "A", s.A);
    s.alpha = ctx.cfg.get_real(sec, "alpha", s.alpha);
    s.gamma = ctx.cfg.get_real(sec, "gamma", s.gamma);
    s.max_steps = ctx.cfg.get_uint(sec, "max_steps", s.max_steps);
    return s;
}

inline optim::BasinHoppingConfig bh_config(RunContext &ctx, const std::string &sec) {
    optim::BasinHoppingConfig b;
    b.temperature = ctx.cfg.get_real(sec, "temperature", b.temperature);
    b.hop_steps = ctx.cfg.get_uint(sec, "hop_steps", b.hop_steps);
    b.restarts = ctx.cfg.get_uint(sec, "restarts", b.restarts);
    b.hop_scale = ctx.cfg.get_real(sec, "hop_scale", b.hop_scale);
    b.local = lbfgs_options(ctx, sec);
    b.workers = ctx.workers;
    return b;
}

inline nlohmann::json theta_json(const ParameterVector &theta, real_t e) {
    nlohmann::json j;
    j["theta"] = theta;
    j["energy"] = e;
    return j;
}

inline int cmd_energy(RunContext &ctx) {
    const auto sys = load_system(ctx);
    const auto spec = load_spec(ctx, sys.hamiltonian->n_qubits());
    const auto theta = initial_theta(ctx, sys, spec);
    ctx.cfg.check_consumed();
    const real_t e = energy(spec, theta, *sys.hamiltonian);
    const auto [eref, src] = reference_energy(*sys.hamiltonian);
    nlohmann::json j = theta_json(theta, e);
    j["reference_energy"] = eref;
    j["reference_source"] = src;
    j["delta_e"] = e - eref;
    if (const auto &bits = sys.hamiltonian->metadata().hf_bitstring) {
        const real_t ehf = basis_state_energy(*sys.hamiltonian, *bits);
        j["hf_determinant_energy"] = ehf;
        j["delta_e_hf"] = ehf - eref;
    }
    ctx.write_output("energy.json", j.dump(2) + "\n");
    ctx.os() << "energy = " << diagnostics::format_real(e) << " Ha\n"
             << "delta_e = " << diagnostics::format_real(e - eref) << " Ha (vs " << src << ")\n";
    return kExitOk;
}

inline int cmd_optimize(RunContext &ctx) {
    const auto sys = load_system(ctx);
    const auto spec = load_spec(ctx, sys.hamiltonian->n_qubits());
    const auto theta0 = initial_theta(ctx, sys, spec);
    const auto method = ctx.cfg.get_string("optimizer", "method", std::string("lbfgs"));
    const auto &h = *sys.hamiltonian;
    optim::OptimizerReport rep;
    std::uint64_t seed = 0;
    if (method == "lbfgs") {
        const auto o = lbfgs_options(ctx, "optimizer");
        ctx.cfg.check_consumed();
        rep = minimize_energy(spec, h, theta0, o, ctx.workers);
    } else if (method == "spsa") {
        auto s = spsa_config(ctx, "optimizer");
        const auto shots = ctx.cfg.get_uint("optimizer", "n_shots", 0);
        seed = ctx.seed();
        s.seed = derive_seed(seed, 1);
        ctx.cfg.check_consumed();
        auto f = energy_objective(spec, h);
        if (shots > 0) {
            const real_t var = hamiltonian_variance(h, prepare_state(spec, theta0));
            f = optim::shot_noise_wrapper(f, var, shots, derive_seed(seed, 2));
        }
        rep = optim::minimize_spsa(f, theta0, s);
    } else if (method == "basinhopping") {
        auto b = bh_config(ctx, "optimizer");
        seed = ctx.seed();
        b.seed = seed;
        b.local.wrap_final_parameters = true;
        ctx.cfg.check_consumed();
        rep = optim::basin_hopping(energy_objective(spec, h), energy_gradient(spec, h), theta0, b);
    } else {
        throw ConfigError("optimizer.method must be lbfgs, spsa or basinhopping, got '" + method +
                          "'");
    }
    const real_t e = energy(spec, rep.final_parameters, h);
    const auto [eref, src] = reference_energy(h);
    diagnostics::Table trace({"evaluation", "energy"});
    trace.annotate("method", method);
    trace.annotate("seed", seed);
    for (const auto &p : rep.trace) {
        trace.add_row({std::to_string(p.evaluation_count), diagnostics::format_real(p.energy)});
    }
    ctx.write_output("trace.csv", trace.csv());
    auto j = theta_json(rep.final_parameters, e);
    j["reference_energy"] = eref;
    j["delta_e"] = e - eref;
    j["termination"] = optim::to_string(rep.termination);
    j["evaluations_used"] = rep.evaluations_used;
    ctx.write_output("params.json", j.dump(2) + "\n");
    ctx.os() << "final energy = " << diagnostics::format_real(e)
             << " Ha\ndelta_e = " << diagnostics::format_real(e - eref) << " Ha (vs " << src
             << ")\n";
    return kExitOk;
}

/// Label problems from [labels] source = chain_scan | files.
inline std::vector<precond::LabelProblem> label_problems(RunContext &ctx) {
    const auto source = ctx.cfg.get_string("labels", "source", std::string("chain_scan"));
    std::vector<precond::LabelProblem> out;
    if (source == "chain_scan") {
        const auto base = chain_geometry(ctx);
        const auto cp = chain_params(ctx);
        const auto n = ctx.cfg.get_uint("labels", "n_geometries");
        const auto sigmas = ctx.cfg.get_reals("labels", "sigma_pos", std::vector<real_t>{0.0});
        const auto seed = ctx.seed();
        for (std::size_t i = 0; i < n; ++i) {
            const real_t s = sigmas[i % sigmas.size()];
            auto g = perturb_positions(base, s, derive_seed(seed, 1000 + i));
            auto h = std::make_shared<const QubitHamiltonian>(build_chain_model(g, cp));
            out.push_back({std::move(g), std::move(h), std::nullopt, std::nullopt});
        }
    } else if (source == "files") {
        for (const auto &path : ctx.cfg.get_strings("labels", "files")) {
            ctx.manifest.add_input(path);
            auto h = io::load_hamiltonian(path);
            if (!h.metadata().geometry) {
                throw ConfigError("'" + path + "' carries no geometry");
            }
            auto g = *h.metadata().geometry;
            auto map = h.metadata().atom_qubit_map;
            out.push_back({std::move(g), std::make_shared<const QubitHamiltonian>(std::move(h)),
                           std::move(map), std::nullopt});
        }
    } else {
        throw ConfigError("labels.source must be chain_scan or files, got '" + source + "'");
    }
    return out;
}

inline int cmd_labels(RunContext &ctx) {
    auto problems = label_problems(ctx);
    const std::size_t depth = ctx.cfg.get_uint("ansatz", "depth", 4);
    auto bh = bh_config(ctx, "basinhopping");
    bh.seed = ctx.seed();
    precond::LabelOptions lo;
    lo.suspect_tol = ctx.cfg.get_real("labels", "suspect_tol", lo.suspect_tol);
    lo.continuation = ctx.cfg.get_bool("labels", "continuation", lo.continuation);
    lo.gauge_weight = ctx.cfg.get_real("labels", "gauge_weight", lo.gauge_weight);
    const auto anchor = ctx.cfg.get_string("labels", "gauge_anchor", std::string("zero"));
    if (anchor == "zero") {
        lo.gauge_anchor = precond::GaugeAnchor::zero;
    } else if (anchor == "search_start") {
        lo.gauge_anchor = precond::GaugeAnchor::search_start;
    } else {
        throw ConfigError("labels.gauge_anchor must be zero or search_start");
    }
    const auto reference = ctx.cfg.get_string("labels", "reference", std::string("none"));
    std::optional<optim::BasinHoppingConfig> ref_bh;
    if (reference == "mirror") {
        ref_bh = bh_config(ctx, "reference");
        ref_bh->seed = derive_seed(bh.seed, 7);
    } else if (reference != "none") {
        throw ConfigError("labels.reference must be none or mirror");
    }
    ctx.cfg.check_consumed();
    if (problems.empty()) {
        throw ConfigError("no label problems");
    }
    const AnsatzSpec spec{problems.front().hamiltonian->n_qubits(), depth};
    if (ref_bh) {
        // Mirror-tied search on the first geometry seeds every other search.
        const auto ties = precond::TiedParameters::mirror(spec);
        const auto ref = precond::tied_basin_hopping(ties, *problems.front().hamiltonian, *ref_bh);
        lo.initial = ref.final_parameters;
        ctx.os() << "mirror-tied reference energy = " << diagnostics::format_real(ref.final_energy)
                 << " Ha\n";
    }
    const auto res = precond::generate_labels(problems, spec, bh, lo);
    diagnostics::Table t({"problem", "energy", "exact_energy", "suspect", "error"});
    t.annotate("seed", bh.seed);
    t.annotate("depth", static_cast<std::uint64_t>(depth));
    for (const auto &oc : res.outcomes) {
        std::vector<std::string> row{std::to_string(oc.problem_index), "", "", "", oc.error};
        if (oc.example_index) {
            const auto &ex = res.dataset.examples[*oc.example_index];
            row[1] = diagnostics::format_real(ex.target_energy);
            row[2] = ex.exact_energy ? diagnostics::format_real(*ex.exact_energy) : "";
            row[3] = ex.suspect ? "1" : "0";
        }
        t.add_row(row);
    }
    ctx.write_output("labels.json", precond::dataset_to_json(res.dataset).dump(1) + "\n");
    ctx.write_output("labels.csv", t.csv());
    std::size_t suspect = 0;
    for (const auto &ex : res.dataset.examples) {
        suspect += ex.suspect ? 1 : 0;
    }
    ctx.os() << res.dataset.size() << " labels, " << suspect << " suspect, "
             << problems.size() - res.dataset.size() << " failed\n";
    return kExitOk;
}

inline precond::TrainConfig train_config(RunContext &ctx) {
    precond::TrainConfig tc;
    tc.lambda_fidelity = ctx.cfg.get_real("precond", "lambda", tc.lambda_fidelity);
    tc.epochs = ctx.cfg.get_uint("precond", "epochs", tc.epochs);
    tc.batch_size = ctx.cfg.get_uint("precond", "batch_size", tc.batch_size);
    tc.optimizer.lr_start = ctx.cfg.get_real("precond", "lr_start", tc.optimizer.lr_start);
    tc.optimizer.lr_end = ctx.cfg.get_real("precond", "lr_end", tc.optimizer.lr_end);
    tc.optimizer.weight_decay =
        ctx.cfg.get_real("precond", "weight_decay", tc.optimizer.weight_decay);
    tc.optimizer.warmup_steps =
        ctx.cfg.get_uint("precond", "warmup_steps", tc.optimizer.warmup_steps);
    const auto fid = ctx.cfg.get_string("precond", "fidelity", std::string("exact"));
    if (fid == "exact") {
        tc.fidelity_term = precond::FidelityTerm::exact;
    } else if (fid == "off") {
        tc.fidelity_term = precond::FidelityTerm::off;
    } else {
        throw ConfigError("precond.fidelity must be exact or off");
    }
    const auto init = ctx.cfg.get_string("precond", "readout_init", std::string("keep"));
    if (init == "keep") {
        tc.readout_init = precond::ReadoutInit::keep;
    } else if (init == "least_squares") {
        tc.readout_init = precond::ReadoutInit::least_squares;
    } else {
        throw ConfigError("precond.readout_init must be keep or least_squares");
    }
    tc.ridge = ctx.cfg.get_real("precond", "ridge", tc.ridge);
    tc.seed = derive_seed(ctx.seed(), 2);
    return tc;
}

inline precond::TrainingSet load_dataset_key(RunContext &ctx) {
    const auto path = ctx.cfg.require_string("precond", "dataset");
    ctx.manifest.add_input(path);
    return precond::load_dataset(path);
}

inline void write_training_outputs(RunContext &ctx, const precond::TrainResult &r) {
    std::ostringstream loss;
    precond::write_loss_trace_csv(loss, r.trace);
    ctx.write_output("loss.csv", loss.str());
    ctx.write_output("model.json", precond::model_to_json(r.model).dump(1) + "\n");
    if (!r.trace.empty()) {
        ctx.os() << "final mean loss = " << diagnostics::format_real(r.trace.back().mean_loss)
                 << "\n";
    }
}

inline int cmd_precond_train(RunContext &ctx) {
    const auto data = load_dataset_key(ctx);
    if (data.empty()) {
        throw ConfigError("precond.dataset is empty");
    }
    const auto depth = ctx.cfg.get_uint("ansatz", "depth", 4);
    const AnsatzSpec spec{data.examples.front().hamiltonian->n_qubits(), depth};
    precond::ModelInit mi;
    mi.depth = depth;
    mi.hidden_width = ctx.cfg.get_uint("precond", "hidden_width", mi.hidden_width);
    mi.hidden_layers = ctx.cfg.get_uint("precond", "hidden_layers", mi.hidden_layers);
    auto &fc = mi.feature_config;
    fc.r_cut = ctx.cfg.get_real("precond", "r_cut", fc.r_cut);
    fc.n_radial = ctx.cfg.get_uint("precond", "n_radial", fc.n_radial);
    fc.radial_width = ctx.cfg.get_real("precond", "radial_width", fc.radial_width);
    fc.include_three_body = ctx.cfg.get_bool("precond", "three_body", fc.include_three_body);
    fc.n_angular = ctx.cfg.get_uint("precond", "n_angular", fc.n_angular);
    std::set<std::string> elements;
    for (const auto &ex : data.examples) {
        for (const auto &a : ex.geometry.atoms()) {
            elements.insert(a.element);
        }
    }
    mi.elements.assign(elements.begin(), elements.end());
    for (const auto &ex : data.examples) {
        const auto map = ex.qubit_map();
        for (std::size_t a = 0; a < map.size(); ++a) {
            mi.qubits_per_atom[ex.geometry[a].element] = map[a].size();
        }
    }
    auto tc = train_config(ctx);
    mi.seed = derive_seed(ctx.seed(), 1);
    ctx.cfg.check_consumed();
    auto r = precond::train(precond::init_model(mi), data, spec, tc);
    write_training_outputs(ctx, r);
    return kExitOk;
}

inline int cmd_precond_adapt(RunContext &ctx) {
    const auto model = load_model_key(ctx, "precond", "model");
    const auto data = load_dataset_key(ctx);
    if (data.empty()) {
        throw ConfigError("precond.dataset is empty");
    }
    const AnsatzSpec spec{data.examples.front().hamiltonian->n_qubits(), model->depth};
    auto tc = train_config(ctx);
    ctx.cfg.check_consumed();
    auto r = precond::adapt_readout(*model, data, spec, tc);
    write_training_outputs(ctx, r);
    return kExitOk;
}

} // namespace basinvqe::cli
