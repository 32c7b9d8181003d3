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

#include <Eigen/Dense>

#include <memory>
#include <string>
#include <vector>

#include "../diagnostics/benchmark.hpp"
#include "../diagnostics/csv.hpp"
#include "../diagnostics/curvature.hpp"
#include "../diagnostics/disorder.hpp"
#include "../diagnostics/gradient_variance.hpp"
#include "../diagnostics/landscape.hpp"
#include "../diagnostics/shots.hpp"
#include "../diagnostics/tails.hpp"
#include "commands.hpp"

namespace basinvqe::cli {

namespace detail {

inline void echo_config(RunContext &ctx, diagnostics::Table &t) {
    for (const auto &[k, v] : ctx.cfg.effective()) {
        if (k != "run.out" && k != "run.workers") {
            t.annotate(k, v);
        }
    }
}

inline void write_scan(RunContext &ctx, const std::string &scan, std::uint64_t seed,
                       diagnostics::Table t) {
    echo_config(ctx, t);
    ctx.write_output(diagnostics::scan_filename(scan, seed), t.csv());
    t.write_text(ctx.os());
}

/// Pauli-Z on the central qubit.
inline QubitHamiltonian central_z(std::size_t n) {
    PauliTerm t;
    t.coefficient = 1.0;
    t.factors[n / 2] = Pauli::Z;
    return {n, {t}};
}

} // namespace detail

inline int diag_gradvar(RunContext &ctx) {
    diagnostics::VarianceScanConfig vc;
    for (auto n : ctx.cfg.get_uints("gradvar", "sizes", std::vector<std::uint64_t>{4, 6, 8, 10})) {
        vc.sizes.push_back(n);
    }
    vc.depth = ctx.cfg.get_uint("gradvar", "depth", vc.depth);
    vc.n_samples = ctx.cfg.get_uint("gradvar", "samples", vc.n_samples);
    const real_t sigma2 = ctx.cfg.get_real("gradvar", "basin_variance", 1e-4);
    const auto model = ctx.cfg.get_string("gradvar", "hamiltonian", std::string("central_z"));
    std::optional<ChainModelParams> cp;
    std::optional<real_t> spacing;
    if (model == "chain") {
        cp = chain_params(ctx);
        spacing = ctx.cfg.get_real("system", "spacing", 1.0);
    } else if (model != "central_z") {
        throw ConfigError("gradvar.hamiltonian must be central_z or chain");
    }
    vc.seed = ctx.seed();
    vc.workers = ctx.workers;
    ctx.cfg.check_consumed();
    vc.hamiltonian = [&](std::size_t n) {
        return cp ? build_chain_model(linear_chain("H", n, *spacing), *cp) : detail::central_z(n);
    };
    // Basin centre: the best of a few L-BFGS runs from seeded uniform starts.
    vc.basin = [&](const AnsatzSpec &spec, const QubitHamiltonian &h) {
        optim::OptimizerReport best;
        best.final_energy = std::numeric_limits<real_t>::infinity();
        for (std::uint64_t r = 0; r < 4; ++r) {
            auto rep = minimize_energy(
                spec, h, uniform_random_angles(spec.n_params(), derive_seed(vc.seed, 100 + r)));
            if (rep.final_energy < best.final_energy) {
                best = std::move(rep);
            }
        }
        return diagnostics::BasinEnsemble{best.final_parameters, {sigma2}};
    };
    const auto rows = diagnostics::gradient_variance_scan(vc);
    auto t = diagnostics::variance_table(rows);
    t.annotate("uniform_log2_slope",
               diagnostics::log2_variance_slope(rows, diagnostics::EnsembleKind::uniform_random));
    detail::write_scan(ctx, "gradvar", vc.seed, std::move(t));
    return kExitOk;
}

inline int diag_hessian(RunContext &ctx) {
    const auto sys = load_system(ctx);
    const auto spec = load_spec(ctx, sys.hamiltonian->n_qubits());
    auto theta = initial_theta(ctx, sys, spec);
    const bool relax = ctx.cfg.get_bool("hessian", "minimize", false);
    const real_t tol_neg = ctx.cfg.get_real("hessian", "tol_neg", 1e-6);
    const real_t tol_zero = ctx.cfg.get_real("hessian", "tol_zero", 1e-6);
    const auto seed = ctx.cfg.get_uint("run", "seed", 0);
    ctx.cfg.check_consumed();
    if (relax) {
        theta = minimize_energy(spec, *sys.hamiltonian, theta, {}, ctx.workers).final_parameters;
    }
    const auto s =
        diagnostics::hessian_spectrum(spec, theta, *sys.hamiltonian, tol_neg, tol_zero, ctx.workers);
    diagnostics::Table t({"index", "eigenvalue"});
    t.annotate("n_params", static_cast<std::uint64_t>(spec.n_params()));
    t.annotate("n_negative", static_cast<std::uint64_t>(s.n_negative));
    t.annotate("n_near_zero", static_cast<std::uint64_t>(s.n_near_zero));
    t.annotate("energy", energy(spec, theta, *sys.hamiltonian));
    for (std::size_t i = 0; i < s.eigenvalues.size(); ++i) {
        t.add_row({std::to_string(i), diagnostics::format_real(s.eigenvalues[i])});
    }
    detail::echo_config(ctx, t);
    ctx.write_output(diagnostics::scan_filename("hessian", seed), t.csv());
    ctx.os() << s.eigenvalues.size() << " eigenvalues, " << s.n_negative << " below -" << tol_neg
             << ", " << s.n_near_zero << " within " << tol_zero << " of zero\n";
    return kExitOk;
}

inline int diag_tails(RunContext &ctx) {
    const auto base = chain_geometry(ctx);
    const auto cp = chain_params(ctx);
    const AnsatzSpec spec{base.size(), ctx.cfg.get_uint("ansatz", "depth", 4)};
    diagnostics::TailConfig tc;
    tc.n_samples = ctx.cfg.get_uint("tails", "samples", tc.n_samples);
    tc.sigma_pos = ctx.cfg.get_real("tails", "sigma_pos", tc.sigma_pos);
    tc.thresholds = ctx.cfg.get_reals("tails", "thresholds", tc.thresholds);
    const auto names = ctx.cfg.get_strings("tails", "strategies",
                                           std::vector<std::string>{"random", "equivariant"});
    const auto bins = ctx.cfg.get_uint("tails", "histogram_bins", 40);
    const auto hist_max = ctx.cfg.get_real("tails", "histogram_max", 1.0);
    std::vector<diagnostics::InitStrategy> strategies;
    for (const auto &n : names) {
        if (n == "random") {
            strategies.push_back(diagnostics::random_strategy(spec));
        } else if (n == "zeros") {
            strategies.push_back(diagnostics::zeros_strategy(spec));
        } else if (n == "equivariant") {
            strategies.push_back(
                diagnostics::equivariant_strategy(load_model_key(ctx, "tails", "model"), spec));
        } else {
            throw ConfigError("unknown tails strategy '" + n + "'");
        }
    }
    tc.seed = ctx.seed();
    tc.workers = ctx.workers;
    ctx.cfg.check_consumed();
    const auto builder = [&](const MolecularGeometry &g) { return build_chain_model(g, cp); };
    std::vector<std::pair<std::string, diagnostics::TailStats>> rows;
    for (const auto &s : strategies) {
        const auto r = diagnostics::init_error_tail(s, builder, base, spec, tc);
        rows.emplace_back(s.name, r.stats);
        auto h = diagnostics::histogram_table(r.delta_e, 0.0, hist_max, bins);
        detail::echo_config(ctx, h);
        ctx.write_output(diagnostics::scan_filename("tails_hist_" + s.name, tc.seed), h.csv());
    }
    detail::write_scan(ctx, "tails", tc.seed, diagnostics::tail_table(rows));
    return kExitOk;
}

inline int diag_disorder(RunContext &ctx) {
    diagnostics::DisorderScanConfig dc;
    dc.base = chain_geometry(ctx);
    dc.chain = chain_params(ctx);
    dc.spec = AnsatzSpec{dc.base.size(), ctx.cfg.get_uint("ansatz", "depth", 4)};
    dc.sigma_grid = ctx.cfg.get_reals("disorder", "sigma_grid", dc.sigma_grid);
    dc.strategies.clear();
    for (const auto &s : ctx.cfg.get_strings(
             "disorder", "strategies", std::vector<std::string>{"random", "equivariant", "hybrid"})) {
        try {
            dc.strategies.push_back(diagnostics::strategy_from_string(s));
        } catch (const ValidationError &e) {
            throw ConfigError(e.what());
        }
    }
    dc.budget = ctx.cfg.get_uint("disorder", "budget", dc.budget);
    dc.threshold = ctx.cfg.get_real("disorder", "threshold", dc.threshold);
    dc.n_trials = ctx.cfg.get_uint("disorder", "trials", dc.n_trials);
    dc.hybrid_restarts = ctx.cfg.get_uint("disorder", "hybrid_restarts", dc.hybrid_restarts);
    dc.sigma_restart = ctx.cfg.get_real("disorder", "sigma_restart", dc.sigma_restart);
    dc.n_shots = ctx.cfg.get_uint("disorder", "n_shots", dc.n_shots);
    dc.spsa = spsa_config(ctx, "spsa");
    bool needs_model = false;
    for (auto s : dc.strategies) {
        needs_model = needs_model || s != diagnostics::Strategy::random;
    }
    if (needs_model) {
        dc.model = load_model_key(ctx, "disorder", "model");
    }
    dc.seed = ctx.seed();
    dc.workers = ctx.workers;
    ctx.cfg.check_consumed();
    const auto r = diagnostics::disorder_success_scan(dc);
    auto t = diagnostics::disorder_table(r);
    for (auto s : dc.strategies) {
        t.annotate("grid_average_" + diagnostics::to_string(s), r.grid_average(s));
    }
    detail::write_scan(ctx, "disorder", dc.seed, std::move(t));
    return kExitOk;
}

inline int diag_landscape(RunContext &ctx) {
    const auto sys = load_system(ctx);
    const auto spec = load_spec(ctx, sys.hamiltonian->n_qubits());
    const auto center = initial_theta(ctx, sys, spec);
    const auto dirs = ctx.cfg.get_string("landscape", "directions", std::string("hessian"));
    const real_t half_a = ctx.cfg.get_real("landscape", "half_a", 1.0);
    const real_t half_b = ctx.cfg.get_real("landscape", "half_b", 1.0);
    const auto res = ctx.cfg.get_uint("landscape", "resolution", 21);
    std::vector<real_t> d1(spec.n_params(), 0.0);
    std::vector<real_t> d2(spec.n_params(), 0.0);
    std::uint64_t seed = 0;
    if (dirs == "hessian") {
        ctx.cfg.check_consumed();
        // Leading two eigenvectors of the Hessian at the centre.
        if (spec.n_params() > diagnostics::kHessianMaxParams) {
            throw ConfigError("landscape: too many parameters for Hessian directions");
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
            hessian(spec, center, *sys.hamiltonian, ctx.workers));
        const auto p = static_cast<Eigen::Index>(spec.n_params());
        for (Eigen::Index i = 0; i < p; ++i) {
            d1[static_cast<std::size_t>(i)] = es.eigenvectors()(i, p - 1);
            d2[static_cast<std::size_t>(i)] = p > 1 ? es.eigenvectors()(i, p - 2) : 0.0;
        }
    } else if (dirs == "axes") {
        const auto i = ctx.cfg.get_uint("landscape", "axis_a", 0);
        const auto j = ctx.cfg.get_uint("landscape", "axis_b", 1);
        ctx.cfg.check_consumed();
        if (i >= d1.size() || j >= d2.size() || i == j) {
            throw ConfigError("landscape: axis_a and axis_b must be distinct parameter indices");
        }
        d1[i] = 1.0;
        d2[j] = 1.0;
    } else if (dirs == "random") {
        seed = ctx.seed();
        ctx.cfg.check_consumed();
        std::mt19937_64 rng(seed);
        std::normal_distribution<real_t> nd;
        Eigen::MatrixXd q(d1.size(), 2);
        for (Eigen::Index i = 0; i < q.size(); ++i) {
            q.data()[i] = nd(rng);
        }
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(q);
        const Eigen::MatrixXd basis = qr.householderQ() * Eigen::MatrixXd::Identity(q.rows(), 2);
        for (std::size_t i = 0; i < d1.size(); ++i) {
            d1[i] = basis(static_cast<Eigen::Index>(i), 0);
            d2[i] = basis(static_cast<Eigen::Index>(i), 1);
        }
    } else {
        throw ConfigError("landscape.directions must be hessian, axes or random");
    }
    if (spec.n_params() < 2) {
        throw ConfigError("landscape needs at least two parameters");
    }
    const auto pts = diagnostics::landscape_grid(spec, center, d1, d2, half_a, half_b, res,
                                                 *sys.hamiltonian, ctx.workers);
    auto t = diagnostics::landscape_table(pts);
    detail::echo_config(ctx, t);
    ctx.write_output(diagnostics::scan_filename("landscape", seed), t.csv());
    ctx.os() << pts.size() << " landscape points\n";
    return kExitOk;
}

inline int diag_shots(RunContext &ctx) {
    const auto variances =
        ctx.cfg.get_reals("shots", "variances", std::vector<real_t>{1.0, 2.5, 25.0});
    const real_t eps = ctx.cfg.get_real("shots", "epsilon", kChemicalAccuracy);
    const auto disc = ctx.cfg.get_uint("shots", "steps_discovery", 0);
    const auto local = ctx.cfg.get_uint("shots", "steps_local", 0);
    const auto seed = ctx.cfg.get_uint("run", "seed", 0);
    ctx.cfg.check_consumed();
    diagnostics::Table t({"variance", "epsilon", "n_shots", "steps_discovery", "steps_local",
                          "total_shots"});
    for (real_t v : variances) {
        const auto s = diagnostics::shot_cost(v, eps, disc, local);
        t.add_row({diagnostics::format_real(v), diagnostics::format_real(eps),
                   std::to_string(s.n_shots), std::to_string(disc), std::to_string(local),
                   diagnostics::format_real(s.total_cost)});
    }
    detail::write_scan(ctx, "shots", seed, std::move(t));
    return kExitOk;
}

inline int diag_benchmark(RunContext &ctx) {
    const auto files = ctx.cfg.get_strings("benchmark", "files");
    const auto depth = ctx.cfg.get_uint("ansatz", "depth", 4);
    std::shared_ptr<const precond::PreconditionerModel> model;
    if (ctx.cfg.has("benchmark", "model")) {
        model = load_model_key(ctx, "benchmark", "model");
    }
    const auto seed = ctx.cfg.get_uint("run", "seed", 0);
    ctx.cfg.check_consumed();
    std::vector<diagnostics::BenchmarkCase> cases;
    for (const auto &f : files) {
        ctx.manifest.add_input(f);
        auto h = std::make_shared<const QubitHamiltonian>(io::load_hamiltonian(f));
        const AnsatzSpec spec{h->n_qubits(), depth};
        cases.push_back({std::filesystem::path(f).stem().string(), h, spec, std::nullopt});
    }
    const auto rows = diagnostics::benchmark_table(cases, model.get());
    detail::write_scan(ctx, "benchmark", seed, diagnostics::benchmark_to_table(rows));
    return kExitOk;
}

inline int cmd_diagnose(RunContext &ctx, const std::string &sub) {
    if (sub == "gradvar") {
        return diag_gradvar(ctx);
    }
    if (sub == "hessian") {
        return diag_hessian(ctx);
    }
    if (sub == "tails") {
        return diag_tails(ctx);
    }
    if (sub == "disorder") {
        return diag_disorder(ctx);
    }
    if (sub == "landscape") {
        return diag_landscape(ctx);
    }
    if (sub == "shots") {
        return diag_shots(ctx);
    }
    if (sub == "benchmark") {
        return diag_benchmark(ctx);
    }
    throw ConfigError("unknown diagnose subcommand '" + sub + "'");
}

} // namespace basinvqe::cli
