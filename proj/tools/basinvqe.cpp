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
#include <CLI11.hpp>

#include "basinvqe/cli/run.hpp"

int main(int argc, char **argv) {
    CLI::App app{"basinvqe: basin-aware VQE initialization and diagnostics"};
    app.set_version_flag("--version", std::string(basinvqe::kVersion));
    app.require_subcommand(1);

    basinvqe::cli::Invocation inv;
    std::uint64_t seed = 0;
    std::string out;
    unsigned workers = 0;
    auto add_common = [&](CLI::App *sub) {
        sub->add_option("--config", inv.config_path, "run configuration file");
        sub->add_option("--seed", seed, "seed (overrides run.seed)");
        sub->add_option("--out", out, "output directory (overrides run.out)");
        sub->add_option("--workers", workers, "worker cap (overrides run.workers)")
            ->check(CLI::PositiveNumber);
    };

    for (const char *name : {"energy", "optimize", "labels", "precond-train", "precond-adapt"}) {
        add_common(app.add_subcommand(name));
    }
    auto *diag = app.add_subcommand("diagnose", "diagnostic scans");
    diag->require_subcommand(1);
    for (const char *name :
         {"gradvar", "hessian", "tails", "disorder", "landscape", "shots", "benchmark"}) {
        add_common(diag->add_subcommand(name));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : basinvqe::cli::kExitConfig;
    }

    CLI::App *leaf = app.get_subcommands().front();
    inv.command = leaf->get_name();
    if (inv.command == "diagnose") {
        leaf = leaf->get_subcommands().front();
        inv.subcommand = leaf->get_name();
    }
    if (leaf->count("--seed") > 0) {
        inv.seed = seed;
    }
    if (leaf->count("--out") > 0) {
        inv.out = out;
    }
    if (leaf->count("--workers") > 0) {
        inv.workers = workers;
    }
    return basinvqe::cli::run(inv);
}
