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
#include <optional>
#include <string>
#include <thread>

#include "commands.hpp"
#include "diagnose.hpp"

namespace basinvqe::cli {

struct Invocation {
    std::string command;    // energy, optimize, labels, precond-train, precond-adapt, diagnose
    std::string subcommand; // diagnose only
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<unsigned> workers;
};

/**
 * Runs one command and returns its exit code: 0 success, 2 configuration or
 * validation error, 3 numerical failure. A manifest is written to the output
 * directory whenever that directory could be created.
 */
inline int run(const Invocation &inv, std::ostream &out = std::cout,
               std::ostream &err = std::cerr) {
    const auto t0 = std::chrono::steady_clock::now();
    RunContext ctx;
    ctx.log = &out;
    ctx.manifest.command = inv.command + (inv.subcommand.empty() ? "" : " " + inv.subcommand);
    bool have_out = false;
    int code = kExitOk;
    try {
        ctx.cfg = inv.config_path.empty() ? RunConfig{} : RunConfig::load(inv.config_path);
        if (inv.seed) {
            ctx.cfg.set("run", "seed", std::to_string(*inv.seed));
        }
        if (inv.out) {
            ctx.cfg.set("run", "out", *inv.out);
        }
        if (inv.workers) {
            ctx.cfg.set("run", "workers", std::to_string(*inv.workers));
        }
        if (!inv.config_path.empty()) {
            ctx.manifest.add_input(inv.config_path);
        }
        ctx.out = ctx.cfg.get_string("run", "out", std::string("."));
        const auto hw = std::max(1U, std::thread::hardware_concurrency());
        ctx.workers = static_cast<unsigned>(ctx.cfg.get_uint("run", "workers", hw));
        if (ctx.workers == 0) {
            throw ConfigError("run.workers must be positive");
        }
        std::error_code ec;
        std::filesystem::create_directories(ctx.out, ec);
        if (ec) {
            throw ConfigError("cannot create output directory '" + ctx.out.string() +
                              "': " + ec.message());
        }
        have_out = true;
        if (inv.command == "energy") {
            code = cmd_energy(ctx);
        } else if (inv.command == "optimize") {
            code = cmd_optimize(ctx);
        } else if (inv.command == "labels") {
            code = cmd_labels(ctx);
        } else if (inv.command == "precond-train") {
            code = cmd_precond_train(ctx);
        } else if (inv.command == "precond-adapt") {
            code = cmd_precond_adapt(ctx);
        } else if (inv.command == "diagnose") {
            code = cmd_diagnose(ctx, inv.subcommand);
        } else {
            throw ConfigError("unknown command '" + inv.command + "'");
        }
    } catch (const NumericalError &e) {
        code = kExitNumerical;
        ctx.manifest.error = e.what();
    } catch (const ConfigError &e) {
        code = kExitConfig;
        ctx.manifest.error = e.what();
    } catch (const ValidationError &e) {
        code = kExitConfig;
        ctx.manifest.error = e.what();
    } catch (const std::exception &e) {
        code = kExitNumerical;
        ctx.manifest.error = e.what();
    }
    if (!ctx.manifest.error.empty()) {
        err << "error: " << ctx.manifest.error << "\n";
    }
    ctx.manifest.exit_code = code;
    ctx.manifest.config = ctx.cfg.effective();
    ctx.manifest.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (have_out) {
        try {
            ctx.manifest.write(ctx.out);
        } catch (const std::exception &e) {
            err << "error: " << e.what() << "\n";
            return code == kExitOk ? kExitConfig : code;
        }
    }
    return code;
}

} // namespace basinvqe::cli
