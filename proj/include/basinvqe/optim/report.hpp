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

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "../common.hpp"

namespace basinvqe::optim {

using Objective = std::function<real_t(const std::vector<real_t> &)>;
using GradientFn = std::function<std::vector<real_t>(const std::vector<real_t> &)>;

enum class Termination { tolerance, max_evals, max_steps };

inline std::string to_string(Termination t) {
    switch (t) {
    case Termination::tolerance:
        return "tolerance";
    case Termination::max_evals:
        return "max_evals";
    case Termination::max_steps:
        return "max_steps";
    }
    return "unknown";
}

struct TracePoint {
    std::size_t evaluation_count = 0;
    real_t energy = 0.0;
};

struct OptimizerReport {
    std::vector<TracePoint> trace;
    std::vector<real_t> final_parameters;
    real_t final_energy = 0.0;
    Termination termination = Termination::max_steps;
    std::size_t evaluations_used = 0;
    std::size_t gradient_evaluations = 0;
    /// L-BFGS: iterations that fell back to a steepest-descent step.
    std::size_t fallback_steps = 0;
    /// SPSA / basin hopping: skipped steps (non-finite values, aborted hops).
    std::size_t skipped_steps = 0;
};

} // namespace basinvqe::optim
