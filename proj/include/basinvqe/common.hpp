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
#include <complex>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace basinvqe {

using real_t = double;
using complex_t = std::complex<double>;

inline constexpr real_t kPi = std::numbers::pi;
/// Chemical accuracy in Hartree.
inline constexpr real_t kChemicalAccuracy = 1.6e-3;
inline constexpr const char *kVersion = "0.3.0";

/// Malformed input document or configuration value.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Input that parses but violates a documented invariant.
class ValidationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Non-finite values, solver non-convergence, divergence.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Canonical angle representative in (-pi, pi].
inline real_t wrap_angle(real_t a) {
    real_t w = std::remainder(a, 2.0 * kPi);
    if (w <= -kPi) {
        w += 2.0 * kPi;
    }
    return w;
}

inline std::vector<real_t> wrap_angles(std::vector<real_t> v) {
    for (auto &x : v) {
        x = wrap_angle(x);
    }
    return v;
}

/// Per-trial seed derivation (splitmix64 of seed ^ index). Stable across
/// platforms, unlike std::seed_seq.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = (seed ^ (index * 0x9E3779B97F4A7C15ULL)) + 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline unsigned default_workers() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1U : hw;
}

/**
 * Runs body(i) for i in [0, n) across at most `workers` threads. Work is
 * split into contiguous chunks, so any result written to slot i is
 * independent of the worker count. The first exception thrown by a worker
 * is rethrown on the calling thread.
 */
inline void parallel_for(std::size_t n, unsigned workers,
                         const std::function<void(std::size_t)> &body) {
    workers = std::max(1U, std::min<unsigned>(workers, static_cast<unsigned>(n)));
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            const std::size_t lo = w * chunk;
            const std::size_t hi = std::min(n, lo + chunk);
            try {
                for (std::size_t i = lo; i < hi; ++i) {
                    body(i);
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto &t : pool) {
        t.join();
    }
    for (auto &e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

inline bool all_finite(const std::vector<real_t> &v) {
    return std::all_of(v.begin(), v.end(), [](real_t x) { return std::isfinite(x); });
}

} // namespace basinvqe
