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
#include <deque>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "../common.hpp"
#include "report.hpp"

namespace basinvqe::optim {

struct LbfgsOptions {
    /// Stop when |E_t - E_{t-1}| < ftol on accepted iterates.
    real_t ftol = 1e-9;
    /// Stop when the gradient infinity norm drops below gtol.
    real_t gtol = 1e-9;
    std::size_t max_evals = 10000;
    std::size_t memory = 10;
    real_t c1 = 1e-4;
    real_t c2 = 0.9;
    /// Map final parameters to (-pi, pi] (periodic circuit angles).
    bool wrap_final_parameters = false;
};

namespace detail {

inline real_t dot(const std::vector<real_t> &a, const std::vector<real_t> &b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

inline real_t inf_norm(const std::vector<real_t> &v) {
    real_t m = 0.0;
    for (real_t x : v) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

inline std::vector<real_t> axpy(const std::vector<real_t> &x, real_t a,
                                const std::vector<real_t> &d) {
    std::vector<real_t> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        y[i] = x[i] + a * d[i];
    }
    return y;
}

/// Evaluation bookkeeping shared by the line search and the outer loop.
struct Evaluator {
    const Objective &f;
    const GradientFn &grad;
    std::size_t evals = 0;
    std::size_t grads = 0;

    real_t value(const std::vector<real_t> &x) {
        ++evals;
        const real_t v = f(x);
        if (!std::isfinite(v)) {
            throw NumericalError("objective returned a non-finite value after " +
                                 std::to_string(evals) + " evaluations");
        }
        return v;
    }

    std::vector<real_t> gradient(const std::vector<real_t> &x) {
        ++grads;
        auto g = grad(x);
        if (g.size() != x.size() || !all_finite(g)) {
            throw NumericalError("gradient is non-finite or has the wrong length");
        }
        return g;
    }
};

struct LinePoint {
    real_t alpha = 0.0;
    real_t value = 0.0;
    real_t slope = 0.0;
    std::vector<real_t> x;
    std::vector<real_t> g;
    bool has_slope = false;
};

/// Minimizer of the cubic interpolating (a, fa, da), (b, fb, db), safeguarded
/// to the middle 80% of the bracket; bisection when the cubic is degenerate.
inline real_t cubic_step(real_t a, real_t fa, real_t da, real_t b, real_t fb, real_t db) {
    const real_t lo = std::min(a, b);
    const real_t hi = std::max(a, b);
    const real_t d1 = da + db - 3.0 * (fa - fb) / (a - b);
    const real_t disc = d1 * d1 - da * db;
    real_t t = 0.5 * (a + b);
    if (disc >= 0.0) {
        const real_t d2 = std::copysign(std::sqrt(disc), b - a);
        const real_t denom = db - da + 2.0 * d2;
        if (std::abs(denom) > 0.0) {
            t = b - (b - a) * (db + d2 - d1) / denom;
        }
    }
    const real_t margin = 0.1 * (hi - lo);
    if (!std::isfinite(t) || t < lo + margin || t > hi - margin) {
        t = 0.5 * (a + b);
    }
    return t;
}

/**
 * Strong-Wolfe line search (bracketing phase followed by zoom). Returns
 * nullopt when no acceptable step is found within the iteration limits or
 * the evaluation budget.
 */
inline std::optional<LinePoint> strong_wolfe(Evaluator &ev, const std::vector<real_t> &x,
                                             real_t f0, const std::vector<real_t> &g0,
                                             const std::vector<real_t> &d, real_t alpha_init,
                                             const LbfgsOptions &opt) {
    const real_t slope0 = dot(g0, d);
    auto probe = [&](real_t alpha) {
        LinePoint p;
        p.alpha = alpha;
        p.x = axpy(x, alpha, d);
        p.value = ev.value(p.x);
        return p;
    };
    auto add_slope = [&](LinePoint &p) {
        p.g = ev.gradient(p.x);
        p.slope = dot(p.g, d);
        p.has_slope = true;
    };
    auto budget_left = [&] { return ev.evals < opt.max_evals; };

    auto zoom = [&](LinePoint lo, LinePoint hi) -> std::optional<LinePoint> {
        for (int it = 0; it < 40 && budget_left(); ++it) {
            real_t a = 0.5 * (lo.alpha + hi.alpha);
            if (lo.has_slope && hi.has_slope) {
                a = cubic_step(lo.alpha, lo.value, lo.slope, hi.alpha, hi.value, hi.slope);
            } else if (lo.has_slope) {
                // quadratic through (lo, f, f') and (hi, f)
                const real_t dx = hi.alpha - lo.alpha;
                const real_t denom = 2.0 * (hi.value - lo.value - lo.slope * dx);
                if (denom > 0.0) {
                    a = lo.alpha - lo.slope * dx * dx / denom;
                }
                const real_t lo_b = std::min(lo.alpha, hi.alpha);
                const real_t hi_b = std::max(lo.alpha, hi.alpha);
                const real_t margin = 0.1 * (hi_b - lo_b);
                if (!std::isfinite(a) || a < lo_b + margin || a > hi_b - margin) {
                    a = 0.5 * (lo.alpha + hi.alpha);
                }
            }
            if (std::abs(hi.alpha - lo.alpha) < 1e-14 * std::max(1.0, std::abs(lo.alpha))) {
                break;
            }
            LinePoint p = probe(a);
            if (p.value > f0 + opt.c1 * a * slope0 || p.value >= lo.value) {
                hi = std::move(p);
                continue;
            }
            add_slope(p);
            if (std::abs(p.slope) <= -opt.c2 * slope0) {
                return p;
            }
            if (p.slope * (hi.alpha - lo.alpha) >= 0.0) {
                hi = lo;
            }
            lo = std::move(p);
        }
        return std::nullopt;
    };

    LinePoint prev;
    prev.alpha = 0.0;
    prev.value = f0;
    prev.slope = slope0;
    prev.x = x;
    prev.g = g0;
    prev.has_slope = true;
    real_t alpha = alpha_init;
    for (int it = 0; it < 30 && budget_left(); ++it) {
        LinePoint p = probe(alpha);
        if (p.value > f0 + opt.c1 * alpha * slope0 || (it > 0 && p.value >= prev.value)) {
            return zoom(std::move(prev), std::move(p));
        }
        add_slope(p);
        if (std::abs(p.slope) <= -opt.c2 * slope0) {
            return p;
        }
        if (p.slope >= 0.0) {
            return zoom(std::move(p), std::move(prev));
        }
        prev = std::move(p);
        alpha *= 2.0;
    }
    return std::nullopt;
}

} // namespace detail

/**
 * Limited-memory BFGS (two-loop recursion, memory m) with a strong-Wolfe line
 * search. A failed line search falls back to a backtracking steepest-descent
 * step; if that cannot decrease the objective either, the run stops at the
 * current iterate. Only objective calls count toward max_evals.
 */
inline OptimizerReport minimize_lbfgs(const Objective &f, const GradientFn &grad,
                                      std::vector<real_t> x0, const LbfgsOptions &opt = {}) {
    detail::Evaluator ev{f, grad};
    OptimizerReport rep;
    std::vector<real_t> x = std::move(x0);
    real_t fx = ev.value(x);
    std::vector<real_t> g = ev.gradient(x);
    rep.trace.push_back({ev.evals, fx});

    std::deque<std::vector<real_t>> s_hist;
    std::deque<std::vector<real_t>> y_hist;
    std::deque<real_t> rho_hist;
    rep.termination = Termination::max_evals;

    while (true) {
        if (detail::inf_norm(g) < opt.gtol) {
            rep.termination = Termination::tolerance;
            break;
        }
        if (ev.evals >= opt.max_evals) {
            rep.termination = Termination::max_evals;
            break;
        }
        // two-loop recursion: d = -H g
        std::vector<real_t> q = g;
        std::vector<real_t> alphas(s_hist.size());
        for (std::size_t i = s_hist.size(); i-- > 0;) {
            alphas[i] = rho_hist[i] * detail::dot(s_hist[i], q);
            for (std::size_t k = 0; k < q.size(); ++k) {
                q[k] -= alphas[i] * y_hist[i][k];
            }
        }
        real_t gamma = 1.0;
        if (!s_hist.empty()) {
            gamma = detail::dot(s_hist.back(), y_hist.back()) /
                    detail::dot(y_hist.back(), y_hist.back());
        }
        for (auto &v : q) {
            v *= gamma;
        }
        for (std::size_t i = 0; i < s_hist.size(); ++i) {
            const real_t beta = rho_hist[i] * detail::dot(y_hist[i], q);
            for (std::size_t k = 0; k < q.size(); ++k) {
                q[k] += (alphas[i] - beta) * s_hist[i][k];
            }
        }
        std::vector<real_t> d(q.size());
        for (std::size_t k = 0; k < q.size(); ++k) {
            d[k] = -q[k];
        }
        real_t alpha_init = 1.0;
        if (s_hist.empty() || detail::dot(d, g) >= 0.0) {
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
            for (std::size_t k = 0; k < d.size(); ++k) {
                d[k] = -g[k];
            }
            alpha_init = std::min(1.0, 1.0 / detail::inf_norm(g));
        }

        auto step = detail::strong_wolfe(ev, x, fx, g, d, alpha_init, opt);
        if (!step) {
            ++rep.fallback_steps;
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
            // Backtracking Armijo along -g.
            const real_t gg = detail::dot(g, g);
            real_t a = std::min(1.0, 1.0 / detail::inf_norm(g));
            for (int it = 0; it < 50 && ev.evals < opt.max_evals; ++it, a *= 0.5) {
                auto xt = detail::axpy(x, -a, g);
                const real_t ft = ev.value(xt);
                if (ft <= fx - opt.c1 * a * gg) {
                    detail::LinePoint p;
                    p.alpha = a;
                    p.x = std::move(xt);
                    p.value = ft;
                    p.g = ev.gradient(p.x);
                    step = std::move(p);
                    break;
                }
            }
            if (!step) {
                rep.termination =
                    ev.evals >= opt.max_evals ? Termination::max_evals : Termination::tolerance;
                break;
            }
        }
        if (step->g.empty()) {
            step->g = ev.gradient(step->x);
        }
        std::vector<real_t> s(x.size());
        std::vector<real_t> y(x.size());
        for (std::size_t k = 0; k < x.size(); ++k) {
            s[k] = step->x[k] - x[k];
            y[k] = step->g[k] - g[k];
        }
        const real_t sy = detail::dot(s, y);
        if (sy > 1e-16 * std::sqrt(detail::dot(s, s) * detail::dot(y, y))) {
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(y));
            rho_hist.push_back(1.0 / sy);
            if (s_hist.size() > opt.memory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        const real_t f_prev = fx;
        x = std::move(step->x);
        fx = step->value;
        g = std::move(step->g);
        rep.trace.push_back({ev.evals, fx});
        if (std::abs(fx - f_prev) < opt.ftol) {
            rep.termination = Termination::tolerance;
            break;
        }
    }
    rep.final_parameters = opt.wrap_final_parameters ? wrap_angles(x) : x;
    rep.final_energy = fx;
    rep.evaluations_used = ev.evals;
    rep.gradient_evaluations = ev.grads;
    return rep;
}

} // namespace basinvqe::optim
