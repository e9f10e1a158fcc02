// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Scalar search helpers shared by the solvers.

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace urllc::numeric {

/// Open-interval guard used for every probability search.
inline constexpr double kEpsilonMin = 1e-12;

struct ScalarMinimum {
    double x;
    double value;
};

/// Golden-section minimisation of a unimodal function on [lo, hi].
/// Stops when the bracket is narrower than `x_tol`.
template <typename F>
ScalarMinimum golden_section(F&& f, double lo, double hi, double x_tol, int max_iter = 500)
{
    constexpr double inv_phi = 0.6180339887498948482;
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int it = 0; it < max_iter && (b - a) > x_tol; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return fc < fd ? ScalarMinimum{c, fc} : ScalarMinimum{d, fd};
}

struct ScanMinimum {
    ScalarMinimum best;
    bool unimodal; ///< coarse scan showed a single decrease-then-increase
};

/// Coarse scan on `points` cell midpoints of [lo, hi]. If the sampled values
/// change direction at most once (down, then up), golden-section runs on the
/// whole interval; otherwise it refines the cell around the best sample.
/// Non-finite samples (infeasible points) count as +inf.
template <typename F>
ScanMinimum scan_then_golden(F&& f, double lo, double hi, int points, double x_tol)
{
    const auto eval = [&](double x) {
        const double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };
    const double step = (hi - lo) / points;
    std::vector<double> xs(static_cast<std::size_t>(points));
    std::vector<double> ys(xs.size());
    std::size_t best = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        xs[i] = lo + (static_cast<double>(i) + 0.5) * step;
        ys[i] = eval(xs[i]);
        if (ys[i] < ys[best]) {
            best = i;
        }
    }
    int direction = -1;
    int changes = 0;
    for (std::size_t i = 1; i < ys.size(); ++i) {
        const double dy = ys[i] - ys[i - 1];
        if (!(dy == dy) || dy == 0.0) {
            continue;
        }
        const int d = dy < 0.0 ? -1 : 1;
        if (d != direction) {
            ++changes;
            direction = d;
        }
    }
    const bool unimodal = changes <= 1 && std::isfinite(ys[best]);
    double a = lo;
    double b = hi;
    if (!unimodal) {
        a = best == 0 ? lo : xs[best - 1];
        b = best + 1 == xs.size() ? hi : xs[best + 1];
    }
    ScalarMinimum refined = golden_section(eval, a, b, x_tol);
    if (!(refined.value <= ys[best])) {
        refined = {xs[best], ys[best]};
    }
    return {refined, unimodal};
}

/// Bisection on a predicate that is false on [lo, x*) and true on [x*, hi].
/// Returns the final (false, true) bracket.
template <typename Pred>
std::pair<double, double> bisect_predicate(Pred&& pred, double lo, double hi, int iterations)
{
    for (int i = 0; i < iterations; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        if (pred(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return {lo, hi};
}

/// `count` points log-uniformly spaced on [lo, hi] (both positive).
inline std::vector<double> log_grid(double lo, double hi, std::size_t count)
{
    std::vector<double> out(count);
    if (count == 1) {
        out[0] = lo;
        return out;
    }
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
    }
    out.front() = lo;
    out.back() = hi;
    return out;
}

} // namespace urllc::numeric
