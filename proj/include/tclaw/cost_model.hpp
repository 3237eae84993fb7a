// Copyright 2026 The tclaw Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "tclaw/pauli.hpp"

// Runtime formulas for parallel collision search applied to T-count
// synthesis. Every result is in arbitrary cost units; multiply by a measured
// per-step time to get seconds. The formulas are kept in their usual closed
// forms, including their known looseness.
namespace tclaw::cost {

namespace detail {
inline void require_positive(double v, const char* what) {
    if (!(v > 0) || !std::isfinite(v)) {
        throw DomainError(std::string(what) + " must be positive and finite");
    }
}
inline void require_theta(double theta) {
    if (!(theta > 0) || theta > 1) throw DomainError("theta must lie in (0, 1]");
}
inline int ceil_half(int k) { return (k + 1) / 2; }
inline int floor_half(int k) { return k / 2; }
}  // namespace detail

/// Expected steps to find one collision with a full memory of w points:
/// N theta / w + 2 / theta.
inline double collision_steps(double N, double w, double theta) {
    detail::require_positive(N, "N");
    detail::require_positive(w, "w");
    detail::require_theta(theta);
    return N * theta / w + 2 / theta;
}

/// xi^(ceil(k/2) + floor(k/2)/2) / (sqrt(w) m) * tau.
inline double runtime_general(double xi, int k, double w, double m, double tau) {
    detail::require_positive(xi, "xi");
    detail::require_positive(k, "k");
    detail::require_positive(w, "w");
    detail::require_positive(m, "m");
    detail::require_positive(tau, "tau");
    const double e = detail::ceil_half(k) + 0.5 * detail::floor_half(k);
    return std::pow(xi, e) / std::sqrt(w) / m * tau;
}

/// runtime_general with tau = 2^(alpha n) ceil(k/2): the cost of multiplying
/// ceil(k/2) dense 2^n x 2^n unitaries.
inline double runtime_matmul(double xi, int k, double w, double m, double alpha, int n) {
    detail::require_positive(alpha, "alpha");
    detail::require_positive(n, "n");
    const double tau = std::pow(2.0, alpha * n) * detail::ceil_half(k);
    return runtime_general(xi, k, w, m, tau);
}

/// T-count form: 2^(n(2 alpha + 2 ceil(t/2) + floor(t/2))) ceil(t/2) / (sqrt(w) m).
inline double runtime_tcount(int n, int t, double w, double m, double alpha) {
    detail::require_positive(n, "n");
    detail::require_positive(t, "t");
    detail::require_positive(w, "w");
    detail::require_positive(m, "m");
    detail::require_positive(alpha, "alpha");
    const double e = n * (2 * alpha + 2 * detail::ceil_half(t) + detail::floor_half(t));
    return std::pow(2.0, e) / std::sqrt(w) / m * detail::ceil_half(t);
}

/// Refined estimate without optimizing theta:
/// ceil(t/2) / (2m) 4^(n(alpha + 1 + ceil(t/2))) (4^(n floor(t/2)) theta / w + 1 / theta).
inline double runtime_refined(int n, int t, double w, double m, double theta, double alpha) {
    detail::require_positive(n, "n");
    detail::require_positive(t, "t");
    detail::require_positive(w, "w");
    detail::require_positive(m, "m");
    detail::require_positive(alpha, "alpha");
    detail::require_theta(theta);
    const int c = detail::ceil_half(t), f = detail::floor_half(t);
    const double front = c / (2 * m) * std::pow(4.0, n * (alpha + 1 + c));
    return front * (std::pow(4.0, n * f) * theta / w + 1 / theta);
}

/// Large-memory limit of runtime_refined. Keeps the 1/2 of the refined
/// prefactor, so this is the exact w -> infinity limit.
inline double runtime_refined_limit(int n, int t, double m, double theta, double alpha) {
    detail::require_positive(n, "n");
    detail::require_positive(t, "t");
    detail::require_positive(m, "m");
    detail::require_positive(alpha, "alpha");
    detail::require_theta(theta);
    const int c = detail::ceil_half(t);
    return c * std::pow(4.0, n * (alpha + 1 + c)) / (2 * m * theta);
}

/// Continuous theta in (0, 1] minimizing runtime_refined, found numerically.
inline double optimal_theta(int n, int t, double w) {
    detail::require_positive(w, "w");
    // Only theta-dependent factor; minimize over log2(theta) in [-62, 0].
    const double space = std::pow(4.0, n * detail::floor_half(t));
    auto g = [&](double log_theta) {
        const double th = std::exp2(log_theta);
        return space * th / w + 1 / th;
    };
    const auto r = boost::math::tools::brent_find_minima(g, -62.0, 0.0,
                                                         std::numeric_limits<double>::digits / 2);
    return std::exp2(r.first);
}

/// Distinguished-point exponent e (theta = 2^-e) minimizing runtime_refined
/// over the integers [0, max_exp].
inline int optimal_theta_exp(int n, int t, double w, int max_exp = 62) {
    detail::require_positive(w, "w");
    int best = 0;
    double best_v = std::numeric_limits<double>::infinity();
    for (int e = 0; e <= max_exp; ++e) {
        const double v = runtime_refined(n, t, w, 1, std::exp2(-e), 2);
        if (v < best_v) {
            best_v = v;
            best = e;
        }
    }
    return best;
}

/// Converts cost units to seconds with a measured time per unit.
inline double calibrate(double cost_units, double seconds_per_unit) {
    detail::require_positive(seconds_per_unit, "seconds_per_unit");
    return cost_units * seconds_per_unit;
}

}  // namespace tclaw::cost
