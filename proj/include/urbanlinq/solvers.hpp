/*
 * Copyright 2026 the urbanlinq authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef URBANLINQ_SOLVERS_HPP
#define URBANLINQ_SOLVERS_HPP

#include <algorithm>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include "schedule.hpp"

namespace ulinq {

struct FplinqOptions {
    int max_iter = 100;
    double tol = 1e-5;
    double round_threshold = 0.5;
    /// Observer called after every iteration with the relaxed vector
    /// (used by tests to watch the trajectory).
    std::function<void(int, std::span<const double>)> observer;
};

struct FplinqResult {
    Schedule schedule;
    int iterations = 0;
};

namespace detail {

/// Discretize a relaxed activation vector. Threshold rounding alone loses a
/// lot of sum rate when the relaxation parks several mutually interfering
/// links at fractional values, so the best of a small deterministic candidate
/// family is taken instead: the thresholded vector plus every prefix under
/// the relaxed-value and direct-gain orderings, refined by flip/exchange
/// ascent to a local maximum. Ties break toward fewer active links, then the
/// lexicographically smallest vector, so labels stay reproducible.
inline std::vector<std::uint8_t> discretize_relaxed(const ChannelMatrix& h,
                                                    const RadioParams& rp,
                                                    const std::vector<double>& relaxed,
                                                    double round_threshold) {
    const int n = h.n;
    auto rate_of = [&](const std::vector<std::uint8_t>& xb) {
        std::vector<double> x(std::size_t(n), 0.0);
        for (int i = 0; i < n; ++i) x[std::size_t(i)] = xb[std::size_t(i)] ? 1.0 : 0.0;
        return sum_rate(h, rp, x);
    };
    auto better = [&](double rate_a, const std::vector<std::uint8_t>& a, double rate_b,
                      const std::vector<std::uint8_t>& b) {
        if (rate_a != rate_b) return rate_a > rate_b;
        int ca = 0, cb = 0;
        for (int i = 0; i < n; ++i) {
            ca += a[std::size_t(i)];
            cb += b[std::size_t(i)];
        }
        if (ca != cb) return ca < cb;
        return a < b;
    };

    std::vector<std::uint8_t> best(std::size_t(n), 0);
    for (int i = 0; i < n; ++i)
        best[std::size_t(i)] = relaxed[std::size_t(i)] > round_threshold ? 1 : 0;
    double best_rate = rate_of(best);

    // prefix families under two orderings: the relaxation's ranking and the
    // direct-gain ranking (the latter rescues links the relaxation parked
    // low despite a dominant direct channel)
    auto try_prefixes = [&](auto key_less) {
        std::vector<int> order(std::size_t(n), 0);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), key_less);
        std::vector<std::uint8_t> prefix(std::size_t(n), 0);
        for (int k = 0; k < n; ++k) {
            prefix[std::size_t(order[std::size_t(k)])] = 1;
            double r = rate_of(prefix);
            if (better(r, prefix, best_rate, best)) {
                best = prefix;
                best_rate = r;
            }
        }
    };
    try_prefixes([&](int a, int b) { return relaxed[std::size_t(a)] > relaxed[std::size_t(b)]; });
    try_prefixes([&](int a, int b) { return h.direct(a) > h.direct(b); });

    // deterministic ascent: single flips, then on<->off exchanges to escape
    // subsets a single flip cannot leave
    for (int sweep = 0; sweep < 2 * n; ++sweep) {
        bool moved = false;
        for (int i = 0; i < n; ++i) {
            std::vector<std::uint8_t> trial = best;
            trial[std::size_t(i)] ^= 1;
            double r = rate_of(trial);
            if (r > best_rate) {
                best = std::move(trial);
                best_rate = r;
                moved = true;
            }
        }
        for (int i = 0; i < n && !moved; ++i) {
            if (!best[std::size_t(i)]) continue;
            for (int j = 0; j < n; ++j) {
                if (best[std::size_t(j)]) continue;
                std::vector<std::uint8_t> trial = best;
                trial[std::size_t(i)] = 0;
                trial[std::size_t(j)] = 1;
                double r = rate_of(trial);
                if (r > best_rate) {
                    best = std::move(trial);
                    best_rate = r;
                    moved = true;
                    break;
                }
            }
        }
        if (!moved) break;
    }
    return best;
}

} // namespace detail

/// Fractional-programming scheduler. Starting from the all-ones relaxation,
/// alternate closed-form updates of the SINR estimates, the quadratic
/// transform auxiliaries and the relaxed activations until the activations
/// stop moving, then discretize (threshold + candidate comparison + flip
/// ascent). The returned relaxed values are the pre-rounding iterate.
inline FplinqResult fplinq_solve(const ChannelMatrix& h, const RadioParams& rp,
                                 std::vector<double> weights = {},
                                 const FplinqOptions& opts = {}) {
    h.validate();
    rp.validate();
    const int n = h.n;
    if (weights.empty()) weights.assign(std::size_t(n), 1.0);
    require(int(weights.size()) == n, "fplinq: weight vector length mismatch");
    for (double w : weights) require(w > 0.0, "fplinq: weights must be positive");

    const double p = rp.p_lin_mw;
    std::vector<double> x(std::size_t(n), 1.0);
    std::vector<double> y(std::size_t(n), 0.0);

    auto check_finite = [&](double v, const char* where) {
        if (!std::isfinite(v))
            throw error(std::string("fplinq: non-finite value in ") + where);
        return v;
    };

    int iter = 0;
    for (; iter < opts.max_iter; ++iter) {
        std::vector<double> gamma = sinr(h, rp, x);

        // auxiliary update: y_i = sqrt(w_i (1+g_i) x_i p g_ii) / (s^2 + sum_j x_j p g_ji)
        for (int i = 0; i < n; ++i) {
            double denom = rp.sigma2_lin_mw;
            for (int j = 0; j < n; ++j) denom += x[std::size_t(j)] * p * h(j, i);
            double num = std::sqrt(weights[std::size_t(i)] * (1.0 + gamma[std::size_t(i)]) *
                                   x[std::size_t(i)] * p * h.direct(i));
            y[std::size_t(i)] = check_finite(num / denom, "auxiliary update");
        }

        // activation update: x_i = min(1, (a_i / b_i)^2) with
        // a_i = y_i sqrt(w_i (1+g_i) p g_ii), b_i = p sum_j y_j^2 g(i,j)
        double max_delta = 0.0;
        for (int i = 0; i < n; ++i) {
            double a = y[std::size_t(i)] *
                       std::sqrt(weights[std::size_t(i)] * (1.0 + gamma[std::size_t(i)]) * p *
                                 h.direct(i));
            double b = 0.0;
            for (int j = 0; j < n; ++j)
                b += y[std::size_t(j)] * y[std::size_t(j)] * h(i, j);
            b *= p;
            double nx;
            if (b > 0.0) {
                double ratio = a / b;
                nx = std::min(1.0, ratio * ratio);
            } else {
                nx = a > 0.0 ? 1.0 : 0.0; // degenerate: no measured interference
            }
            check_finite(nx, "activation update");
            max_delta = std::max(max_delta, std::abs(nx - x[std::size_t(i)]));
            x[std::size_t(i)] = nx;
        }

        if (opts.observer) opts.observer(iter, std::span<const double>(x));
        if (max_delta < opts.tol) {
            ++iter;
            break;
        }
    }

    FplinqResult res;
    res.iterations = iter;
    res.schedule.relaxed = x;
    res.schedule.x = detail::discretize_relaxed(h, rp, x, opts.round_threshold);
    return res;
}

inline constexpr int kBruteForceMaxLinks = 20;

/// Exact maximizer of the sum rate over all 2^N activation vectors.
/// Ties break toward fewer active links, then the lexicographically
/// smallest vector. Guarded to N <= 20.
inline Schedule brute_force_solve(const ChannelMatrix& h, const RadioParams& rp) {
    h.validate();
    rp.validate();
    const int n = h.n;
    require(n <= kBruteForceMaxLinks,
            "brute force solver is limited to N <= " + std::to_string(kBruteForceMaxLinks) +
                " links (got " + std::to_string(n) + ")");

    std::vector<double> x(std::size_t(n), 0.0);
    std::vector<std::uint8_t> best_x;
    double best_rate = -1.0;
    int best_active = 0;

    auto lex_less = [n](const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
        for (int i = 0; i < n; ++i)
            if (a[std::size_t(i)] != b[std::size_t(i)]) return a[std::size_t(i)] < b[std::size_t(i)];
        return false;
    };

    std::vector<std::uint8_t> cand(std::size_t(n), 0);
    for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << n); ++mask) {
        int active = 0;
        for (int i = 0; i < n; ++i) {
            cand[std::size_t(i)] = (mask >> i) & 1u;
            x[std::size_t(i)] = cand[std::size_t(i)] ? 1.0 : 0.0;
            active += cand[std::size_t(i)];
        }
        double rate = sum_rate(h, rp, x);
        bool better = rate > best_rate;
        if (!better && rate == best_rate) {
            if (active < best_active)
                better = true;
            else if (active == best_active && lex_less(cand, best_x))
                better = true;
        }
        if (better) {
            best_rate = rate;
            best_active = active;
            best_x = cand;
        }
    }

    Schedule s;
    s.x = best_x;
    return s;
}

/// Baseline: consider links in order of decreasing direct gain and keep each
/// one only if it strictly increases the sum rate.
inline Schedule greedy_solve(const ChannelMatrix& h, const RadioParams& rp) {
    h.validate();
    rp.validate();
    const int n = h.n;
    std::vector<int> order(std::size_t(n), 0);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return h.direct(a) > h.direct(b); });

    Schedule s;
    s.x.assign(std::size_t(n), 0);
    std::vector<double> x(std::size_t(n), 0.0);
    double current = 0.0;
    for (int i : order) {
        x[std::size_t(i)] = 1.0;
        double trial = sum_rate(h, rp, x);
        if (trial > current) {
            current = trial;
            s.x[std::size_t(i)] = 1;
        } else {
            x[std::size_t(i)] = 0.0;
        }
    }
    return s;
}

} // namespace ulinq

#endif
