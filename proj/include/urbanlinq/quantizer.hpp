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

#ifndef URBANLINQ_QUANTIZER_HPP
#define URBANLINQ_QUANTIZER_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "channel.hpp"
#include "common.hpp"

namespace ulinq {

/// Maps dB gains to one-hot codes of length p. Bins are left-closed /
/// right-open: a value equal to edge k lands in bin k+1.
struct Quantizer {
    int p = 8;
    std::vector<double> edges; // p-1 strictly increasing thresholds, dB
    double floor_db = -200.0;
    double ceil_db = 0.0;

    void validate() const {
        require(p >= 2, "quantizer needs p >= 2");
        require(int(edges.size()) == p - 1, "quantizer edge count mismatch");
        for (std::size_t k = 1; k < edges.size(); ++k)
            require(edges[k] > edges[k - 1], "quantizer edges must be strictly increasing");
    }

    int bin_of(double gain_db) const {
        require(!std::isnan(gain_db), "quantize: NaN input");
        double v = std::clamp(gain_db, floor_db, ceil_db);
        int bin = 0;
        for (double e : edges)
            if (v >= e) ++bin;
        return bin;
    }
};

inline std::vector<double> one_hot(int bin, int p) {
    std::vector<double> v(std::size_t(p), 0.0);
    v[std::size_t(bin)] = 1.0;
    return v;
}

inline std::vector<double> quantize(const Quantizer& q, double gain_db) {
    return one_hot(q.bin_of(gain_db), q.p);
}

/// Fit evenly spaced bin edges across the pooled dB-gain range. Cross
/// entries outnumber direct entries n:1, so quantile bins starve the
/// direct-gain feature of resolution; even spacing keeps both populations
/// distinguishable and is what the training recipe uses by default.
inline Quantizer fit_quantizer_uniform(const std::vector<ChannelMatrix>& train_matrices,
                                       int p = 8) {
    require(p >= 2, "fit_quantizer_uniform: p must be >= 2");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const ChannelMatrix& h : train_matrices)
        for (double g : h.g) {
            double db = linear_to_db(g);
            lo = std::min(lo, db);
            hi = std::max(hi, db);
        }
    require(lo < hi, "fit_quantizer_uniform: need a nonzero gain range");
    Quantizer q;
    q.p = p;
    q.floor_db = lo;
    q.ceil_db = hi;
    for (int k = 1; k < p; ++k) q.edges.push_back(lo + (hi - lo) * double(k) / double(p));
    q.validate();
    return q;
}

/// Fit bin edges at the k/p quantiles of the pooled dB-gain distribution
/// (direct and cross entries pooled). Requires at least p distinct values.
inline Quantizer fit_quantizer(const std::vector<ChannelMatrix>& train_matrices, int p = 8) {
    require(p >= 2, "fit_quantizer: p must be >= 2");
    std::vector<double> pool;
    for (const ChannelMatrix& h : train_matrices)
        for (double g : h.g) pool.push_back(linear_to_db(g));
    require(!pool.empty(), "fit_quantizer: no data");
    std::sort(pool.begin(), pool.end());

    std::vector<double> distinct;
    for (double v : pool)
        if (distinct.empty() || v != distinct.back()) distinct.push_back(v);
    require(int(distinct.size()) >= p,
            "fit_quantizer: need at least p distinct values, got " +
                std::to_string(distinct.size()));

    Quantizer q;
    q.p = p;
    q.floor_db = pool.front();
    q.ceil_db = pool.back();
    const std::size_t m = pool.size();
    for (int k = 1; k < p; ++k)
        q.edges.push_back(pool[std::size_t(m * std::size_t(k) / std::size_t(p))]);

    // heavy duplicate mass can collapse quantile edges; fall back to
    // quantiles of the distinct values, which are increasing by construction
    bool strict = true;
    for (std::size_t k = 1; k < q.edges.size(); ++k)
        if (q.edges[k] <= q.edges[k - 1]) strict = false;
    if (!strict) {
        q.edges.clear();
        const std::size_t d = distinct.size();
        for (int k = 1; k < p; ++k)
            q.edges.push_back(distinct[std::size_t(d * std::size_t(k) / std::size_t(p))]);
    }
    q.validate();
    return q;
}

} // namespace ulinq

#endif
