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

#ifndef URBANLINQ_MAT_HPP
#define URBANLINQ_MAT_HPP

#include <cstddef>
#include <vector>

#include "common.hpp"
#include "rng.hpp"

namespace ulinq {

/// Dense row-major matrix, just large enough for the embedding model.
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(std::size_t(r) * c, 0.0) {}

    double operator()(int r, int c) const { return a[std::size_t(r) * cols + c]; }
    double& operator()(int r, int c) { return a[std::size_t(r) * cols + c]; }

    void zero() { std::fill(a.begin(), a.end(), 0.0); }

    /// y = M v
    void matvec(const std::vector<double>& v, std::vector<double>& y) const {
        y.assign(std::size_t(rows), 0.0);
        for (int r = 0; r < rows; ++r) {
            double acc = 0.0;
            const double* row = a.data() + std::size_t(r) * cols;
            for (int c = 0; c < cols; ++c) acc += row[std::size_t(c)] * v[std::size_t(c)];
            y[std::size_t(r)] = acc;
        }
    }

    /// y = M^T v
    void matvec_t(const std::vector<double>& v, std::vector<double>& y) const {
        y.assign(std::size_t(cols), 0.0);
        for (int r = 0; r < rows; ++r) {
            const double* row = a.data() + std::size_t(r) * cols;
            double vr = v[std::size_t(r)];
            for (int c = 0; c < cols; ++c) y[std::size_t(c)] += row[std::size_t(c)] * vr;
        }
    }

    /// M += d * v^T (outer product accumulation)
    void add_outer(const std::vector<double>& d, const std::vector<double>& v) {
        for (int r = 0; r < rows; ++r) {
            double* row = a.data() + std::size_t(r) * cols;
            double dr = d[std::size_t(r)];
            for (int c = 0; c < cols; ++c) row[std::size_t(c)] += dr * v[std::size_t(c)];
        }
    }

    void fill_uniform(Rng& rng, double lo, double hi) {
        for (double& v : a) v = rng.uniform(lo, hi);
    }
};

inline void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

} // namespace ulinq

#endif
