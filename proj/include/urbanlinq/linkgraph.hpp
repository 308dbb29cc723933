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

#ifndef URBANLINQ_LINKGRAPH_HPP
#define URBANLINQ_LINKGRAPH_HPP

#include <algorithm>
#include <numeric>
#include <vector>

#include "channel.hpp"
#include "common.hpp"
#include "quantizer.hpp"

namespace ulinq {

/// Directed interference graph: one node per link. Node features are the
/// quantized direct gains; the edge j -> i carries the quantized cross gain
/// g(j,i). in_neighbors[i] lists the j feeding node i.
struct LinkGraph {
    int n = 0;
    int p = 8;
    std::vector<int> node_bin;                   // length n
    std::vector<std::vector<int>> in_neighbors;  // per node, sorted ascending
    std::vector<std::vector<int>> edge_bin;      // aligned with in_neighbors

    void validate() const {
        require(int(node_bin.size()) == n && int(in_neighbors.size()) == n &&
                    int(edge_bin.size()) == n,
                "link graph shape mismatch");
        for (int i = 0; i < n; ++i) {
            require(node_bin[std::size_t(i)] >= 0 && node_bin[std::size_t(i)] < p,
                    "node feature out of range");
            require(in_neighbors[std::size_t(i)].size() == edge_bin[std::size_t(i)].size(),
                    "edge feature count mismatch");
            for (std::size_t k = 0; k < in_neighbors[std::size_t(i)].size(); ++k) {
                int j = in_neighbors[std::size_t(i)][k];
                require(j >= 0 && j < n && j != i, "bad neighbor index (self-loop?)");
                require(edge_bin[std::size_t(i)][k] >= 0 && edge_bin[std::size_t(i)][k] < p,
                        "edge feature out of range");
            }
        }
    }
};

struct Adjacency {
    enum class Kind { Full, TopK } kind = Kind::Full;
    int k = 0;

    static Adjacency full() { return {Kind::Full, 0}; }
    static Adjacency top_k(int k) {
        require(k >= 1, "top_k adjacency needs k >= 1");
        return {Kind::TopK, k};
    }
};

inline LinkGraph build_graph(const ChannelMatrix& h, const Quantizer& q,
                             const Adjacency& adj = Adjacency::full()) {
    h.validate();
    q.validate();
    LinkGraph g;
    g.n = h.n;
    g.p = q.p;
    g.node_bin.resize(std::size_t(h.n));
    g.in_neighbors.assign(std::size_t(h.n), {});
    g.edge_bin.assign(std::size_t(h.n), {});

    for (int i = 0; i < h.n; ++i)
        g.node_bin[std::size_t(i)] = q.bin_of(linear_to_db(h.direct(i)));

    for (int i = 0; i < h.n; ++i) {
        std::vector<int> js;
        for (int j = 0; j < h.n; ++j)
            if (j != i) js.push_back(j);
        if (adj.kind == Adjacency::Kind::TopK && int(js.size()) > adj.k) {
            // keep the k strongest interferers into receiver i
            std::stable_sort(js.begin(), js.end(),
                             [&](int a, int b) { return h(a, i) > h(b, i); });
            js.resize(std::size_t(adj.k));
            std::sort(js.begin(), js.end());
        }
        for (int j : js) {
            g.in_neighbors[std::size_t(i)].push_back(j);
            g.edge_bin[std::size_t(i)].push_back(q.bin_of(linear_to_db(h(j, i))));
        }
    }
    g.validate();
    return g;
}

} // namespace ulinq

#endif
