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

#ifndef URBANLINQ_EMBED_HPP
#define URBANLINQ_EMBED_HPP

#include <cmath>
#include <string>
#include <vector>

#include "fileio.hpp"
#include "linkgraph.hpp"
#include "mat.hpp"
#include "quantizer.hpp"
#include "schedule.hpp"

namespace ulinq {

/// Mean-field graph embedding plus a two-layer per-node classifier.
///
/// Per iteration, synchronously for all nodes:
///   mu_i <- relu(W1 a_ii + W2 sum_j a_ji + W3 sum_j mu_j)
/// with a_ii the one-hot node feature, a_ji the one-hot in-edge features and
/// both sums over the in-neighbor set. After T iterations each node is
/// classified independently: logits = C2 relu(C1 mu_i). No bias terms.
struct EmbedModel {
    Quantizer q;
    int hidden_dim = 32;
    int t_iters = 2;
    Mat w1; // hidden x p
    Mat w2; // hidden x p
    Mat w3; // hidden x hidden
    Mat c1; // classifier hidden (64) x hidden
    Mat c2; // 2 x classifier hidden

    void validate() const {
        q.validate();
        require(w1.rows == hidden_dim && w1.cols == q.p, "W1 shape mismatch");
        require(w2.rows == hidden_dim && w2.cols == q.p, "W2 shape mismatch");
        require(w3.rows == hidden_dim && w3.cols == hidden_dim, "W3 shape mismatch");
        require(c1.cols == hidden_dim && c2.cols == c1.rows && c2.rows == 2,
                "classifier shape mismatch");
        for (const Mat* m : {&w1, &w2, &w3, &c1, &c2})
            for (double v : m->a) require(std::isfinite(v), "non-finite model weight");
    }
};

/// Seeded init, uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] per matrix.
inline EmbedModel init_embed_model(const Quantizer& q, std::uint64_t seed, int hidden_dim = 32,
                                   int t_iters = 2, int classifier_hidden = 64) {
    EmbedModel m;
    m.q = q;
    m.hidden_dim = hidden_dim;
    m.t_iters = t_iters;
    m.w1 = Mat(hidden_dim, q.p);
    m.w2 = Mat(hidden_dim, q.p);
    m.w3 = Mat(hidden_dim, hidden_dim);
    m.c1 = Mat(classifier_hidden, hidden_dim);
    m.c2 = Mat(2, classifier_hidden);
    Rng rng(seed);
    auto init = [&rng](Mat& w) {
        double bound = 1.0 / std::sqrt(double(w.cols));
        w.fill_uniform(rng, -bound, bound);
    };
    init(m.w1);
    init(m.w2);
    init(m.w3);
    init(m.c1);
    init(m.c2);
    return m;
}

inline double relu(double v) { return v > 0.0 ? v : 0.0; }

/// Run the mean-field iterations; returns one hidden vector per node.
inline std::vector<std::vector<double>> embed_forward(const EmbedModel& m, const LinkGraph& g) {
    require(g.p == m.q.p, "graph/model feature dimension mismatch");
    const int n = g.n, d = m.hidden_dim;

    // W1 a_ii and W2 sum_j a_ji are constant across iterations
    std::vector<std::vector<double>> base(std::size_t(n), std::vector<double>(std::size_t(d), 0.0));
    for (int i = 0; i < n; ++i) {
        std::vector<double> esum(std::size_t(g.p), 0.0);
        for (int b : g.edge_bin[std::size_t(i)]) esum[std::size_t(b)] += 1.0;
        std::vector<double> tmp;
        m.w2.matvec(esum, tmp);
        for (int r = 0; r < d; ++r)
            base[std::size_t(i)][std::size_t(r)] =
                m.w1(r, g.node_bin[std::size_t(i)]) + tmp[std::size_t(r)];
    }

    std::vector<std::vector<double>> mu(std::size_t(n), std::vector<double>(std::size_t(d), 0.0));
    std::vector<std::vector<double>> nxt = mu;
    std::vector<double> nbr_sum(std::size_t(d), 0.0), w3s;
    for (int t = 0; t < m.t_iters; ++t) {
        for (int i = 0; i < n; ++i) {
            std::fill(nbr_sum.begin(), nbr_sum.end(), 0.0);
            for (int j : g.in_neighbors[std::size_t(i)]) axpy(1.0, mu[std::size_t(j)], nbr_sum);
            m.w3.matvec(nbr_sum, w3s);
            for (int r = 0; r < d; ++r) {
                double pre = base[std::size_t(i)][std::size_t(r)] + w3s[std::size_t(r)];
                require(std::isfinite(pre), "non-finite embedding activation");
                nxt[std::size_t(i)][std::size_t(r)] = relu(pre);
            }
        }
        mu.swap(nxt);
    }
    return mu;
}

struct Classified {
    std::vector<double> prob_active; // per node
    Schedule schedule;               // x_i = (prob_active >= 0.5)
};

inline std::vector<double> classifier_logits(const EmbedModel& m, const std::vector<double>& mu) {
    std::vector<double> h, z;
    m.c1.matvec(mu, h);
    for (double& v : h) v = relu(v);
    m.c2.matvec(h, z);
    return z; // [logit_off, logit_on]
}

inline double prob_from_logits(const std::vector<double>& z) {
    // 2-class softmax, stable
    double mx = std::max(z[0], z[1]);
    double e0 = std::exp(z[0] - mx), e1 = std::exp(z[1] - mx);
    return e1 / (e0 + e1);
}

inline Classified classify(const EmbedModel& m, const std::vector<std::vector<double>>& mu) {
    Classified out;
    out.prob_active.reserve(mu.size());
    out.schedule.x.reserve(mu.size());
    for (const auto& v : mu) {
        double p = prob_from_logits(classifier_logits(m, v));
        require(std::isfinite(p), "non-finite classifier output");
        out.prob_active.push_back(p);
        out.schedule.x.push_back(p >= 0.5 ? 1 : 0);
    }
    out.schedule.relaxed = out.prob_active;
    return out;
}

/// End-to-end prediction from a channel matrix.
inline Classified predict(const EmbedModel& m, const ChannelMatrix& h,
                          const Adjacency& adj = Adjacency::full()) {
    LinkGraph g = build_graph(h, m.q, adj);
    return classify(m, embed_forward(m, g));
}

// --- model file: JSON header line + f32 blobs W1,W2,W3,C1,C2 (row-major) ---

inline void save_model(const EmbedModel& m, const std::filesystem::path& path) {
    m.validate();
    json h;
    h["format"] = "urbanlinq-model-v1";
    h["p"] = m.q.p;
    h["hidden_dim"] = m.hidden_dim;
    h["classifier_hidden"] = m.c1.rows;
    h["T"] = m.t_iters;
    h["activation"] = "relu";
    h["quantizer"] = {{"edges", m.q.edges}, {"floor_db", m.q.floor_db}, {"ceil_db", m.q.ceil_db}};
    h["blob_order"] = {"W1", "W2", "W3", "C1", "C2"};
    std::string blob;
    for (const Mat* w : {&m.w1, &m.w2, &m.w3, &m.c1, &m.c2})
        for (double v : w->a) append_f32le(blob, float(v));
    write_header_blob(path, h, blob);
}

inline EmbedModel load_model(const std::filesystem::path& path) {
    auto hb = read_header_blob(path);
    require(hb.header.value("format", "") == "urbanlinq-model-v1",
            "not a model file: " + path.string());
    EmbedModel m;
    m.q.p = hb.header.at("p").get<int>();
    m.q.edges = hb.header.at("quantizer").at("edges").get<std::vector<double>>();
    m.q.floor_db = hb.header.at("quantizer").at("floor_db").get<double>();
    m.q.ceil_db = hb.header.at("quantizer").at("ceil_db").get<double>();
    m.hidden_dim = hb.header.at("hidden_dim").get<int>();
    m.t_iters = hb.header.at("T").get<int>();
    int ch = hb.header.at("classifier_hidden").get<int>();
    m.w1 = Mat(m.hidden_dim, m.q.p);
    m.w2 = Mat(m.hidden_dim, m.q.p);
    m.w3 = Mat(m.hidden_dim, m.hidden_dim);
    m.c1 = Mat(ch, m.hidden_dim);
    m.c2 = Mat(2, ch);
    std::size_t off = 0;
    for (Mat* w : {&m.w1, &m.w2, &m.w3, &m.c1, &m.c2}) {
        w->a = unpack_f32le(hb.blob, off, w->a.size());
        off += w->a.size() * 4;
    }
    require(off == hb.blob.size(), "model blob size mismatch");
    m.validate();
    return m;
}

} // namespace ulinq

#endif
