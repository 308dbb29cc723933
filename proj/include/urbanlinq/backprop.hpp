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

#ifndef URBANLINQ_BACKPROP_HPP
#define URBANLINQ_BACKPROP_HPP

#include <array>
#include <cmath>
#include <vector>

#include "embed.hpp"

// Hand-derived gradients for the embedding model. The forward pass below
// mirrors embed_forward/classify but keeps every intermediate needed by the
// reverse pass, including the neighbor sums feeding the W3 recurrence.

namespace ulinq {

inline constexpr double kProbEps = 1e-7; // probability clamp before the logs

struct BceWeights {
    double w_on = 1.0;
    double w_off = 1.0;
};

struct LossGrad {
    double loss = 0.0;
    std::vector<std::array<double, 2>> dlogits; // per node, [d/dz_off, d/dz_on]
};

/// Weighted binary cross entropy over per-node activation probabilities:
///   L = -(1/N) sum_i [ w_on t_i log p_i + w_off (1-t_i) log(1-p_i) ]
/// with p clamped to [eps, 1-eps]. The returned gradient is with respect to
/// the two classifier logits of every node (p = softmax(z)[1]).
inline LossGrad weighted_bce_loss(const std::vector<double>& probs, const Schedule& targets,
                                  const BceWeights& w = {}) {
    require(probs.size() == targets.x.size(), "loss: prediction/target length mismatch");
    require(!probs.empty(), "loss: empty input");
    const double n = double(probs.size());
    LossGrad out;
    out.dlogits.assign(probs.size(), {0.0, 0.0});
    for (std::size_t i = 0; i < probs.size(); ++i) {
        double p = probs[i];
        require(!std::isnan(p), "loss: NaN probability");
        double pc = std::clamp(p, kProbEps, 1.0 - kProbEps);
        double t = targets.x[i] ? 1.0 : 0.0;
        out.loss -= (w.w_on * t * std::log(pc) + w.w_off * (1.0 - t) * std::log(1.0 - pc)) / n;

        double dl_dpc = -(w.w_on * t / pc - w.w_off * (1.0 - t) / (1.0 - pc)) / n;
        double clamp_pass = (p > kProbEps && p < 1.0 - kProbEps) ? 1.0 : 0.0;
        double dl_dzon = dl_dpc * clamp_pass * p * (1.0 - p);
        out.dlogits[i] = {-dl_dzon, dl_dzon};
    }
    return out;
}

struct ModelGrads {
    Mat w1, w2, w3, c1, c2;

    explicit ModelGrads(const EmbedModel& m)
        : w1(m.w1.rows, m.w1.cols),
          w2(m.w2.rows, m.w2.cols),
          w3(m.w3.rows, m.w3.cols),
          c1(m.c1.rows, m.c1.cols),
          c2(m.c2.rows, m.c2.cols) {}

    void zero() {
        for (Mat* g : {&w1, &w2, &w3, &c1, &c2}) g->zero();
    }
    void scale(double s) {
        for (Mat* g : {&w1, &w2, &w3, &c1, &c2})
            for (double& v : g->a) v *= s;
    }
    void add(const ModelGrads& o) {
        const Mat* src[5] = {&o.w1, &o.w2, &o.w3, &o.c1, &o.c2};
        Mat* dst[5] = {&w1, &w2, &w3, &c1, &c2};
        for (int k = 0; k < 5; ++k)
            for (std::size_t i = 0; i < dst[k]->a.size(); ++i) dst[k]->a[i] += src[k]->a[i];
    }
};

/// Everything the reverse pass needs from one forward evaluation.
struct ForwardTrace {
    std::vector<std::vector<double>> edge_sum; // s_i, length p
    std::vector<std::vector<std::vector<double>>> mu;       // [t = 0..T][i][d]
    std::vector<std::vector<std::vector<double>>> pre;      // [t = 0..T-1][i][d]
    std::vector<std::vector<std::vector<double>>> nbr_sum;  // [t = 0..T-1][i][d]
    std::vector<std::vector<double>> cls_pre; // classifier hidden pre-activation
    std::vector<std::vector<double>> cls_hid; // relu of the above
    std::vector<std::vector<double>> logits;  // per node, length 2
    std::vector<double> prob_active;
};

inline ForwardTrace forward_trace(const EmbedModel& m, const LinkGraph& g) {
    require(g.p == m.q.p, "graph/model feature dimension mismatch");
    const int n = g.n, d = m.hidden_dim, T = m.t_iters;
    ForwardTrace tr;

    tr.edge_sum.assign(std::size_t(n), std::vector<double>(std::size_t(g.p), 0.0));
    std::vector<std::vector<double>> base{std::size_t(n)};
    for (int i = 0; i < n; ++i) {
        for (int b : g.edge_bin[std::size_t(i)]) tr.edge_sum[std::size_t(i)][std::size_t(b)] += 1.0;
        std::vector<double> tmp;
        m.w2.matvec(tr.edge_sum[std::size_t(i)], tmp);
        for (int r = 0; r < d; ++r) tmp[std::size_t(r)] += m.w1(r, g.node_bin[std::size_t(i)]);
        base[std::size_t(i)] = std::move(tmp);
    }

    tr.mu.assign(std::size_t(T) + 1,
                 std::vector<std::vector<double>>(std::size_t(n),
                                                  std::vector<double>(std::size_t(d), 0.0)));
    tr.pre.assign(std::size_t(T), {});
    tr.nbr_sum.assign(std::size_t(T), {});
    std::vector<double> w3s;
    for (int t = 0; t < T; ++t) {
        tr.pre[std::size_t(t)].assign(std::size_t(n), std::vector<double>(std::size_t(d)));
        tr.nbr_sum[std::size_t(t)].assign(std::size_t(n), std::vector<double>(std::size_t(d), 0.0));
        for (int i = 0; i < n; ++i) {
            auto& ns = tr.nbr_sum[std::size_t(t)][std::size_t(i)];
            for (int j : g.in_neighbors[std::size_t(i)])
                axpy(1.0, tr.mu[std::size_t(t)][std::size_t(j)], ns);
            m.w3.matvec(ns, w3s);
            for (int r = 0; r < d; ++r) {
                double pre = base[std::size_t(i)][std::size_t(r)] + w3s[std::size_t(r)];
                require(std::isfinite(pre), "non-finite embedding activation");
                tr.pre[std::size_t(t)][std::size_t(i)][std::size_t(r)] = pre;
                tr.mu[std::size_t(t) + 1][std::size_t(i)][std::size_t(r)] = relu(pre);
            }
        }
    }

    tr.cls_pre.assign(std::size_t(n), {});
    tr.cls_hid.assign(std::size_t(n), {});
    tr.logits.assign(std::size_t(n), {});
    tr.prob_active.assign(std::size_t(n), 0.0);
    for (int i = 0; i < n; ++i) {
        m.c1.matvec(tr.mu[std::size_t(T)][std::size_t(i)], tr.cls_pre[std::size_t(i)]);
        tr.cls_hid[std::size_t(i)] = tr.cls_pre[std::size_t(i)];
        for (double& v : tr.cls_hid[std::size_t(i)]) v = relu(v);
        m.c2.matvec(tr.cls_hid[std::size_t(i)], tr.logits[std::size_t(i)]);
        tr.prob_active[std::size_t(i)] = prob_from_logits(tr.logits[std::size_t(i)]);
    }
    return tr;
}

/// Reverse pass: accumulates d(loss)/d(weights) into `grads` given the
/// per-node logit gradients. Walks the W3 recurrence back through all T
/// iterations, fanning each node's neighbor-sum gradient out over its
/// in-neighbors.
inline void backward(const EmbedModel& m, const LinkGraph& g, const ForwardTrace& tr,
                     const std::vector<std::array<double, 2>>& dlogits, ModelGrads& grads) {
    const int n = g.n, d = m.hidden_dim, T = m.t_iters;
    require(int(dlogits.size()) == n, "backward: gradient length mismatch");

    std::vector<std::vector<double>> dmu(std::size_t(n), std::vector<double>(std::size_t(d), 0.0));
    std::vector<double> dz(2), dhid, dpre_cls, tmp;

    for (int i = 0; i < n; ++i) {
        dz[0] = dlogits[std::size_t(i)][0];
        dz[1] = dlogits[std::size_t(i)][1];
        grads.c2.add_outer(dz, tr.cls_hid[std::size_t(i)]);
        m.c2.matvec_t(dz, dhid);
        dpre_cls = dhid;
        for (int r = 0; r < m.c1.rows; ++r)
            if (tr.cls_pre[std::size_t(i)][std::size_t(r)] <= 0.0) dpre_cls[std::size_t(r)] = 0.0;
        grads.c1.add_outer(dpre_cls, tr.mu[std::size_t(T)][std::size_t(i)]);
        m.c1.matvec_t(dpre_cls, tmp);
        axpy(1.0, tmp, dmu[std::size_t(i)]);
    }

    std::vector<double> dpre(std::size_t(d), 0.0), dns;
    std::vector<std::vector<double>> dmu_prev;
    for (int t = T - 1; t >= 0; --t) {
        dmu_prev.assign(std::size_t(n), std::vector<double>(std::size_t(d), 0.0));
        for (int i = 0; i < n; ++i) {
            for (int r = 0; r < d; ++r)
                dpre[std::size_t(r)] =
                    tr.pre[std::size_t(t)][std::size_t(i)][std::size_t(r)] > 0.0
                        ? dmu[std::size_t(i)][std::size_t(r)]
                        : 0.0;
            // W1 column touched by the one-hot node feature
            int nb = g.node_bin[std::size_t(i)];
            for (int r = 0; r < d; ++r) grads.w1(r, nb) += dpre[std::size_t(r)];
            grads.w2.add_outer(dpre, tr.edge_sum[std::size_t(i)]);
            grads.w3.add_outer(dpre, tr.nbr_sum[std::size_t(t)][std::size_t(i)]);
            m.w3.matvec_t(dpre, dns);
            for (int j : g.in_neighbors[std::size_t(i)]) axpy(1.0, dns, dmu_prev[std::size_t(j)]);
        }
        dmu.swap(dmu_prev);
    }
}

/// Loss and full weight gradient for one scenario.
inline double scenario_loss_grad(const EmbedModel& m, const LinkGraph& g, const Schedule& label,
                                 const BceWeights& w, ModelGrads& grads) {
    ForwardTrace tr = forward_trace(m, g);
    LossGrad lg = weighted_bce_loss(tr.prob_active, label, w);
    backward(m, g, tr, lg.dlogits, grads);
    return lg.loss;
}

} // namespace ulinq

#endif
