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

#ifndef URBANLINQ_TRAIN_HPP
#define URBANLINQ_TRAIN_HPP

#include <optional>
#include <sstream>
#include <vector>

#include "backprop.hpp"
#include "solvers.hpp"

namespace ulinq {

/// One supervised example: channel matrix, scheduling label, radio params
/// (the latter only for sum-rate validation).
struct TrainSample {
    ChannelMatrix h;
    Schedule label;
    RadioParams rp;
};

struct AdamState {
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    long step = 0;
    std::vector<std::vector<double>> m, v; // one pair per parameter tensor

    void init(const ModelGrads& shape) {
        const Mat* gs[5] = {&shape.w1, &shape.w2, &shape.w3, &shape.c1, &shape.c2};
        m.clear();
        v.clear();
        for (const Mat* g : gs) {
            m.emplace_back(g->a.size(), 0.0);
            v.emplace_back(g->a.size(), 0.0);
        }
    }

    void update(EmbedModel& model, const ModelGrads& grads, double lr) {
        ++step;
        double bc1 = 1.0 - std::pow(beta1, double(step));
        double bc2 = 1.0 - std::pow(beta2, double(step));
        Mat* ws[5] = {&model.w1, &model.w2, &model.w3, &model.c1, &model.c2};
        const Mat* gs[5] = {&grads.w1, &grads.w2, &grads.w3, &grads.c1, &grads.c2};
        for (int k = 0; k < 5; ++k) {
            auto& mk = m[std::size_t(k)];
            auto& vk = v[std::size_t(k)];
            for (std::size_t i = 0; i < mk.size(); ++i) {
                double gki = gs[k]->a[i];
                mk[i] = beta1 * mk[i] + (1.0 - beta1) * gki;
                vk[i] = beta2 * vk[i] + (1.0 - beta2) * gki * gki;
                ws[k]->a[i] -= lr * (mk[i] / bc1) / (std::sqrt(vk[i] / bc2) + eps);
            }
        }
    }
};

enum class QuantizerKind { Uniform, Quantile };

struct TrainConfig {
    double lr = 1e-3;
    double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;
    int epochs = 200;
    int batch_size = 8;
    BceWeights class_weights{4.0, 1.0};
    std::uint64_t seed = 1;
    int p_bins = 8;
    int hidden_dim = 32;
    int t_iters = 2;
    int classifier_hidden = 64;
    Adjacency adjacency = Adjacency::full();
    QuantizerKind quantizer = QuantizerKind::Uniform;
    int validate_every = 5; // epochs between validation passes
    bool verbose = false;
};

struct TrainResult {
    EmbedModel model; // best-validation weights (final weights if no val set)
    std::vector<double> epoch_loss;
    double best_val_ratio = 0.0;
    int best_epoch = -1;
};

/// Mean sum-rate ratio of the model's predictions against the label
/// schedules, on the samples' own channel matrices.
inline double mean_sum_rate_ratio(const EmbedModel& m, const std::vector<TrainSample>& samples,
                                  const std::vector<LinkGraph>& graphs) {
    if (samples.empty()) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        Classified c = classify(m, embed_forward(m, graphs[i]));
        double ref = sum_rate(samples[i].h, samples[i].rp, samples[i].label);
        double got = sum_rate(samples[i].h, samples[i].rp, c.schedule);
        acc += ref > 0.0 ? got / ref : 1.0; // degenerate all-off reference

    }
    return acc / double(samples.size());
}

namespace detail {
inline std::vector<LinkGraph> build_graphs(const std::vector<TrainSample>& samples,
                                           const Quantizer& q, const Adjacency& adj) {
    std::vector<LinkGraph> graphs;
    graphs.reserve(samples.size());
    for (const TrainSample& s : samples) graphs.push_back(build_graph(s.h, q, adj));
    return graphs;
}
} // namespace detail

/// Train from an explicit starting model (used for fine-tuning as well).
/// Deterministic given the config seed; aborts on divergence.
inline TrainResult train_from(EmbedModel model, const std::vector<TrainSample>& train_set,
                              const std::vector<TrainSample>& val_set, const TrainConfig& cfg) {
    require(!train_set.empty(), "train: empty training set");
    require(cfg.batch_size >= 1 && cfg.epochs >= 0, "train: bad hyperparameters");
    model.validate();

    std::vector<LinkGraph> train_graphs = detail::build_graphs(train_set, model.q, cfg.adjacency);
    std::vector<LinkGraph> val_graphs = detail::build_graphs(val_set, model.q, cfg.adjacency);

    ModelGrads grads(model);
    AdamState adam;
    adam.beta1 = cfg.beta1;
    adam.beta2 = cfg.beta2;
    adam.eps = cfg.adam_eps;
    adam.init(grads);

    Rng rng(cfg.seed ^ 0x7261696e5f726e67ULL);
    std::vector<std::size_t> order(train_set.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    TrainResult res;
    res.model = model;
    res.best_val_ratio = -1.0;

    auto maybe_validate = [&](int epoch, EmbedModel& cur) {
        if (val_set.empty()) return;
        double ratio = mean_sum_rate_ratio(cur, val_set, val_graphs);
        if (ratio > res.best_val_ratio) {
            res.best_val_ratio = ratio;
            res.best_epoch = epoch;
            res.model = cur;
        }
    };

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_loss = 0.0;
        std::size_t pos = 0;
        while (pos < order.size()) {
            std::size_t take = std::min(std::size_t(cfg.batch_size), order.size() - pos);
            grads.zero();
            double batch_loss = 0.0;
            for (std::size_t b = 0; b < take; ++b) {
                std::size_t idx = order[pos + b];
                batch_loss += scenario_loss_grad(model, train_graphs[idx], train_set[idx].label,
                                                 cfg.class_weights, grads);
            }
            batch_loss /= double(take);
            grads.scale(1.0 / double(take));
            if (!std::isfinite(batch_loss)) {
                std::ostringstream msg;
                msg << "train: loss diverged (epoch " << epoch << ", step " << adam.step << ")";
                throw error(msg.str());
            }
            adam.update(model, grads, cfg.lr);
            epoch_loss += batch_loss * double(take);
            pos += take;
        }
        res.epoch_loss.push_back(epoch_loss / double(order.size()));
        if ((epoch + 1) % cfg.validate_every == 0 || epoch + 1 == cfg.epochs)
            maybe_validate(epoch, model);
    }
    if (val_set.empty() || cfg.epochs == 0) res.model = model;
    return res;
}

/// Fit the quantizer on the training matrices, init a fresh model and train.
inline TrainResult train(const std::vector<TrainSample>& train_set,
                         const std::vector<TrainSample>& val_set, const TrainConfig& cfg) {
    std::vector<ChannelMatrix> mats;
    mats.reserve(train_set.size());
    for (const TrainSample& s : train_set) mats.push_back(s.h);
    Quantizer q = cfg.quantizer == QuantizerKind::Uniform
                      ? fit_quantizer_uniform(mats, cfg.p_bins)
                      : fit_quantizer(mats, cfg.p_bins);
    EmbedModel m0 = init_embed_model(q, cfg.seed, cfg.hidden_dim, cfg.t_iters,
                                     cfg.classifier_hidden);
    return train_from(std::move(m0), train_set, val_set, cfg);
}

} // namespace ulinq

#endif
