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

#ifndef URBANLINQ_EVALHARNESS_HPP
#define URBANLINQ_EVALHARNESS_HPP

#include <chrono>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "embed.hpp"

namespace ulinq {

// ---------------------------------------------------------------------------
// Predictors
// ---------------------------------------------------------------------------

/// A named scheduling policy under evaluation. The callable sees the full
/// record plus the map so both CSI-based and geometry-only policies fit.
struct PredictorSpec {
    std::string name;
    std::function<Schedule(const DatasetRecord&, const CityMap&)> fn;
};

inline PredictorSpec make_model_predictor(const EmbedModel& m, std::string name = "model") {
    return {std::move(name),
            [&m](const DatasetRecord& rec, const CityMap&) { return predict(m, rec.h).schedule; }};
}

inline PredictorSpec make_solver_predictor(const std::string& solver,
                                           const FplinqOptions& opts = {}) {
    if (solver == "fplinq")
        return {"fplinq", [opts](const DatasetRecord& rec, const CityMap&) {
                    return fplinq_solve(rec.h, rec.rp, {}, opts).schedule;
                }};
    if (solver == "brute")
        return {"brute", [](const DatasetRecord& rec, const CityMap&) {
                    return brute_force_solve(rec.h, rec.rp);
                }};
    if (solver == "greedy")
        return {"greedy", [](const DatasetRecord& rec, const CityMap&) {
                    return greedy_solve(rec.h, rec.rp);
                }};
    throw error("unknown solver predictor: " + solver);
}

inline PredictorSpec make_constant_predictor(bool on) {
    std::string name = on ? "all-on" : "all-off";
    return {name, [on](const DatasetRecord& rec, const CityMap&) {
                Schedule s;
                s.x.assign(std::size_t(rec.scn.n()), on ? 1 : 0);
                return s;
            }};
}

/// Distance-only baseline: channels from the two-slope path-loss model on
/// straight-line distances, scheduled with the fractional solver. The
/// resulting schedule is scored on the true channels by evaluate().
inline PredictorSpec make_distance_baseline_predictor(const Itu1411Params& pl = {},
                                                      const FplinqOptions& opts = {}) {
    return {"df-fp", [pl, opts](const DatasetRecord& rec, const CityMap&) {
                ChannelMatrix hd = distance_channel_matrix(rec.scn, pl);
                return fplinq_solve(hd, rec.rp, {}, opts).schedule;
            }};
}

/// Reference that replays the stored labels (the solver that produced the
/// dataset's ground truth).
inline PredictorSpec make_label_reference() {
    return {"labels", [](const DatasetRecord& rec, const CityMap&) { return rec.label; }};
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

struct ScenarioResult {
    int index = 0;
    SettingKey setting;
    std::string map_id;
    double accuracy = 0.0;
    double sum_rate_ratio = 0.0;
    double runtime_s = 0.0;
};

struct SettingStats {
    SettingKey setting;
    int n_scenarios = 0;
    double accuracy = 0.0;
    double sum_rate_ratio = 0.0;
    double runtime_mean_s = 0.0;
};

struct EvalReport {
    std::string predictor;
    std::string reference;
    int n_scenarios = 0;
    double avg_accuracy = 0.0;
    double avg_sum_rate_ratio = 0.0;
    double runtime_mean_s = 0.0;
    double runtime_p95_s = 0.0;
    std::vector<SettingStats> per_setting;
    std::vector<ScenarioResult> scenarios;
};

inline double percentile95(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    std::size_t idx = std::size_t(std::ceil(0.95 * double(v.size()))) - 1;
    return v[std::min(idx, v.size() - 1)];
}

/// Score a predictor against a reference on pre-loaded records. Accuracy is
/// the per-scenario fraction of matching decisions averaged over scenarios;
/// the sum-rate ratio always uses the true (stored) channels. Prediction
/// wall time excludes all I/O since records are in memory.
inline EvalReport evaluate(const std::vector<DatasetRecord>& records,
                           const std::map<std::string, CityMap>& maps,
                           const PredictorSpec& predictor,
                           const PredictorSpec& reference = make_label_reference()) {
    require(!records.empty(), "evaluate: empty record set");
    EvalReport rep;
    rep.predictor = predictor.name;
    rep.reference = reference.name;
    rep.n_scenarios = int(records.size());

    std::map<SettingKey, SettingStats> buckets;
    std::vector<double> times;
    for (std::size_t k = 0; k < records.size(); ++k) {
        const DatasetRecord& rec = records[k];
        auto mit = maps.find(rec.map_id);
        require(mit != maps.end(), "evaluate: missing map " + rec.map_id);
        const CityMap& map = mit->second;

        auto t0 = std::chrono::steady_clock::now();
        Schedule pred = predictor.fn(rec, map);
        auto t1 = std::chrono::steady_clock::now();
        Schedule ref = reference.fn(rec, map);
        require(pred.n() == rec.scn.n() && ref.n() == rec.scn.n(),
                "evaluate: schedule length mismatch");

        int match = 0;
        for (int i = 0; i < pred.n(); ++i)
            match += (pred.x[std::size_t(i)] == ref.x[std::size_t(i)]);
        double acc = double(match) / double(pred.n());

        double ref_rate = sum_rate(rec.h, rec.rp, ref);
        double pred_rate = sum_rate(rec.h, rec.rp, pred);
        double ratio = ref_rate > 0.0 ? pred_rate / ref_rate : 1.0;

        ScenarioResult sr;
        sr.index = int(k);
        sr.setting = rec.setting;
        sr.map_id = rec.map_id;
        sr.accuracy = acc;
        sr.sum_rate_ratio = ratio;
        sr.runtime_s = std::chrono::duration<double>(t1 - t0).count();
        rep.scenarios.push_back(sr);
        times.push_back(sr.runtime_s);

        SettingStats& b = buckets[rec.setting];
        b.setting = rec.setting;
        b.n_scenarios += 1;
        b.accuracy += acc;
        b.sum_rate_ratio += ratio;
        b.runtime_mean_s += sr.runtime_s;

        rep.avg_accuracy += acc;
        rep.avg_sum_rate_ratio += ratio;
        rep.runtime_mean_s += sr.runtime_s;
    }
    double n = double(records.size());
    rep.avg_accuracy /= n;
    rep.avg_sum_rate_ratio /= n;
    rep.runtime_mean_s /= n;
    rep.runtime_p95_s = percentile95(times);
    for (auto& [key, b] : buckets) {
        b.accuracy /= double(b.n_scenarios);
        b.sum_rate_ratio /= double(b.n_scenarios);
        b.runtime_mean_s /= double(b.n_scenarios);
        rep.per_setting.push_back(b);
    }
    return rep;
}

inline json report_to_json(const EvalReport& r) {
    json j;
    j["format"] = "urbanlinq-report-v1";
    j["predictor"] = r.predictor;
    j["reference"] = r.reference;
    j["n_scenarios"] = r.n_scenarios;
    j["avg_accuracy"] = r.avg_accuracy;
    j["avg_sum_rate_ratio"] = r.avg_sum_rate_ratio;
    j["runtime_mean_s"] = r.runtime_mean_s;
    j["runtime_p95_s"] = r.runtime_p95_s;
    json per = json::array();
    for (const SettingStats& b : r.per_setting)
        per.push_back({{"setting", b.setting.label()},
                       {"n_scenarios", b.n_scenarios},
                       {"accuracy", b.accuracy},
                       {"sum_rate_ratio", b.sum_rate_ratio},
                       {"runtime_mean_s", b.runtime_mean_s}});
    j["per_setting"] = std::move(per);
    return j;
}

/// Flat CSV, one row per scenario, for external plotting.
inline std::string report_to_csv(const EvalReport& r) {
    std::ostringstream os;
    os << "index,n_links,group,map_id,accuracy,sum_rate_ratio,runtime_s\n";
    os.precision(12);
    for (const ScenarioResult& s : r.scenarios)
        os << s.index << ',' << s.setting.n_links << ',' << group_name(s.setting.group) << ','
           << s.map_id << ',' << s.accuracy << ',' << s.sum_rate_ratio << ',' << s.runtime_s
           << '\n';
    return os.str();
}

inline void save_report(const EvalReport& r, const std::filesystem::path& json_path,
                        const std::filesystem::path& csv_path) {
    write_json_file(json_path, report_to_json(r));
    write_file_bytes(csv_path, report_to_csv(r));
}

// ---------------------------------------------------------------------------
// Transfer learning protocol
// ---------------------------------------------------------------------------

struct TransferConfig {
    DistanceGroup source = DistanceGroup::Long;
    DistanceGroup target = DistanceGroup::Short;
    int shots = 20;
    TrainConfig train_cfg;
    int fine_tune_epochs = 20; // at train_cfg.lr / 10
};

struct TransferOutcome {
    EvalReport zero_shot;
    EvalReport few_shot;
    EvalReport non_transfer;
};

/// Train on the source group, evaluate on the target group's test split
/// directly (zero-shot) and after fine-tuning on `shots` target scenarios
/// (few-shot), against a model trained fully on the target group.
inline TransferOutcome transfer_experiment(const Dataset& ds, const TransferConfig& cfg) {
    RecordFilter src_f, tgt_f;
    src_f.group = cfg.source;
    tgt_f.group = cfg.target;

    auto src_train = to_train_samples(load_records(ds, "train", src_f));
    auto src_val = to_train_samples(load_records(ds, "val", src_f));
    auto tgt_train_recs = load_records(ds, "train", tgt_f);
    auto tgt_val = to_train_samples(load_records(ds, "val", tgt_f));
    auto tgt_test = load_records(ds, "test", tgt_f);
    require(!src_train.empty() && !tgt_train_recs.empty() && !tgt_test.empty(),
            "transfer: dataset lacks one of the required splits/groups");
    require(cfg.shots >= 0 && cfg.shots <= int(tgt_train_recs.size()),
            "transfer: shots exceed available target training scenarios");

    TrainResult source_model = train(src_train, src_val, cfg.train_cfg);

    TransferOutcome out;
    out.zero_shot = evaluate(tgt_test, ds.maps, make_model_predictor(source_model.model, "zero-shot"));

    if (cfg.shots == 0) {
        out.few_shot = out.zero_shot;
        out.few_shot.predictor = "few-shot";
    } else {
        std::vector<TrainSample> shots_set =
            to_train_samples({tgt_train_recs.begin(), tgt_train_recs.begin() + cfg.shots});
        TrainConfig ft = cfg.train_cfg;
        ft.lr = cfg.train_cfg.lr / 10.0;
        ft.epochs = cfg.fine_tune_epochs;
        TrainResult tuned = train_from(source_model.model, shots_set, tgt_val, ft);
        out.few_shot = evaluate(tgt_test, ds.maps, make_model_predictor(tuned.model, "few-shot"));
    }

    TrainResult native = train(to_train_samples(tgt_train_recs), tgt_val, cfg.train_cfg);
    out.non_transfer =
        evaluate(tgt_test, ds.maps, make_model_predictor(native.model, "non-transfer"));
    return out;
}

// ---------------------------------------------------------------------------
// Runtime benchmarking
// ---------------------------------------------------------------------------

struct TimingStats {
    int n_runs = 0;
    double mean_s = 0.0;
    double p95_s = 0.0;
};

/// Wall-clock per scenario for an arbitrary pipeline, warm-up runs discarded.
/// The pipeline callable gets (record, map); runs are sequential on one
/// worker so timings do not contend.
inline TimingStats benchmark_runtime(
    const std::vector<DatasetRecord>& records, const std::map<std::string, CityMap>& maps,
    const std::function<void(const DatasetRecord&, const CityMap&)>& pipeline, int warmup = 2) {
    require(!records.empty(), "benchmark: empty scenario list");
    auto map_of = [&](const DatasetRecord& rec) -> const CityMap& {
        auto it = maps.find(rec.map_id);
        require(it != maps.end(), "benchmark: missing map " + rec.map_id);
        return it->second;
    };
    for (int w = 0; w < warmup; ++w) pipeline(records.front(), map_of(records.front()));

    std::vector<double> times;
    times.reserve(records.size());
    for (const DatasetRecord& rec : records) {
        auto t0 = std::chrono::steady_clock::now();
        pipeline(rec, map_of(rec));
        auto t1 = std::chrono::steady_clock::now();
        times.push_back(std::chrono::duration<double>(t1 - t0).count());
    }
    TimingStats ts;
    ts.n_runs = int(times.size());
    for (double t : times) ts.mean_s += t;
    ts.mean_s /= double(times.size());
    ts.p95_s = percentile95(times);
    return ts;
}

/// The two pipelines compared in the runtime study, plus a no-op that bounds
/// the harness overhead.
inline std::function<void(const DatasetRecord&, const CityMap&)> make_pipeline(
    const std::string& name, const EmbedModel* model, const PropagationParams& prop = {},
    const FplinqOptions& fp = {}) {
    if (name == "infer") {
        require(model != nullptr, "pipeline 'infer' needs a model");
        return [model](const DatasetRecord& rec, const CityMap&) { predict(*model, rec.h); };
    }
    if (name == "dpm-fp") {
        return [prop, fp](const DatasetRecord& rec, const CityMap& map) {
            ChannelMatrix h = compute_channel_matrix(map, rec.scn, prop);
            fplinq_solve(h, rec.rp, {}, fp);
        };
    }
    if (name == "noop") {
        return [](const DatasetRecord&, const CityMap&) {};
    }
    throw error("unknown pipeline: " + name);
}

} // namespace ulinq

#endif
