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

// ulinq: command-line front end for map generation, link scenarios, grid
// propagation, scheduling solvers, dataset assembly, model training and the
// evaluation/benchmark harness. Every subcommand writes a manifest with the
// fully resolved configuration into its output directory, so reruns with the
// same flags reproduce identical bytes.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include <urbanlinq/urbanlinq.hpp>

namespace fs = std::filesystem;
using namespace ulinq;

namespace {

fs::path default_out_dir() {
    if (const char* env = std::getenv("ULINQ_OUT_DIR")) return fs::path(env);
    return fs::path(".");
}

void write_manifest(const fs::path& out_dir, const std::string& command, const json& config) {
    fs::create_directories(out_dir);
    json m;
    m["tool"] = "ulinq";
    m["command"] = command;
    m["config"] = config;
    write_json_file(out_dir / "manifest.json", m);
}

std::vector<DistanceGroup> parse_groups(const std::vector<std::string>& names) {
    std::vector<DistanceGroup> out;
    for (const std::string& n : names) out.push_back(group_from_name(n));
    require(!out.empty(), "no distance groups given");
    return out;
}

struct CommonPropFlags {
    double f_carrier = 5.9e9;
    double diff_loss = 15.0;
    int k_max = 3;
    double floor_db = -160.0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--freq", f_carrier, "carrier frequency, Hz")->capture_default_str();
        cmd->add_option("--diff-loss", diff_loss, "diffraction loss per corner, dB")
            ->capture_default_str();
        cmd->add_option("--kmax", k_max, "max charged corners")->capture_default_str();
        cmd->add_option("--floor", floor_db, "gain floor, dB")->capture_default_str();
    }
    PropagationParams params() const { return {f_carrier, diff_loss, k_max, floor_db}; }
    json to_json() const {
        return {{"f_carrier_hz", f_carrier},
                {"diffraction_loss_db", diff_loss},
                {"k_max", k_max},
                {"floor_db", floor_db}};
    }
};

struct RadioFlags {
    double tx_power = 23.0;
    double noise = -104.0;
    double bandwidth = 10e6;

    void attach(CLI::App* cmd) {
        cmd->add_option("--tx-power", tx_power, "transmit power, dBm")->capture_default_str();
        cmd->add_option("--noise", noise, "noise power, dBm")->capture_default_str();
        cmd->add_option("--bandwidth", bandwidth, "bandwidth, Hz")->capture_default_str();
    }
    RadioParams params() const { return RadioParams::from_dbm(tx_power, noise, bandwidth); }
    json to_json() const {
        return {{"tx_power_dbm", tx_power}, {"noise_power_dbm", noise}, {"bandwidth_hz", bandwidth}};
    }
};

struct FplinqFlags {
    int max_iter = 100;
    double tol = 1e-5;
    double round_threshold = 0.5;

    void attach(CLI::App* cmd) {
        cmd->add_option("--max-iter", max_iter, "solver iteration cap")->capture_default_str();
        cmd->add_option("--tol", tol, "convergence tolerance on relaxed x")
            ->capture_default_str();
        cmd->add_option("--round-threshold", round_threshold, "rounding threshold")
            ->capture_default_str();
    }
    FplinqOptions options() const {
        FplinqOptions o;
        o.max_iter = max_iter;
        o.tol = tol;
        o.round_threshold = round_threshold;
        return o;
    }
    json to_json() const {
        return {{"max_iter", max_iter}, {"tol", tol}, {"round_threshold", round_threshold}};
    }
};

struct TrainFlags {
    double lr = 1e-3;
    int epochs = 200;
    int batch = 8;
    double w_on = 4.0;
    double w_off = 1.0;
    int p_bins = 8;
    int t_iters = 2;
    std::uint64_t seed = 1;
    std::string group = "all";
    std::string quantizer = "uniform";
    int limit = -1;

    void attach(CLI::App* cmd) {
        cmd->add_option("--lr", lr, "learning rate")->capture_default_str();
        cmd->add_option("--epochs", epochs, "training epochs")->capture_default_str();
        cmd->add_option("--batch", batch, "scenarios per batch")->capture_default_str();
        cmd->add_option("--w-on", w_on, "loss weight of active links")->capture_default_str();
        cmd->add_option("--w-off", w_off, "loss weight of inactive links")->capture_default_str();
        cmd->add_option("--bins", p_bins, "quantizer bins")->capture_default_str();
        cmd->add_option("--iters", t_iters, "embedding iterations")->capture_default_str();
        cmd->add_option("--seed", seed, "training seed")->capture_default_str();
        cmd->add_option("--group", group, "short | long | all")->capture_default_str();
        cmd->add_option("--quantizer", quantizer, "uniform | quantile")->capture_default_str();
        cmd->add_option("--limit", limit, "cap on training scenarios (-1 = all)")
            ->capture_default_str();
    }
    TrainConfig config() const {
        TrainConfig c;
        c.lr = lr;
        c.epochs = epochs;
        c.batch_size = batch;
        c.class_weights = {w_on, w_off};
        c.p_bins = p_bins;
        c.t_iters = t_iters;
        c.seed = seed;
        if (quantizer == "quantile")
            c.quantizer = QuantizerKind::Quantile;
        else
            require(quantizer == "uniform", "unknown quantizer kind: " + quantizer);
        return c;
    }
    RecordFilter filter() const {
        RecordFilter f;
        if (group != "all") f.group = group_from_name(group);
        f.limit = limit;
        return f;
    }
    json to_json() const {
        return {{"lr", lr},         {"epochs", epochs}, {"batch", batch}, {"w_on", w_on},
                {"w_off", w_off},   {"bins", p_bins},   {"iters", t_iters}, {"seed", seed},
                {"group", group},   {"quantizer", quantizer}, {"limit", limit}};
    }
};

// ---------------------------------------------------------------------------

int cmd_mapgen(const fs::path& out, std::uint64_t seed, const CityMapParams& p,
               std::string name) {
    CityMap m = generate_city_map(seed, p);
    if (name.empty()) name = m.map_id;
    write_manifest(out, "mapgen",
                   {{"seed", seed},
                    {"n_blocks_x", p.n_blocks_x},
                    {"n_blocks_y", p.n_blocks_y},
                    {"street_width_m", p.street_width_m},
                    {"jitter", p.jitter},
                    {"width_m", p.width_m},
                    {"height_m", p.height_m},
                    {"resolution", p.resolution},
                    {"name", name}});
    save_map(m, out / (name + ".cmap"));
    std::cout << "map " << m.map_id << " -> " << (out / (name + ".cmap")).string() << "\n";
    return 0;
}

int cmd_scenario(const fs::path& out, const fs::path& map_file, int links, double dmin,
                 double dmax, std::uint64_t seed, const RadioFlags& radio) {
    CityMap m = load_map(map_file);
    ScenarioParams sp;
    sp.tx_power_dbm = radio.tx_power;
    sp.noise_power_dbm = radio.noise;
    sp.bandwidth_hz = radio.bandwidth;
    LinkScenario s = sample_scenario(m, links, dmin, dmax, seed, sp);
    write_manifest(out, "scenario",
                   {{"map", map_file.string()},
                    {"links", links},
                    {"dmin", dmin},
                    {"dmax", dmax},
                    {"seed", seed},
                    {"radio", radio.to_json()}});
    save_scenario(s, out / "scenario.json");
    std::cout << "scenario with " << s.n() << " links -> " << (out / "scenario.json").string()
              << "\n";
    return 0;
}

int cmd_radiomap(const fs::path& out, const fs::path& map_file, const fs::path& scenario_file,
                 std::vector<double> tx_xy, const CommonPropFlags& prop, int threads,
                 const fs::path& repair_input, double drop_threshold) {
    if (!repair_input.empty()) {
        // post-processing mode for externally produced radiomaps
        CityMap m = load_map(map_file);
        Radiomap rm = load_radiomap(repair_input);
        Radiomap fixed = repair_radiomap(rm, m, drop_threshold);
        write_manifest(out, "radiomap",
                       {{"map", map_file.string()},
                        {"repair_input", repair_input.string()},
                        {"drop_threshold_db", drop_threshold}});
        save_radiomap(fixed, out / "repaired.rmap");
        std::cout << "repaired radiomap -> " << (out / "repaired.rmap").string() << "\n";
        return 0;
    }

    CityMap m = load_map(map_file);
    std::vector<Point> txs;
    if (!scenario_file.empty()) {
        LinkScenario s = load_scenario(scenario_file);
        for (const Link& l : s.links) txs.push_back(l.tx);
    } else {
        require(tx_xy.size() == 2, "radiomap: give --tx X Y or --scenario");
        txs.push_back({tx_xy[0], tx_xy[1]});
    }
    write_manifest(out, "radiomap",
                   {{"map", map_file.string()},
                    {"scenario", scenario_file.string()},
                    {"tx", tx_xy},
                    {"prop", prop.to_json()},
                    {"threads", threads}});
    std::vector<Radiomap> rms(txs.size());
    parallel_for(txs.size(), threads,
                 [&](std::size_t i) { rms[i] = compute_radiomap(m, txs[i], prop.params()); });
    for (std::size_t i = 0; i < rms.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "radiomap_%03zu.rmap", i);
        save_radiomap(rms[i], out / buf);
    }
    std::cout << rms.size() << " radiomap(s) -> " << out.string() << "\n";
    return 0;
}

int cmd_matrix(const fs::path& out, const fs::path& map_file, const fs::path& scenario_file,
               const CommonPropFlags& prop, int threads, bool save_rms) {
    CityMap m = load_map(map_file);
    LinkScenario s = load_scenario(scenario_file);
    s.validate(m);
    std::vector<Radiomap> rms(s.links.size());
    parallel_for(s.links.size(), threads, [&](std::size_t i) {
        rms[i] = compute_radiomap(m, s.links[i].tx, prop.params());
    });
    ChannelMatrix h = extract_channel_matrix(rms, s, m);
    write_manifest(out, "matrix",
                   {{"map", map_file.string()},
                    {"scenario", scenario_file.string()},
                    {"prop", prop.to_json()},
                    {"threads", threads},
                    {"save_radiomaps", save_rms}});
    save_channel(h, out / "matrix.json");
    if (save_rms)
        for (std::size_t i = 0; i < rms.size(); ++i) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "radiomap_%03zu.rmap", i);
            save_radiomap(rms[i], out / buf);
        }
    std::cout << "channel matrix " << h.n << "x" << h.n << " -> "
              << (out / "matrix.json").string() << "\n";
    return 0;
}

int cmd_solve(const fs::path& out, const fs::path& matrix_file, const std::string& solver,
              const RadioFlags& radio, const FplinqFlags& fp) {
    ChannelMatrix h = load_channel(matrix_file);
    RadioParams rp = radio.params();
    Schedule s;
    int iterations = 0;
    if (solver == "fplinq") {
        FplinqResult r = fplinq_solve(h, rp, {}, fp.options());
        s = r.schedule;
        iterations = r.iterations;
    } else if (solver == "brute") {
        s = brute_force_solve(h, rp);
    } else if (solver == "greedy") {
        s = greedy_solve(h, rp);
    } else {
        throw error("unknown solver: " + solver);
    }
    double rate = sum_rate(h, rp, s);
    write_manifest(out, "solve",
                   {{"matrix", matrix_file.string()},
                    {"solver", solver},
                    {"radio", radio.to_json()},
                    {"fplinq", fp.to_json()}});
    save_schedule(s, solver, iterations, rate, out / "schedule.json");
    std::cout << solver << ": " << s.active_count() << "/" << s.n()
              << " links active, sum rate " << rate << " bit/s -> "
              << (out / "schedule.json").string() << "\n";
    return 0;
}

int cmd_dataset(const fs::path& out, int n_maps, std::uint64_t seed,
                std::vector<int> counts, std::vector<int> links,
                std::vector<std::string> groups, int tx_sites, double map_size,
                const RadioFlags& radio, const CommonPropFlags& prop, const FplinqFlags& fp,
                int threads) {
    require(counts.size() == 3, "--counts needs train,val,test");
    DatasetConfig cfg;
    cfg.link_counts = links;
    cfg.groups = parse_groups(groups);
    cfg.n_train = counts[0];
    cfg.n_val = counts[1];
    cfg.n_test = counts[2];
    cfg.tx_sites_per_map = tx_sites;
    cfg.seed = seed;
    cfg.tx_power_dbm = radio.tx_power;
    cfg.noise_power_dbm = radio.noise;
    cfg.bandwidth_hz = radio.bandwidth;
    cfg.prop = prop.params();
    cfg.label_solver = fp.options();
    cfg.threads = threads;

    std::vector<CityMap> maps = make_map_family(n_maps, seed, map_size, map_size);
    write_manifest(out, "dataset",
                   {{"n_maps", n_maps},
                    {"seed", seed},
                    {"counts", counts},
                    {"links", links},
                    {"groups", groups},
                    {"tx_sites", tx_sites},
                    {"map_size_m", map_size},
                    {"radio", radio.to_json()},
                    {"prop", prop.to_json()},
                    {"fplinq", fp.to_json()},
                    {"threads", threads}});
    DatasetSummary sum = build_dataset(maps, cfg, out / "data");
    std::cout << "dataset: train " << sum.written[0] << ", val " << sum.written[1] << ", test "
              << sum.written[2] << " -> " << (out / "data").string() << "\n";
    return 0;
}

int cmd_train(const fs::path& out, const fs::path& dataset_dir, const TrainFlags& tf,
              std::vector<double> grid) {
    Dataset ds = open_dataset(dataset_dir);
    auto train_recs = load_records(ds, "train", tf.filter());
    auto val_recs = load_records(ds, "val", tf.filter());
    require(!train_recs.empty(), "train: no scenarios after filtering");
    auto train_set = to_train_samples(train_recs);
    auto val_set = to_train_samples(val_recs);

    write_manifest(out, "train",
                   {{"dataset", dataset_dir.string()}, {"train", tf.to_json()}, {"grid", grid}});

    TrainConfig base = tf.config();
    TrainResult best;
    double best_ratio = -1.0;
    double best_w = tf.w_on;
    std::vector<double> weights = grid.empty() ? std::vector<double>{tf.w_on} : grid;
    for (double w : weights) {
        TrainConfig cfg = base;
        cfg.class_weights = {w, tf.w_off};
        TrainResult r = train(train_set, val_set, cfg);
        double ratio = val_set.empty() ? 0.0 : r.best_val_ratio;
        std::cout << "w_on=" << w << " val sum-rate ratio " << ratio << "\n";
        if (ratio > best_ratio) {
            best_ratio = ratio;
            best = std::move(r);
            best_w = w;
        }
    }
    save_model(best.model, out / "model.ulmodel");
    json summary = {{"best_w_on", best_w},
                    {"best_val_ratio", best_ratio},
                    {"best_epoch", best.best_epoch},
                    {"final_train_loss", best.epoch_loss.empty() ? 0.0 : best.epoch_loss.back()}};
    write_json_file(out / "training.json", summary);
    std::cout << "model (w_on=" << best_w << ", val ratio " << best_ratio << ") -> "
              << (out / "model.ulmodel").string() << "\n";
    return 0;
}

int cmd_eval(const fs::path& out, const fs::path& dataset_dir, const fs::path& model_file,
             const std::string& predictor_name, const std::string& split,
             const std::string& group, int limit, const FplinqFlags& fp) {
    Dataset ds = open_dataset(dataset_dir);
    RecordFilter f;
    if (group != "all") f.group = group_from_name(group);
    f.limit = limit;
    auto recs = load_records(ds, split, f);
    require(!recs.empty(), "eval: no scenarios selected");

    EmbedModel model;
    PredictorSpec pred;
    if (!model_file.empty()) {
        model = load_model(model_file);
        pred = make_model_predictor(model);
    } else if (predictor_name == "df-fp") {
        pred = make_distance_baseline_predictor({}, fp.options());
    } else if (predictor_name == "all-on") {
        pred = make_constant_predictor(true);
    } else if (predictor_name == "all-off") {
        pred = make_constant_predictor(false);
    } else {
        pred = make_solver_predictor(predictor_name, fp.options());
    }

    EvalReport rep = evaluate(recs, ds.maps, pred);
    write_manifest(out, "eval",
                   {{"dataset", dataset_dir.string()},
                    {"model", model_file.string()},
                    {"predictor", pred.name},
                    {"split", split},
                    {"group", group},
                    {"limit", limit}});
    save_report(rep, out / "report.json", out / "report.csv");
    std::cout << pred.name << " on " << split << ": accuracy " << rep.avg_accuracy
              << ", sum-rate ratio " << rep.avg_sum_rate_ratio << " (" << rep.n_scenarios
              << " scenarios) -> " << (out / "report.json").string() << "\n";
    return 0;
}

int cmd_transfer(const fs::path& out, const fs::path& dataset_dir, const std::string& source,
                 const std::string& target, int shots, const TrainFlags& tf) {
    Dataset ds = open_dataset(dataset_dir);
    TransferConfig cfg;
    cfg.source = group_from_name(source);
    cfg.target = group_from_name(target);
    cfg.shots = shots;
    cfg.train_cfg = tf.config();
    write_manifest(out, "transfer",
                   {{"dataset", dataset_dir.string()},
                    {"source", source},
                    {"target", target},
                    {"shots", shots},
                    {"train", tf.to_json()}});
    TransferOutcome o = transfer_experiment(ds, cfg);
    save_report(o.zero_shot, out / "zero_shot.json", out / "zero_shot.csv");
    save_report(o.few_shot, out / "few_shot.json", out / "few_shot.csv");
    save_report(o.non_transfer, out / "non_transfer.json", out / "non_transfer.csv");
    std::cout << "sum-rate ratios: zero-shot " << o.zero_shot.avg_sum_rate_ratio << ", few-shot "
              << o.few_shot.avg_sum_rate_ratio << ", non-transfer "
              << o.non_transfer.avg_sum_rate_ratio << " -> " << out.string() << "\n";
    return 0;
}

int cmd_bench(const fs::path& out, const fs::path& dataset_dir, const std::string& pipeline,
              const fs::path& model_file, const std::string& split, int limit, int warmup,
              const CommonPropFlags& prop, const FplinqFlags& fp) {
    Dataset ds = open_dataset(dataset_dir);
    RecordFilter f;
    f.limit = limit;
    auto recs = load_records(ds, split, f);

    EmbedModel model;
    const EmbedModel* mp = nullptr;
    if (!model_file.empty()) {
        model = load_model(model_file);
        mp = &model;
    }
    TimingStats ts =
        benchmark_runtime(recs, ds.maps, make_pipeline(pipeline, mp, prop.params(), fp.options()),
                          warmup);
    write_manifest(out, "bench",
                   {{"dataset", dataset_dir.string()},
                    {"pipeline", pipeline},
                    {"model", model_file.string()},
                    {"split", split},
                    {"limit", limit},
                    {"warmup", warmup}});
    json j = {{"pipeline", pipeline},
              {"n_runs", ts.n_runs},
              {"mean_s", ts.mean_s},
              {"p95_s", ts.p95_s}};
    write_json_file(out / "bench.json", j);
    std::cout << pipeline << ": mean " << ts.mean_s << " s, p95 " << ts.p95_s << " s over "
              << ts.n_runs << " scenarios -> " << (out / "bench.json").string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"urban V2V link scheduling toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read defaults from an INI/TOML file");
    app.allow_config_extras(CLI::config_extras_mode::error);

    fs::path out = default_out_dir();
    app.add_option("--out", out, "output directory (env ULINQ_OUT_DIR)")
        ->capture_default_str();
    int threads = int(std::thread::hardware_concurrency());
    if (threads <= 0) threads = 2;
    app.add_option("--threads", threads, "worker threads")->capture_default_str();

    // mapgen
    auto* mapgen = app.add_subcommand("mapgen", "generate a synthetic city map");
    std::uint64_t mg_seed = 0;
    CityMapParams mg_params;
    std::string mg_name;
    mapgen->add_option("--seed", mg_seed, "map seed")->capture_default_str();
    mapgen->add_option("--blocks-x", mg_params.n_blocks_x)->capture_default_str();
    mapgen->add_option("--blocks-y", mg_params.n_blocks_y)->capture_default_str();
    mapgen->add_option("--street-width", mg_params.street_width_m, "meters")
        ->capture_default_str();
    mapgen->add_option("--jitter", mg_params.jitter, "0..1")->capture_default_str();
    mapgen->add_option("--width", mg_params.width_m, "meters")->capture_default_str();
    mapgen->add_option("--height", mg_params.height_m, "meters")->capture_default_str();
    mapgen->add_option("--resolution", mg_params.resolution, "cells per meter")
        ->capture_default_str();
    mapgen->add_option("--name", mg_name, "output file stem");

    // scenario
    auto* scenario = app.add_subcommand("scenario", "sample a V2V link scenario on a map");
    fs::path sc_map;
    int sc_links = 10;
    double sc_dmin = 2.0, sc_dmax = 32.0;
    std::uint64_t sc_seed = 0;
    RadioFlags sc_radio;
    scenario->add_option("--map", sc_map, "map file")->required();
    scenario->add_option("--links", sc_links)->capture_default_str();
    scenario->add_option("--dmin", sc_dmin, "meters")->capture_default_str();
    scenario->add_option("--dmax", sc_dmax, "meters")->capture_default_str();
    scenario->add_option("--seed", sc_seed)->capture_default_str();
    sc_radio.attach(scenario);

    // radiomap
    auto* radiomap = app.add_subcommand("radiomap", "compute or repair radiomaps");
    fs::path rm_map, rm_scenario, rm_repair;
    std::vector<double> rm_tx;
    CommonPropFlags rm_prop;
    double rm_drop = 40.0;
    radiomap->add_option("--map", rm_map, "map file")->required();
    radiomap->add_option("--scenario", rm_scenario, "scenario file (one radiomap per tx)");
    radiomap->add_option("--tx", rm_tx, "transmitter X Y, meters")->expected(2);
    radiomap->add_option("--repair", rm_repair, "radiomap file to repair instead");
    radiomap->add_option("--drop-threshold", rm_drop, "dB")->capture_default_str();
    rm_prop.attach(radiomap);

    // matrix
    auto* matrix = app.add_subcommand("matrix", "compute the channel matrix for a scenario");
    fs::path mx_map, mx_scenario;
    bool mx_save_rms = false;
    CommonPropFlags mx_prop;
    matrix->add_option("--map", mx_map, "map file")->required();
    matrix->add_option("--scenario", mx_scenario, "scenario file")->required();
    matrix->add_flag("--save-radiomaps", mx_save_rms, "also write per-tx radiomaps");
    mx_prop.attach(matrix);

    // solve
    auto* solve = app.add_subcommand("solve", "schedule links from a channel matrix");
    fs::path sv_matrix;
    std::string sv_solver = "fplinq";
    RadioFlags sv_radio;
    FplinqFlags sv_fp;
    solve->add_option("--matrix", sv_matrix, "channel matrix file")->required();
    solve->add_option("--solver", sv_solver, "fplinq | brute | greedy")->capture_default_str();
    sv_radio.attach(solve);
    sv_fp.attach(solve);

    // dataset
    auto* dataset = app.add_subcommand("dataset", "build a train/val/test dataset tree");
    int ds_maps = 24;
    std::uint64_t ds_seed = 7;
    std::vector<int> ds_counts{800, 1000, 4000};
    std::vector<int> ds_links{10, 20, 30, 40, 50};
    std::vector<std::string> ds_groups{"short", "long"};
    int ds_sites = 80;
    double ds_map_size = 256.0;
    RadioFlags ds_radio;
    CommonPropFlags ds_prop;
    FplinqFlags ds_fp;
    dataset->add_option("--maps", ds_maps, "number of maps")->capture_default_str();
    dataset->add_option("--seed", ds_seed)->capture_default_str();
    dataset->add_option("--counts", ds_counts, "train val test")->expected(3);
    dataset->add_option("--links", ds_links, "link counts per scenario");
    dataset->add_option("--groups", ds_groups, "short and/or long");
    dataset->add_option("--tx-sites", ds_sites, "tx sites per map")->capture_default_str();
    dataset->add_option("--map-size", ds_map_size, "meters")->capture_default_str();
    ds_radio.attach(dataset);
    ds_prop.attach(dataset);
    ds_fp.attach(dataset);

    // train
    auto* train_cmd = app.add_subcommand("train", "train the embedding scheduler");
    fs::path tr_dataset;
    TrainFlags tr_flags;
    std::vector<double> tr_grid;
    train_cmd->add_option("--dataset", tr_dataset, "dataset directory")->required();
    train_cmd->add_option("--grid", tr_grid, "grid-search w_on values (overrides --w-on)");
    tr_flags.attach(train_cmd);

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a predictor on a dataset split");
    fs::path ev_dataset, ev_model;
    std::string ev_pred = "fplinq", ev_split = "test", ev_group = "all";
    int ev_limit = -1;
    FplinqFlags ev_fp;
    eval_cmd->add_option("--dataset", ev_dataset, "dataset directory")->required();
    eval_cmd->add_option("--model", ev_model, "model file (overrides --predictor)");
    eval_cmd->add_option("--predictor", ev_pred, "fplinq | brute | greedy | df-fp | all-on | all-off")
        ->capture_default_str();
    eval_cmd->add_option("--split", ev_split)->capture_default_str();
    eval_cmd->add_option("--group", ev_group, "short | long | all")->capture_default_str();
    eval_cmd->add_option("--limit", ev_limit, "max scenarios (-1 = all)")->capture_default_str();
    ev_fp.attach(eval_cmd);

    // transfer
    auto* transfer = app.add_subcommand("transfer", "zero/few-shot transfer study");
    fs::path tf_dataset;
    std::string tf_source = "long", tf_target = "short";
    int tf_shots = 20;
    TrainFlags tf_flags;
    transfer->add_option("--dataset", tf_dataset, "dataset directory")->required();
    transfer->add_option("--source", tf_source)->capture_default_str();
    transfer->add_option("--target", tf_target)->capture_default_str();
    transfer->add_option("--shots", tf_shots)->capture_default_str();
    tf_flags.attach(transfer);

    // bench
    auto* bench = app.add_subcommand("bench", "time a pipeline per scenario");
    fs::path bn_dataset, bn_model;
    std::string bn_pipeline = "infer", bn_split = "test";
    int bn_limit = 20, bn_warmup = 2;
    CommonPropFlags bn_prop;
    FplinqFlags bn_fp;
    bench->add_option("--dataset", bn_dataset, "dataset directory")->required();
    bench->add_option("--pipeline", bn_pipeline, "infer | dpm-fp | noop")->capture_default_str();
    bench->add_option("--model", bn_model, "model file (for infer)");
    bench->add_option("--split", bn_split)->capture_default_str();
    bench->add_option("--limit", bn_limit)->capture_default_str();
    bench->add_option("--warmup", bn_warmup)->capture_default_str();
    bn_prop.attach(bench);
    bn_fp.attach(bench);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ||
            e.get_name() == "CallForVersion")
            return app.exit(e);
        app.exit(e);
        return 2; // unknown flags / invalid configuration
    }

    try {
        if (mapgen->parsed()) return cmd_mapgen(out, mg_seed, mg_params, mg_name);
        if (scenario->parsed())
            return cmd_scenario(out, sc_map, sc_links, sc_dmin, sc_dmax, sc_seed, sc_radio);
        if (radiomap->parsed())
            return cmd_radiomap(out, rm_map, rm_scenario, rm_tx, rm_prop, threads, rm_repair,
                                rm_drop);
        if (matrix->parsed())
            return cmd_matrix(out, mx_map, mx_scenario, mx_prop, threads, mx_save_rms);
        if (solve->parsed()) return cmd_solve(out, sv_matrix, sv_solver, sv_radio, sv_fp);
        if (dataset->parsed())
            return cmd_dataset(out, ds_maps, ds_seed, ds_counts, ds_links, ds_groups, ds_sites,
                               ds_map_size, ds_radio, ds_prop, ds_fp, threads);
        if (train_cmd->parsed()) return cmd_train(out, tr_dataset, tr_flags, tr_grid);
        if (eval_cmd->parsed())
            return cmd_eval(out, ev_dataset, ev_model, ev_pred, ev_split, ev_group, ev_limit,
                            ev_fp);
        if (transfer->parsed())
            return cmd_transfer(out, tf_dataset, tf_source, tf_target, tf_shots, tf_flags);
        if (bench->parsed())
            return cmd_bench(out, bn_dataset, bn_pipeline, bn_model, bn_split, bn_limit,
                             bn_warmup, bn_prop, bn_fp);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1; // runtime failure
    }
    return 2;
}
