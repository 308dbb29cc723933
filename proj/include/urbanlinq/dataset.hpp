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

#ifndef URBANLINQ_DATASET_HPP
#define URBANLINQ_DATASET_HPP

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "channel.hpp"
#include "citymap.hpp"
#include "scenario.hpp"
#include "solvers.hpp"
#include "threadpool.hpp"
#include "train.hpp"

// Supervised dataset on disk: city maps, sampled scenarios, propagation
// channel matrices and fractional-programming labels, organized in
// train/val/test splits that never share a map. Transmitters are drawn from
// a fixed per-map site set so each site's radiomap is computed once and
// shared by every scenario on that map.

namespace ulinq {

enum class DistanceGroup { Short, Long };

inline const char* group_name(DistanceGroup g) {
    return g == DistanceGroup::Short ? "short" : "long";
}
inline DistanceGroup group_from_name(const std::string& s) {
    if (s == "short") return DistanceGroup::Short;
    if (s == "long") return DistanceGroup::Long;
    throw error("unknown distance group: " + s);
}
inline std::pair<double, double> group_range(DistanceGroup g) {
    return g == DistanceGroup::Short ? std::pair{2.0, 32.0} : std::pair{2.0, 65.0};
}

struct SettingKey {
    int n_links = 0;
    DistanceGroup group = DistanceGroup::Short;

    std::string label() const {
        return std::to_string(n_links) + "-" + group_name(group);
    }
    bool operator<(const SettingKey& o) const {
        return n_links != o.n_links ? n_links < o.n_links : int(group) < int(o.group);
    }
    bool operator==(const SettingKey& o) const {
        return n_links == o.n_links && group == o.group;
    }
};

struct DatasetConfig {
    std::vector<int> link_counts{10, 20, 30, 40, 50};
    std::vector<DistanceGroup> groups{DistanceGroup::Short, DistanceGroup::Long};
    int n_train = 800;
    int n_val = 1000;
    int n_test = 4000;
    int tx_sites_per_map = 80;
    std::uint64_t seed = 7;
    double tx_power_dbm = 23.0;
    double noise_power_dbm = -104.0;
    double bandwidth_hz = 10e6;
    PropagationParams prop;
    FplinqOptions label_solver;
    int threads = 1;
};

inline const char* kSplitNames[3] = {"train", "val", "test"};

namespace detail {

// deterministic per-task seed independent of execution order
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    Rng r(seed ^ (a * 0x9e3779b97f4a7c15ULL) ^ (b * 0xc2b2ae3d27d4eb4fULL));
    return r.next_u64();
}

// split the map list proportionally to the scenario counts; every split with
// a positive count gets at least one map
inline std::array<std::vector<int>, 3> partition_maps(int n_maps, const int counts[3]) {
    double total = double(counts[0] + counts[1] + counts[2]);
    require(total > 0, "dataset: all counts are zero");
    int share[3] = {0, 0, 0};
    double frac[3] = {0, 0, 0};
    int used = 0;
    for (int s = 0; s < 3; ++s) {
        double exact = counts[s] > 0 ? n_maps * double(counts[s]) / total : 0.0;
        share[s] = int(exact);
        frac[s] = exact - share[s];
        if (counts[s] > 0 && share[s] == 0) {
            share[s] = 1;
            frac[s] = 0.0;
        }
        used += share[s];
    }
    while (used > n_maps) { // steal from the largest share
        int k = 0;
        for (int s = 1; s < 3; ++s)
            if (share[s] > share[k]) k = s;
        require(share[k] > 1, "dataset: not enough maps for disjoint splits");
        --share[k];
        --used;
    }
    while (used < n_maps) { // hand leftovers to the largest remainder
        int k = -1;
        for (int s = 0; s < 3; ++s)
            if (counts[s] > 0 && (k < 0 || frac[s] > frac[k])) k = s;
        ++share[k];
        frac[k] = -1.0;
        ++used;
    }
    std::array<std::vector<int>, 3> out;
    int next = 0;
    for (int s = 0; s < 3; ++s)
        for (int i = 0; i < share[s]; ++i) out[std::size_t(s)].push_back(next++);
    return out;
}

inline std::string scenario_stem(int idx) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%06d", idx);
    return buf;
}

} // namespace detail

/// Sample distinct open-cell centers to serve as transmitter sites.
inline std::vector<Point> sample_tx_sites(const CityMap& map, int count, std::uint64_t seed) {
    std::vector<std::size_t> open;
    for (std::size_t i = 0; i < map.occupancy.size(); ++i)
        if (map.occupancy[i] == 0) open.push_back(i);
    require(int(open.size()) >= count, "map has fewer open cells than requested tx sites");
    Rng rng(seed);
    rng.shuffle(open);
    std::vector<Point> sites;
    sites.reserve(std::size_t(count));
    for (int k = 0; k < count; ++k) {
        int r = int(open[std::size_t(k)] / std::size_t(map.cols));
        int c = int(open[std::size_t(k)] % std::size_t(map.cols));
        sites.push_back(map.center_of_cell(r, c));
    }
    return sites;
}

/// Generate a family of distinct maps with varied block structure (used by
/// the CLI and tests to feed build_dataset).
inline std::vector<CityMap> make_map_family(int n_maps, std::uint64_t seed,
                                            double width_m = 256.0, double height_m = 256.0,
                                            double resolution = 1.0) {
    std::vector<CityMap> maps;
    const int blocks[4] = {3, 4, 5, 6};
    const double streets[4] = {8.0, 10.0, 12.0, 14.0};
    for (int i = 0; i < n_maps; ++i) {
        CityMapParams p;
        p.width_m = width_m;
        p.height_m = height_m;
        p.resolution = resolution;
        p.street_width_m = streets[(i / 4) % 4];
        // keep blocks at least 8 m wide on small maps
        auto fits = [&](int b) {
            return (b + 1) * p.street_width_m + b * 8.0 <= std::min(width_m, height_m);
        };
        p.n_blocks_x = blocks[i % 4];
        while (p.n_blocks_x > 1 && !fits(p.n_blocks_x)) --p.n_blocks_x;
        p.n_blocks_y = blocks[(i / 2 + 1) % 4];
        while (p.n_blocks_y > 1 && !fits(p.n_blocks_y)) --p.n_blocks_y;
        p.jitter = 0.5;
        maps.push_back(generate_city_map(seed + std::uint64_t(i) * 1000003ULL, p));
    }
    return maps;
}

struct DatasetSummary {
    std::filesystem::path dir;
    int written[3] = {0, 0, 0};
};

/// Build and write the full dataset tree under out_dir:
///   manifest.json, maps/<map_id>.cmap,
///   {train,val,test}/scn_NNNNNN.json, mat_NNNNNN.json, sch_NNNNNN.json
/// Deterministic for a fixed (maps, cfg): identical bytes on rebuild.
inline DatasetSummary build_dataset(const std::vector<CityMap>& maps, const DatasetConfig& cfg,
                                    const std::filesystem::path& out_dir) {
    require(!maps.empty(), "dataset: no maps");
    require(!cfg.link_counts.empty() && !cfg.groups.empty(), "dataset: empty settings");
    {
        std::vector<std::string> ids;
        for (const CityMap& m : maps) ids.push_back(m.map_id);
        std::sort(ids.begin(), ids.end());
        require(std::adjacent_find(ids.begin(), ids.end()) == ids.end(),
                "dataset: duplicate map would overlap splits");
    }

    const int counts[3] = {cfg.n_train, cfg.n_val, cfg.n_test};
    auto parts = detail::partition_maps(int(maps.size()), counts);

    namespace fs = std::filesystem;
    fs::create_directories(out_dir / "maps");
    for (int s = 0; s < 3; ++s) fs::create_directories(out_dir / kSplitNames[s]);
    for (const CityMap& m : maps) save_map(m, out_dir / "maps" / (m.map_id + ".cmap"));

    // settings cycle fastest so every split covers all of them
    std::vector<SettingKey> settings;
    for (int n : cfg.link_counts)
        for (DistanceGroup g : cfg.groups) settings.push_back({n, g});

    json manifest;
    manifest["format"] = "urbanlinq-dataset-v1";
    manifest["seed"] = cfg.seed;
    manifest["counts"] = {counts[0], counts[1], counts[2]};
    json jlink = json::array();
    for (int n : cfg.link_counts) jlink.push_back(n);
    manifest["link_counts"] = std::move(jlink);
    json jgroups = json::array();
    for (DistanceGroup g : cfg.groups) jgroups.push_back(group_name(g));
    manifest["groups"] = std::move(jgroups);
    manifest["tx_sites_per_map"] = cfg.tx_sites_per_map;
    manifest["radio"] = {{"tx_power_dbm", cfg.tx_power_dbm},
                         {"noise_power_dbm", cfg.noise_power_dbm},
                         {"bandwidth_hz", cfg.bandwidth_hz}};
    manifest["propagation"] = {{"f_carrier_hz", cfg.prop.f_carrier_hz},
                               {"diffraction_loss_db", cfg.prop.diffraction_loss_db},
                               {"k_max", cfg.prop.k_max},
                               {"floor_db", cfg.prop.floor_db}};

    DatasetSummary summary;
    summary.dir = out_dir;
    const RadioParams rp =
        RadioParams::from_dbm(cfg.tx_power_dbm, cfg.noise_power_dbm, cfg.bandwidth_hz);

    for (int s = 0; s < 3; ++s) {
        json jmaps = json::array();
        for (int mi : parts[std::size_t(s)]) jmaps.push_back(maps[std::size_t(mi)].map_id);
        json jscen = json::array();
        const auto& split_maps = parts[std::size_t(s)];
        if (counts[s] == 0) {
            manifest["splits"][kSplitNames[s]] = {{"maps", jmaps}, {"scenarios", jscen}};
            continue;
        }

        // plan scenarios, then process map by map so radiomaps stay shared
        struct Plan {
            int idx;
            int map_i; // index into `maps`
            SettingKey setting;
            std::uint64_t seed;
        };
        std::vector<Plan> plans;
        for (int k = 0; k < counts[s]; ++k) {
            SettingKey setting = settings[std::size_t(k) % settings.size()];
            int map_i = split_maps[(std::size_t(k) / settings.size()) % split_maps.size()];
            plans.push_back({k, map_i, setting,
                             detail::mix_seed(cfg.seed, std::uint64_t(s) + 1, std::uint64_t(k))});
        }

        std::vector<Plan> by_map = plans;
        std::stable_sort(by_map.begin(), by_map.end(),
                         [](const Plan& a, const Plan& b) { return a.map_i < b.map_i; });

        std::size_t pos = 0;
        while (pos < by_map.size()) {
            int map_i = by_map[pos].map_i;
            std::size_t end = pos;
            while (end < by_map.size() && by_map[end].map_i == map_i) ++end;
            const CityMap& map = maps[std::size_t(map_i)];

            std::vector<Point> sites =
                sample_tx_sites(map, cfg.tx_sites_per_map,
                                detail::mix_seed(cfg.seed, 0xA11CE, std::uint64_t(map_i)));
            std::vector<Radiomap> rms(sites.size());
            parallel_for(sites.size(), cfg.threads, [&](std::size_t k) {
                rms[k] = compute_radiomap(map, sites[k], cfg.prop);
            });
            std::unordered_map<std::uint64_t, int> site_index;
            auto key_of = [&map](const Point& p) {
                return std::uint64_t(map.row_of(p.y)) << 32 | std::uint64_t(map.col_of(p.x));
            };
            for (std::size_t k = 0; k < sites.size(); ++k)
                site_index[key_of(sites[k])] = int(k);

            struct Built {
                LinkScenario scn;
                ChannelMatrix h;
                Schedule label;
                int iterations;
            };
            std::vector<Built> built(end - pos);
            parallel_for(end - pos, cfg.threads, [&](std::size_t bi) {
                const Plan& plan = by_map[pos + bi];
                auto [dmin, dmax] = group_range(plan.setting.group);
                ScenarioParams sp;
                sp.tx_power_dbm = cfg.tx_power_dbm;
                sp.noise_power_dbm = cfg.noise_power_dbm;
                sp.bandwidth_hz = cfg.bandwidth_hz;
                sp.tx_sites = sites;
                LinkScenario scn =
                    sample_scenario(map, plan.setting.n_links, dmin, dmax, plan.seed, sp);
                std::vector<const Radiomap*> scn_rms;
                for (const Link& l : scn.links)
                    scn_rms.push_back(&rms[std::size_t(site_index.at(key_of(l.tx)))]);
                ChannelMatrix h = extract_channel_matrix(scn_rms, scn, map);
                FplinqResult fp = fplinq_solve(h, rp, {}, cfg.label_solver);
                built[bi] = {std::move(scn), std::move(h), std::move(fp.schedule), fp.iterations};
            });

            for (std::size_t bi = 0; bi < built.size(); ++bi) {
                const Plan& plan = by_map[pos + bi];
                const Built& b = built[bi];
                std::string stem = detail::scenario_stem(plan.idx);
                fs::path dir = out_dir / kSplitNames[s];
                save_scenario(b.scn, dir / ("scn_" + stem + ".json"));
                save_channel(b.h, dir / ("mat_" + stem + ".json"));
                save_schedule(b.label, "fplinq", b.iterations, sum_rate(b.h, rp, b.label),
                              dir / ("sch_" + stem + ".json"));
            }
            pos = end;
        }

        for (const Plan& plan : plans) {
            jscen.push_back({{"idx", plan.idx},
                             {"map_id", maps[std::size_t(plan.map_i)].map_id},
                             {"n_links", plan.setting.n_links},
                             {"group", group_name(plan.setting.group)},
                             {"seed", plan.seed}});
        }
        manifest["splits"][kSplitNames[s]] = {{"maps", jmaps}, {"scenarios", jscen}};
        summary.written[s] = counts[s];
    }

    write_json_file(out_dir / "manifest.json", manifest);
    return summary;
}

// ---------------------------------------------------------------------------
// Loading
// ---------------------------------------------------------------------------

struct DatasetRecord {
    LinkScenario scn;
    ChannelMatrix h;
    Schedule label;
    SettingKey setting;
    std::string map_id;
    RadioParams rp;
};

struct Dataset {
    std::filesystem::path dir;
    json manifest;
    std::map<std::string, CityMap> maps; // by map_id
};

inline Dataset open_dataset(const std::filesystem::path& dir) {
    Dataset ds;
    ds.dir = dir;
    ds.manifest = read_json_file(dir / "manifest.json");
    require(ds.manifest.value("format", "") == "urbanlinq-dataset-v1",
            "not a dataset directory: " + dir.string());
    for (const auto& split : ds.manifest.at("splits").items())
        for (const auto& mid : split.value().at("maps")) {
            std::string id = mid.get<std::string>();
            if (!ds.maps.count(id)) ds.maps[id] = load_map(dir / "maps" / (id + ".cmap"));
        }
    return ds;
}

struct RecordFilter {
    std::optional<DistanceGroup> group;
    std::optional<int> n_links;
    int limit = -1; // keep the first `limit` matches when >= 0
};

inline std::vector<DatasetRecord> load_records(const Dataset& ds, const std::string& split,
                                               const RecordFilter& filter = {}) {
    require(ds.manifest.at("splits").contains(split), "dataset has no split: " + split);
    std::vector<DatasetRecord> out;
    for (const auto& e : ds.manifest.at("splits").at(split).at("scenarios")) {
        SettingKey key{e.at("n_links").get<int>(), group_from_name(e.at("group"))};
        if (filter.group && *filter.group != key.group) continue;
        if (filter.n_links && *filter.n_links != key.n_links) continue;
        if (filter.limit >= 0 && int(out.size()) >= filter.limit) break;
        std::string stem = detail::scenario_stem(e.at("idx").get<int>());
        DatasetRecord rec;
        rec.scn = load_scenario(ds.dir / split / ("scn_" + stem + ".json"));
        rec.h = load_channel(ds.dir / split / ("mat_" + stem + ".json"));
        rec.label = load_schedule(ds.dir / split / ("sch_" + stem + ".json"));
        rec.setting = key;
        rec.map_id = e.at("map_id").get<std::string>();
        rec.rp = RadioParams::from_scenario(rec.scn);
        out.push_back(std::move(rec));
    }
    return out;
}

inline std::vector<TrainSample> to_train_samples(const std::vector<DatasetRecord>& recs) {
    std::vector<TrainSample> out;
    out.reserve(recs.size());
    for (const DatasetRecord& r : recs) out.push_back({r.h, r.label, r.rp});
    return out;
}

} // namespace ulinq

#endif
