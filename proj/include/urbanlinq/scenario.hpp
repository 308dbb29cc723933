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

#ifndef URBANLINQ_SCENARIO_HPP
#define URBANLINQ_SCENARIO_HPP

#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "citymap.hpp"
#include "common.hpp"
#include "fileio.hpp"
#include "rng.hpp"

namespace ulinq {

struct Link {
    Point tx;
    Point rx;
};

/// N transmitter/receiver pairs on a map plus the shared radio parameters.
/// All links use the same transmit power.
struct LinkScenario {
    std::string map_ref;
    std::vector<Link> links;
    double tx_power_dbm = 23.0;
    double noise_power_dbm = -104.0;
    double bandwidth_hz = 10e6;
    double d_min_m = 2.0;
    double d_max_m = 32.0;
    std::uint64_t seed = 0;

    int n() const { return int(links.size()); }

    void validate(const CityMap& map) const {
        require(map.map_id == map_ref, "scenario references a different map");
        require(!links.empty(), "scenario must have at least one link");
        require(d_min_m >= 0.0 && d_max_m >= d_min_m, "bad distance range");
        for (std::size_t i = 0; i < links.size(); ++i) {
            const Link& l = links[i];
            require(map.open_at(l.tx), "tx " + std::to_string(i) + " not on an open cell");
            require(map.open_at(l.rx), "rx " + std::to_string(i) + " not on an open cell");
            double d = distance(l.tx, l.rx);
            require(d >= d_min_m - 1e-9 && d <= d_max_m + 1e-9,
                    "link " + std::to_string(i) + " distance outside range");
        }
    }
};

inline constexpr int kPlacementAttemptCap = 10000; // per link

struct ScenarioParams {
    double tx_power_dbm = 23.0;
    double noise_power_dbm = -104.0;
    double bandwidth_hz = 10e6;
    /// Optional fixed transmitter sites (cell centers). When non-empty, each
    /// link takes a distinct site instead of a uniform open-space point;
    /// receivers are still sampled continuously. This mirrors reusing one
    /// precomputed radiomap per transmitter site across many scenarios.
    std::vector<Point> tx_sites;
};

/// Sample N links with both endpoints on open cells and pair distance uniform
/// in [d_min, d_max]. Deterministic per (map, args, seed). Throws after a
/// bounded number of rejection attempts, reporting the count.
inline LinkScenario sample_scenario(const CityMap& map, int n_links, double d_min, double d_max,
                                    std::uint64_t seed, const ScenarioParams& params = {}) {
    require(n_links >= 1, "n_links must be >= 1");
    require(d_min >= 0.0 && d_max >= d_min, "require d_max >= d_min >= 0");

    std::vector<std::size_t> open_cells;
    for (std::size_t i = 0; i < map.occupancy.size(); ++i)
        if (map.occupancy[i] == 0) open_cells.push_back(i);
    require(!open_cells.empty(), "map has no open cells");

    const bool sited = !params.tx_sites.empty();
    std::vector<int> site_order;
    if (sited) {
        require(int(params.tx_sites.size()) >= n_links,
                "fewer tx sites than links requested");
        for (std::size_t i = 0; i < params.tx_sites.size(); ++i) site_order.push_back(int(i));
    }

    Rng rng(seed);
    if (sited) rng.shuffle(site_order);

    LinkScenario scn;
    scn.map_ref = map.map_id;
    scn.tx_power_dbm = params.tx_power_dbm;
    scn.noise_power_dbm = params.noise_power_dbm;
    scn.bandwidth_hz = params.bandwidth_hz;
    scn.d_min_m = d_min;
    scn.d_max_m = d_max;
    scn.seed = seed;

    constexpr int kAttemptsPerSite = 200;
    int next_site = 0;
    for (int li = 0; li < n_links; ++li) {
        bool placed = false;
        int attempts = 0;
        Point tx{};
        if (sited) {
            require(next_site < int(site_order.size()), "ran out of tx sites");
            tx = params.tx_sites[std::size_t(site_order[std::size_t(next_site)])];
            ++next_site;
            require(map.open_at(tx), "tx site not on an open cell");
        }
        while (attempts < kPlacementAttemptCap) {
            ++attempts;
            if (!sited) {
                std::size_t cell = open_cells[rng.uniform_int(open_cells.size())];
                int r = int(cell / std::size_t(map.cols));
                int c = int(cell % std::size_t(map.cols));
                tx = {(c + rng.uniform01()) / map.resolution,
                      (r + rng.uniform01()) / map.resolution};
            } else if (attempts % kAttemptsPerSite == 0 && next_site < int(site_order.size())) {
                // this site keeps rejecting receivers; move to the next unused one
                tx = params.tx_sites[std::size_t(site_order[std::size_t(next_site)])];
                ++next_site;
                require(map.open_at(tx), "tx site not on an open cell");
            }
            double d = rng.uniform(d_min, d_max);
            if (d_min == d_max) d = d_min;
            double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
            Point rx{tx.x + d * std::cos(theta), tx.y + d * std::sin(theta)};
            if (!map.open_at(rx)) continue;
            scn.links.push_back({tx, rx});
            placed = true;
            break;
        }
        if (!placed)
            throw error("could not place link " + std::to_string(li) + " after " +
                        std::to_string(attempts) + " attempts");
    }
    scn.validate(map);
    return scn;
}

inline json scenario_to_json(const LinkScenario& s) {
    json j;
    j["format"] = "urbanlinq-scenario-v1";
    j["map_ref"] = s.map_ref;
    j["tx_power_dbm"] = s.tx_power_dbm;
    j["noise_power_dbm"] = s.noise_power_dbm;
    j["bandwidth_hz"] = s.bandwidth_hz;
    j["d_min_m"] = s.d_min_m;
    j["d_max_m"] = s.d_max_m;
    j["seed"] = s.seed;
    json links = json::array();
    for (const Link& l : s.links)
        links.push_back({{"tx", {l.tx.x, l.tx.y}}, {"rx", {l.rx.x, l.rx.y}}});
    j["links"] = std::move(links);
    return j;
}

inline LinkScenario scenario_from_json(const json& j) {
    require(j.value("format", "") == "urbanlinq-scenario-v1", "not a scenario");
    LinkScenario s;
    s.map_ref = j.at("map_ref").get<std::string>();
    s.tx_power_dbm = j.at("tx_power_dbm").get<double>();
    s.noise_power_dbm = j.at("noise_power_dbm").get<double>();
    s.bandwidth_hz = j.at("bandwidth_hz").get<double>();
    s.d_min_m = j.at("d_min_m").get<double>();
    s.d_max_m = j.at("d_max_m").get<double>();
    s.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& lj : j.at("links")) {
        Link l;
        l.tx = {lj.at("tx")[0].get<double>(), lj.at("tx")[1].get<double>()};
        l.rx = {lj.at("rx")[0].get<double>(), lj.at("rx")[1].get<double>()};
        s.links.push_back(l);
    }
    return s;
}

inline void save_scenario(const LinkScenario& s, const std::filesystem::path& path) {
    write_json_file(path, scenario_to_json(s));
}

inline LinkScenario load_scenario(const std::filesystem::path& path) {
    return scenario_from_json(read_json_file(path));
}

} // namespace ulinq

#endif
