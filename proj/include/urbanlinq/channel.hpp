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

#ifndef URBANLINQ_CHANNEL_HPP
#define URBANLINQ_CHANNEL_HPP

#include <vector>

#include "common.hpp"
#include "fileio.hpp"
#include "pathloss.hpp"
#include "radiomap.hpp"
#include "scenario.hpp"

namespace ulinq {

/// n x n linear power gains; g(j,i) is the gain from transmitter j to
/// receiver i, so the diagonal holds the direct channels.
struct ChannelMatrix {
    int n = 0;
    std::vector<double> g; // row-major, g[j*n + i]

    ChannelMatrix() = default;
    explicit ChannelMatrix(int n_) : n(n_), g(std::size_t(n_) * n_, 0.0) {}

    double operator()(int j, int i) const { return g[std::size_t(j) * n + i]; }
    double& operator()(int j, int i) { return g[std::size_t(j) * n + i]; }
    double direct(int i) const { return (*this)(i, i); }

    void validate() const {
        require(n >= 1 && g.size() == std::size_t(n) * n, "channel matrix shape mismatch");
        for (double v : g)
            require(std::isfinite(v) && v >= 0.0, "channel gains must be finite and >= 0");
        for (int i = 0; i < n; ++i)
            require(direct(i) > 0.0, "direct gain must be strictly positive");
    }
};

/// Radiomap gain at a continuous point: bilinear interpolation in dB over the
/// four surrounding cell centers, skipping building and out-of-bounds cells
/// (their weight is redistributed). All four excluded -> floor_db.
inline double radiomap_gain_at(const Radiomap& rm, const CityMap& map, const Point& p) {
    require(map.in_bounds(p), "radiomap_gain_at: point outside map");
    double fx = p.x * rm.resolution - 0.5;
    double fy = p.y * rm.resolution - 0.5;
    int c0 = int(std::floor(fx)), r0 = int(std::floor(fy));
    double wx = fx - c0, wy = fy - r0;

    double acc = 0.0, wsum = 0.0;
    for (int dr = 0; dr <= 1; ++dr)
        for (int dc = 0; dc <= 1; ++dc) {
            int r = r0 + dr, c = c0 + dc;
            if (!map.in_bounds_cell(r, c) || map.building(r, c)) continue;
            double w = (dc ? wx : 1.0 - wx) * (dr ? wy : 1.0 - wy);
            acc += w * rm.at(r, c);
            wsum += w;
        }
    if (wsum <= 0.0) return rm.floor_db;
    return acc / wsum;
}

/// Assemble the channel matrix from per-transmitter radiomaps:
/// g(j,i) = 10^(gain_dB(radiomap_j at rx_i)/10).
inline ChannelMatrix extract_channel_matrix(const std::vector<const Radiomap*>& radiomaps,
                                            const LinkScenario& scn, const CityMap& map) {
    int n = scn.n();
    require(int(radiomaps.size()) == n, "need one radiomap per link");
    for (const Radiomap* rm : radiomaps)
        require(rm->rows == map.rows && rm->cols == map.cols && rm->map_ref == map.map_id,
                "radiomap not aligned with the scenario map");

    ChannelMatrix h(n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            require(map.in_bounds(scn.links[std::size_t(i)].rx), "rx outside map");
            double db = radiomap_gain_at(*radiomaps[std::size_t(j)], map,
                                         scn.links[std::size_t(i)].rx);
            h(j, i) = db_to_linear(db);
        }
    h.validate();
    return h;
}

inline ChannelMatrix extract_channel_matrix(const std::vector<Radiomap>& radiomaps,
                                            const LinkScenario& scn, const CityMap& map) {
    std::vector<const Radiomap*> ptrs;
    ptrs.reserve(radiomaps.size());
    for (const Radiomap& rm : radiomaps) ptrs.push_back(&rm);
    return extract_channel_matrix(ptrs, scn, map);
}

/// Full propagation front end: one radiomap per transmitter, then extraction.
inline ChannelMatrix compute_channel_matrix(const CityMap& map, const LinkScenario& scn,
                                            const PropagationParams& params = {}) {
    std::vector<Radiomap> rms;
    rms.reserve(std::size_t(scn.n()));
    for (const Link& l : scn.links) rms.push_back(compute_radiomap(map, l.tx, params));
    return extract_channel_matrix(rms, scn, map);
}

/// Distance-only channel model: every entry from the two-slope path loss on
/// the straight-line tx-rx distance. Ignores the map entirely.
inline ChannelMatrix distance_channel_matrix(const LinkScenario& scn,
                                             const Itu1411Params& params = {}) {
    int n = scn.n();
    ChannelMatrix h(n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            double d = std::max(distance(scn.links[std::size_t(j)].tx,
                                         scn.links[std::size_t(i)].rx),
                                1e-3);
            h(j, i) = db_to_linear(itu1411_gain_db(d, params));
        }
    h.validate();
    return h;
}

inline json channel_to_json(const ChannelMatrix& h) {
    json j;
    j["format"] = "urbanlinq-matrix-v1";
    j["n"] = h.n;
    j["g"] = h.g;
    return j;
}

inline ChannelMatrix channel_from_json(const json& j) {
    require(j.value("format", "") == "urbanlinq-matrix-v1", "not a channel matrix");
    ChannelMatrix h;
    h.n = j.at("n").get<int>();
    h.g = j.at("g").get<std::vector<double>>();
    h.validate();
    return h;
}

inline void save_channel(const ChannelMatrix& h, const std::filesystem::path& path) {
    write_json_file(path, channel_to_json(h));
}

inline ChannelMatrix load_channel(const std::filesystem::path& path) {
    return channel_from_json(read_json_file(path));
}

} // namespace ulinq

#endif
