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

#ifndef URBANLINQ_RADIOMAP_HPP
#define URBANLINQ_RADIOMAP_HPP

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numbers>
#include <queue>
#include <vector>

#include "citymap.hpp"
#include "common.hpp"
#include "fileio.hpp"
#include "pathloss.hpp"

namespace ulinq {

/// Per-transmitter grid of path gain in dB (<= 0), aligned with the CityMap
/// grid. Building cells hold floor_db.
struct Radiomap {
    std::string map_ref;
    Point tx; // snapped to a cell center
    int rows = 0;
    int cols = 0;
    double resolution = 1.0;
    double floor_db = -160.0;
    std::vector<double> gains_db; // row-major

    double at(int r, int c) const { return gains_db[std::size_t(r) * cols + c]; }
    double& at(int r, int c) { return gains_db[std::size_t(r) * cols + c]; }
};

struct PropagationParams {
    double f_carrier_hz = 5.9e9;
    double diffraction_loss_db = 15.0;
    int k_max = 3; // cap on charged corner events
    double floor_db = -160.0;
};

// ---------------------------------------------------------------------------
// Line of sight
// ---------------------------------------------------------------------------

/// True iff the segment a-b crosses no building cell. Supercover traversal:
/// when the segment passes exactly through a cell corner, all cells meeting at
/// that corner count as crossed. Out-of-bounds endpoints are rejected.
inline bool los_visible(const CityMap& map, const Point& a, const Point& b) {
    require(map.in_bounds(a) && map.in_bounds(b), "los_visible: point outside map");

    // grid coordinates (unit = one cell)
    double ax = a.x * map.resolution, ay = a.y * map.resolution;
    double bx = b.x * map.resolution, by = b.y * map.resolution;

    int cx = int(std::floor(ax)), cy = int(std::floor(ay));
    const int ex = int(std::floor(bx)), ey = int(std::floor(by));
    if (map.building(cy, cx)) return false;
    if (cx == ex && cy == ey) return true;

    double dx = bx - ax, dy = by - ay;
    int step_x = dx > 0 ? 1 : (dx < 0 ? -1 : 0);
    int step_y = dy > 0 ? 1 : (dy < 0 ? -1 : 0);
    double inv_dx = dx != 0 ? 1.0 / dx : 0.0;
    double inv_dy = dy != 0 ? 1.0 / dy : 0.0;

    auto t_next_x = [&](int c) {
        return dx != 0 ? (double(c + (step_x > 0 ? 1 : 0)) - ax) * inv_dx
                       : std::numeric_limits<double>::infinity();
    };
    auto t_next_y = [&](int r) {
        return dy != 0 ? (double(r + (step_y > 0 ? 1 : 0)) - ay) * inv_dy
                       : std::numeric_limits<double>::infinity();
    };

    double tmax_x = t_next_x(cx), tmax_y = t_next_y(cy);
    const double eps = 1e-12;
    // bounded by the number of cells the segment can touch
    int guard = 2 * (std::abs(ex - cx) + std::abs(ey - cy)) + 4;
    while ((cx != ex || cy != ey) && guard-- > 0) {
        if (std::abs(tmax_x - tmax_y) <= eps && step_x != 0 && step_y != 0) {
            // exact corner crossing: both side cells count as crossed
            if (map.in_bounds_cell(cy, cx + step_x) && map.building(cy, cx + step_x)) return false;
            if (map.in_bounds_cell(cy + step_y, cx) && map.building(cy + step_y, cx)) return false;
            cx += step_x;
            cy += step_y;
            tmax_x = t_next_x(cx);
            tmax_y = t_next_y(cy);
        } else if (tmax_x < tmax_y) {
            cx += step_x;
            tmax_x = t_next_x(cx);
        } else {
            cy += step_y;
            tmax_y = t_next_y(cy);
        }
        if (!map.in_bounds_cell(cy, cx)) return true; // numeric spill past the endpoint
        if (map.building(cy, cx)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Dominant-path gain: grid shortest path with per-corner diffraction penalty
// ---------------------------------------------------------------------------

namespace detail {

// 8-connected moves in lexicographic (dcol, drow) order; this order is the
// documented direction tie-break.
inline constexpr int kDirDc[8] = {-1, -1, -1, 0, 0, 1, 1, 1};
inline constexpr int kDirDr[8] = {-1, 0, 1, -1, 1, -1, 0, 1};
inline constexpr bool kDirDiag[8] = {true, false, true, false, false, true, false, true};

// exact comparison of path lengths a1 + b1*sqrt(2) vs a2 + b2*sqrt(2)
// (a = orthogonal steps, b = diagonal steps)
inline int cmp_len(std::int64_t a1, std::int64_t b1, std::int64_t a2, std::int64_t b2) {
    std::int64_t p = a1 - a2;  // compare p vs q*sqrt(2)
    std::int64_t q = b2 - b1;
    if (p <= 0 && q >= 0) return (p == 0 && q == 0) ? 0 : -1;
    if (p >= 0 && q <= 0) return (p == 0 && q == 0) ? 0 : 1;
    // p and q have the same sign here
    std::int64_t lhs = p * p, rhs = 2 * q * q;
    if (p > 0) return lhs < rhs ? -1 : (lhs == rhs ? 0 : 1);
    return lhs > rhs ? -1 : (lhs == rhs ? 0 : 1);
}

struct PathCost {
    std::int32_t orth = -1; // -1 marks unreached
    std::int32_t diag = 0;
    std::int32_t corners = 0;

    bool reached() const { return orth >= 0; }
    double length_cells() const { return double(orth) + std::numbers::sqrt2 * double(diag); }
};

// lexicographic (length, corners); returns true when lhs is strictly better
inline bool cost_less(const PathCost& l, const PathCost& r) {
    if (!r.reached()) return l.reached();
    if (!l.reached()) return false;
    int c = cmp_len(l.orth, l.diag, r.orth, r.diag);
    if (c != 0) return c < 0;
    return l.corners < r.corners;
}

/// All-cells shortest open-space paths from a source cell. State is
/// (cell, incoming direction); cost is (length, corner count) compared
/// lexicographically, with exact length comparison. A corner event is a
/// direction change at a cell 8-adjacent to a building. Diagonal moves may
/// not cut through blocked orthogonal neighbors.
class DominantPathSearch {
public:
    DominantPathSearch(const CityMap& map, int src_r, int src_c) : map_(map) {
        const int rows = map.rows, cols = map.cols;
        near_building_.assign(std::size_t(rows) * cols, 0);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) {
                bool nb = false;
                for (int dr = -1; dr <= 1 && !nb; ++dr)
                    for (int dc = -1; dc <= 1 && !nb; ++dc) {
                        int rr = r + dr, cc = c + dc;
                        if (map.in_bounds_cell(rr, cc) && map.building(rr, cc)) nb = true;
                    }
                near_building_[std::size_t(r) * cols + c] = nb ? 1 : 0;
            }

        dist_.assign(std::size_t(rows) * cols * 8, PathCost{});
        run(src_r, src_c);
    }

    /// Best cost over incoming directions (ties resolved by direction order).
    PathCost best(int r, int c) const {
        PathCost best{};
        for (int d = 0; d < 8; ++d) {
            const PathCost& pc = dist_[state(r, c, d)];
            if (cost_less(pc, best)) best = pc;
        }
        return best;
    }

private:
    std::size_t state(int r, int c, int d) const {
        return (std::size_t(r) * map_.cols + c) * 8 + std::size_t(d);
    }

    bool move_ok(int r, int c, int d) const {
        int nr = r + kDirDr[d], nc = c + kDirDc[d];
        if (!map_.in_bounds_cell(nr, nc) || map_.building(nr, nc)) return false;
        if (kDirDiag[d]) {
            if (map_.building(r, nc) || map_.building(nr, c)) return false; // no corner cutting
        }
        return true;
    }

    struct HeapItem {
        PathCost cost;
        std::int32_t r, c;
        std::int8_t dir;
    };
    struct HeapCmp {
        bool operator()(const HeapItem& a, const HeapItem& b) const {
            // priority_queue pops the largest, so invert
            if (cost_less(a.cost, b.cost)) return false;
            if (cost_less(b.cost, a.cost)) return true;
            return a.dir > b.dir;
        }
    };

    void run(int src_r, int src_c) {
        std::priority_queue<HeapItem, std::vector<HeapItem>, HeapCmp> heap;
        for (int d = 0; d < 8; ++d) {
            if (!move_ok(src_r, src_c, d)) continue;
            PathCost pc{kDirDiag[d] ? 0 : 1, kDirDiag[d] ? 1 : 0, 0};
            std::size_t s = state(src_r + kDirDr[d], src_c + kDirDc[d], d);
            dist_[s] = pc;
            heap.push({pc, src_r + kDirDr[d], src_c + kDirDc[d], std::int8_t(d)});
        }
        while (!heap.empty()) {
            HeapItem it = heap.top();
            heap.pop();
            const PathCost& cur = dist_[state(it.r, it.c, it.dir)];
            if (cost_less(cur, it.cost)) continue; // stale entry
            bool at_corner_cell = near_building_[std::size_t(it.r) * map_.cols + it.c] != 0;
            for (int d = 0; d < 8; ++d) {
                if (!move_ok(it.r, it.c, d)) continue;
                PathCost nxt = it.cost;
                nxt.orth += kDirDiag[d] ? 0 : 1;
                nxt.diag += kDirDiag[d] ? 1 : 0;
                if (d != it.dir && at_corner_cell) nxt.corners += 1;
                std::size_t s = state(it.r + kDirDr[d], it.c + kDirDc[d], d);
                if (cost_less(nxt, dist_[s])) {
                    dist_[s] = nxt;
                    heap.push({nxt, it.r + kDirDr[d], it.c + kDirDc[d], std::int8_t(d)});
                }
            }
        }
    }

    const CityMap& map_;
    std::vector<std::uint8_t> near_building_;
    std::vector<PathCost> dist_;
};

} // namespace detail

/// Dominant-path-style radiomap: LOS cells get free-space gain over the
/// Euclidean distance; NLOS cells get free-space gain over the shortest
/// open-space path length plus a per-corner diffraction penalty (capped at
/// k_max corners). All gains are clamped to >= floor_db. The transmitter is
/// snapped to its cell center.
inline Radiomap compute_radiomap(const CityMap& map, const Point& tx,
                                 const PropagationParams& params = {}) {
    require(map.in_bounds(tx), "compute_radiomap: tx outside map");
    int tr = map.row_of(tx.y), tc = map.col_of(tx.x);
    require(map.open(tr, tc), "compute_radiomap: tx on a building cell");

    Radiomap rm;
    rm.map_ref = map.map_id;
    rm.tx = map.center_of_cell(tr, tc);
    rm.rows = map.rows;
    rm.cols = map.cols;
    rm.resolution = map.resolution;
    rm.floor_db = params.floor_db;
    rm.gains_db.assign(std::size_t(map.rows) * map.cols, params.floor_db);

    detail::DominantPathSearch search(map, tr, tc);
    const double cell_m = 1.0 / map.resolution;

    for (int r = 0; r < map.rows; ++r) {
        for (int c = 0; c < map.cols; ++c) {
            if (map.building(r, c)) continue;
            Point cc = map.center_of_cell(r, c);
            double gain;
            if (los_visible(map, rm.tx, cc)) {
                gain = -fspl_db(distance(rm.tx, cc), params.f_carrier_hz);
            } else {
                detail::PathCost pc = search.best(r, c);
                if (!pc.reached()) {
                    rm.at(r, c) = params.floor_db;
                    continue;
                }
                int k = std::min(pc.corners, std::int32_t(params.k_max));
                gain = -fspl_db(pc.length_cells() * cell_m, params.f_carrier_hz) -
                       double(k) * params.diffraction_loss_db;
            }
            rm.at(r, c) = std::max(gain, params.floor_db);
        }
    }
    return rm;
}

/// Replace isolated deep drops: an open cell lower than every open 8-neighbor
/// by more than drop_threshold_db takes the maximum open-neighbor gain.
/// Single in-place pass in raster order; building cells untouched.
inline Radiomap repair_radiomap(const Radiomap& rm, const CityMap& map,
                                double drop_threshold_db = 40.0) {
    require(rm.rows == map.rows && rm.cols == map.cols, "radiomap not aligned with map");
    Radiomap out = rm;
    for (int r = 0; r < map.rows; ++r) {
        for (int c = 0; c < map.cols; ++c) {
            if (map.building(r, c)) continue;
            double min_nb = std::numeric_limits<double>::infinity();
            double max_nb = -std::numeric_limits<double>::infinity();
            bool has_open_nb = false;
            for (int dr = -1; dr <= 1; ++dr)
                for (int dc = -1; dc <= 1; ++dc) {
                    if (dr == 0 && dc == 0) continue;
                    int rr = r + dr, cc = c + dc;
                    if (!map.in_bounds_cell(rr, cc) || map.building(rr, cc)) continue;
                    has_open_nb = true;
                    min_nb = std::min(min_nb, out.at(rr, cc));
                    max_nb = std::max(max_nb, out.at(rr, cc));
                }
            if (has_open_nb && out.at(r, c) < min_nb - drop_threshold_db)
                out.at(r, c) = max_nb;
        }
    }
    return out;
}

// --- radiomap file: JSON header line + row-major float32 LE grid -----------

inline void save_radiomap(const Radiomap& rm, const std::filesystem::path& path) {
    json h;
    h["format"] = "urbanlinq-radiomap-v1";
    h["map_ref"] = rm.map_ref;
    h["tx"] = {rm.tx.x, rm.tx.y};
    h["rows"] = rm.rows;
    h["cols"] = rm.cols;
    h["resolution"] = rm.resolution;
    h["floor_db"] = rm.floor_db;
    h["dtype"] = "f32le";
    write_header_blob(path, h, pack_f32le(rm.gains_db));
}

inline Radiomap load_radiomap(const std::filesystem::path& path) {
    auto hb = read_header_blob(path);
    require(hb.header.value("format", "") == "urbanlinq-radiomap-v1",
            "not a radiomap file: " + path.string());
    Radiomap rm;
    rm.map_ref = hb.header.at("map_ref").get<std::string>();
    rm.tx = {hb.header.at("tx")[0].get<double>(), hb.header.at("tx")[1].get<double>()};
    rm.rows = hb.header.at("rows").get<int>();
    rm.cols = hb.header.at("cols").get<int>();
    rm.resolution = hb.header.at("resolution").get<double>();
    rm.floor_db = hb.header.at("floor_db").get<double>();
    rm.gains_db = unpack_f32le(hb.blob, 0, std::size_t(rm.rows) * rm.cols);
    return rm;
}

} // namespace ulinq

#endif
