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

#ifndef URBANLINQ_CITYMAP_HPP
#define URBANLINQ_CITYMAP_HPP

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "common.hpp"
#include "fileio.hpp"
#include "rng.hpp"

namespace ulinq {

/// Rasterized occupancy grid of a city. Cell (row r, col c) covers the square
/// x in [c,c+1)/resolution, y in [r,r+1)/resolution, origin at the bottom-left
/// corner. occupancy[r*cols+c] == true means building.
struct CityMap {
    double width_m = 256.0;
    double height_m = 256.0;
    double resolution = 1.0; // cells per meter
    int rows = 0;
    int cols = 0;
    std::vector<std::uint8_t> occupancy; // row-major, 1 = building
    std::string map_id;

    bool building(int r, int c) const { return occupancy[std::size_t(r) * cols + c] != 0; }
    bool open(int r, int c) const { return !building(r, c); }
    bool in_bounds_cell(int r, int c) const { return r >= 0 && r < rows && c >= 0 && c < cols; }

    bool in_bounds(const Point& p) const {
        return p.x >= 0.0 && p.x < width_m && p.y >= 0.0 && p.y < height_m;
    }

    int col_of(double x) const { return int(std::floor(x * resolution)); }
    int row_of(double y) const { return int(std::floor(y * resolution)); }

    bool open_at(const Point& p) const {
        return in_bounds(p) && open(row_of(p.y), col_of(p.x));
    }

    /// Center of the cell containing p (what propagation queries use).
    Point cell_center(const Point& p) const {
        return {(col_of(p.x) + 0.5) / resolution, (row_of(p.y) + 0.5) / resolution};
    }

    Point center_of_cell(int r, int c) const {
        return {(c + 0.5) / resolution, (r + 0.5) / resolution};
    }

    std::size_t open_cell_count() const {
        std::size_t n = 0;
        for (auto v : occupancy) n += (v == 0);
        return n;
    }

    void validate() const {
        auto integral = [](double v) { return std::abs(v - std::round(v)) < 1e-9; };
        require(width_m > 0 && height_m > 0 && resolution > 0, "map dimensions must be positive");
        require(integral(width_m * resolution) && integral(height_m * resolution),
                "width*resolution and height*resolution must be integral");
        require(cols == int(std::llround(width_m * resolution)) &&
                rows == int(std::llround(height_m * resolution)),
                "grid shape does not match width/height times resolution");
        require(occupancy.size() == std::size_t(rows) * cols, "occupancy size mismatch");
        require(open_cell_count() > 0, "map has no open cells");
    }
};

struct CityMapParams {
    int n_blocks_x = 4;
    int n_blocks_y = 4;
    double street_width_m = 10.0;
    double jitter = 0.0; // fraction in [0,1]; shrinks building edges randomly
    double width_m = 256.0;
    double height_m = 256.0;
    double resolution = 1.0;
};

/// Generate a Manhattan-style map: axis-aligned building rectangles separated
/// by streets of uniform width, with an open perimeter ring of the same width.
/// Deterministic for fixed (seed, params).
inline CityMap generate_city_map(std::uint64_t seed, const CityMapParams& p) {
    require(p.n_blocks_x >= 1 && p.n_blocks_y >= 1, "block counts must be >= 1");
    require(p.street_width_m >= 2.0, "street_width_m must be >= 2 m");
    require(p.jitter >= 0.0 && p.jitter <= 1.0, "jitter must be in [0,1]");

    CityMap m;
    m.width_m = p.width_m;
    m.height_m = p.height_m;
    m.resolution = p.resolution;
    m.cols = int(std::llround(p.width_m * p.resolution));
    m.rows = int(std::llround(p.height_m * p.resolution));
    require(std::abs(p.width_m * p.resolution - m.cols) < 1e-9 &&
            std::abs(p.height_m * p.resolution - m.rows) < 1e-9,
            "map size times resolution must be integral");
    m.occupancy.assign(std::size_t(m.rows) * m.cols, 0);

    int sw = int(std::llround(p.street_width_m * p.resolution));
    require(sw >= 1, "street width below one cell");

    // building band edges along one axis: blocks of near-equal width between
    // streets, perimeter streets included
    auto bands = [&](int total_cells, int n_blocks) {
        int content = total_cells - (n_blocks + 1) * sw;
        require(content >= n_blocks, "building rectangles would have non-positive area");
        std::vector<std::pair<int, int>> out; // [lo, hi) cell range per block
        for (int i = 0; i < n_blocks; ++i) {
            int lo = sw + i * sw + int(std::int64_t(content) * i / n_blocks);
            int hi = sw + i * sw + int(std::int64_t(content) * (i + 1) / n_blocks);
            require(hi > lo, "building rectangles would have non-positive area");
            out.emplace_back(lo, hi);
        }
        return out;
    };
    auto xbands = bands(m.cols, p.n_blocks_x);
    auto ybands = bands(m.rows, p.n_blocks_y);

    Rng rng(seed);
    for (auto [ry0, ry1] : ybands) {
        for (auto [cx0, cx1] : xbands) {
            int x0 = cx0, x1 = cx1, y0 = ry0, y1 = ry1;
            if (p.jitter > 0.0) {
                // shrink-only jitter keeps streets connected and blocks non-empty
                int max_dx = int(p.jitter * double(x1 - x0 - 1) / 2.0);
                int max_dy = int(p.jitter * double(y1 - y0 - 1) / 2.0);
                x0 += int(rng.uniform_int(std::uint64_t(max_dx) + 1));
                x1 -= int(rng.uniform_int(std::uint64_t(max_dx) + 1));
                y0 += int(rng.uniform_int(std::uint64_t(max_dy) + 1));
                y1 -= int(rng.uniform_int(std::uint64_t(max_dy) + 1));
            }
            for (int r = y0; r < y1; ++r)
                for (int c = x0; c < x1; ++c)
                    m.occupancy[std::size_t(r) * m.cols + c] = 1;
        }
    }

    std::ostringstream id;
    id << "cm-s" << seed << "-" << p.n_blocks_x << "x" << p.n_blocks_y
       << "-sw" << sw << "-j" << p.jitter << "-" << m.cols << "x" << m.rows;
    m.map_id = id.str();
    m.validate();
    return m;
}

// --- map file: JSON header line + RLE payload ------------------------------
//
// Runs alternate open/building starting with open; each byte is a run length
// 0..255 and runs longer than 255 are split as 255,0,255,... so the value
// parity is preserved.

inline std::string rle_encode(const std::vector<std::uint8_t>& cells) {
    std::string out;
    std::uint8_t cur = 0;
    std::size_t i = 0;
    while (i < cells.size()) {
        std::size_t run = 0;
        while (i + run < cells.size() && cells[i + run] == cur) ++run;
        i += run;
        while (run > 255) {
            out.push_back(char(255));
            out.push_back(char(0));
            run -= 255;
        }
        out.push_back(char(run));
        cur ^= 1;
    }
    return out;
}

inline std::vector<std::uint8_t> rle_decode(const std::string& bytes, std::size_t n_cells) {
    std::vector<std::uint8_t> cells;
    cells.reserve(n_cells);
    std::uint8_t cur = 0;
    for (char b : bytes) {
        std::size_t run = std::size_t(std::uint8_t(b));
        cells.insert(cells.end(), run, cur);
        cur ^= 1;
    }
    require(cells.size() == n_cells, "RLE payload does not decode to the expected cell count");
    return cells;
}

inline void save_map(const CityMap& m, const std::filesystem::path& path) {
    json h;
    h["format"] = "urbanlinq-map-v1";
    h["width_m"] = m.width_m;
    h["height_m"] = m.height_m;
    h["resolution"] = m.resolution;
    h["map_id"] = m.map_id;
    std::string rle = rle_encode(m.occupancy);
    h["rle_bytes"] = rle.size();
    write_header_blob(path, h, rle);
}

inline CityMap load_map(const std::filesystem::path& path) {
    auto hb = read_header_blob(path);
    require(hb.header.value("format", "") == "urbanlinq-map-v1", "not a map file: " + path.string());
    CityMap m;
    m.width_m = hb.header.at("width_m").get<double>();
    m.height_m = hb.header.at("height_m").get<double>();
    m.resolution = hb.header.at("resolution").get<double>();
    m.map_id = hb.header.at("map_id").get<std::string>();
    m.cols = int(std::llround(m.width_m * m.resolution));
    m.rows = int(std::llround(m.height_m * m.resolution));
    require(hb.blob.size() == hb.header.at("rle_bytes").get<std::size_t>(),
            "RLE payload size mismatch: " + path.string());
    m.occupancy = rle_decode(hb.blob, std::size_t(m.rows) * m.cols);
    m.validate();
    return m;
}

} // namespace ulinq

#endif
