#include <doctest.h>

#include <filesystem>
#include <set>

#include <urbanlinq/citymap.hpp>
#include <urbanlinq/dataset.hpp>
#include <urbanlinq/scenario.hpp>

using namespace ulinq;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    fs::path p = fs::temp_directory_path() / "ulinq_test_mapgen";
    fs::create_directories(p);
    return p;
}

// flood fill over open cells, 4-connected
int count_street_components(const CityMap& m) {
    std::vector<int> comp(m.occupancy.size(), -1);
    int n_comp = 0;
    for (int r = 0; r < m.rows; ++r)
        for (int c = 0; c < m.cols; ++c) {
            if (m.building(r, c) || comp[std::size_t(r) * m.cols + c] >= 0) continue;
            std::vector<std::pair<int, int>> stack{{r, c}};
            comp[std::size_t(r) * m.cols + c] = n_comp;
            while (!stack.empty()) {
                auto [cr, cc] = stack.back();
                stack.pop_back();
                const int dr[4] = {-1, 1, 0, 0}, dc[4] = {0, 0, -1, 1};
                for (int k = 0; k < 4; ++k) {
                    int nr = cr + dr[k], nc = cc + dc[k];
                    if (!m.in_bounds_cell(nr, nc) || m.building(nr, nc)) continue;
                    if (comp[std::size_t(nr) * m.cols + nc] >= 0) continue;
                    comp[std::size_t(nr) * m.cols + nc] = n_comp;
                    stack.emplace_back(nr, nc);
                }
            }
            ++n_comp;
        }
    return n_comp;
}

int count_building_rects(const CityMap& m) {
    // buildings are axis-aligned rectangles separated by streets, so counting
    // top-left building corners counts rectangles
    int rects = 0;
    for (int r = 0; r < m.rows; ++r)
        for (int c = 0; c < m.cols; ++c) {
            if (!m.building(r, c)) continue;
            bool up_open = r == 0 || !m.building(r - 1, c);
            bool left_open = c == 0 || !m.building(r, c - 1);
            if (up_open && left_open) ++rects;
        }
    return rects;
}

} // namespace

TEST_CASE("generate_city_map: 4x4 blocks on the default 256 m grid") {
    CityMapParams p;
    p.n_blocks_x = 4;
    p.n_blocks_y = 4;
    p.street_width_m = 10.0;
    CityMap m = generate_city_map(0, p);
    CHECK(m.rows == 256);
    CHECK(m.cols == 256);
    CHECK(count_building_rects(m) == 16);
    CHECK(count_street_components(m) == 1);
    // perimeter ring of open cells at least street_width wide
    for (int r = 0; r < m.rows; ++r)
        for (int c = 0; c < m.cols; ++c)
            if (r < 10 || r >= m.rows - 10 || c < 10 || c >= m.cols - 10) CHECK(m.open(r, c));
}

TEST_CASE("generate_city_map: determinism for fixed seed and params") {
    CityMapParams p;
    p.jitter = 0.7;
    CityMap a = generate_city_map(42, p);
    CityMap b = generate_city_map(42, p);
    CHECK(a.occupancy == b.occupancy);
    CHECK(a.map_id == b.map_id);
    CityMap c = generate_city_map(43, p);
    CHECK(a.occupancy != c.occupancy);
}

TEST_CASE("generate_city_map: single central building") {
    CityMapParams p;
    p.n_blocks_x = 1;
    p.n_blocks_y = 1;
    p.street_width_m = 10.0;
    CityMap m = generate_city_map(0, p);
    CHECK(count_building_rects(m) == 1);
    CHECK(count_street_components(m) == 1);
    CHECK(m.building(128, 128));
}

TEST_CASE("generate_city_map: rejects blocks with non-positive area") {
    CityMapParams p;
    p.width_m = 64;
    p.height_m = 64;
    p.n_blocks_x = 30; // 31 streets of 2 m already exceed 64 m
    p.street_width_m = 2.0;
    CHECK_THROWS_AS(generate_city_map(0, p), error);
}

TEST_CASE("map file round trip is byte-exact") {
    CityMapParams p;
    p.jitter = 0.4;
    CityMap m = generate_city_map(7, p);
    fs::path f1 = temp_dir() / "a.cmap", f2 = temp_dir() / "b.cmap";
    save_map(m, f1);
    CityMap l = load_map(f1);
    CHECK(l.occupancy == m.occupancy);
    CHECK(l.map_id == m.map_id);
    save_map(l, f2);
    CHECK(read_file_bytes(f1) == read_file_bytes(f2));
}

TEST_CASE("rle survives runs longer than 255") {
    std::vector<std::uint8_t> cells(1000, 0);
    for (int i = 300; i < 900; ++i) cells[std::size_t(i)] = 1;
    CHECK(rle_decode(rle_encode(cells), cells.size()) == cells);
    std::vector<std::uint8_t> all_open(70000, 0);
    CHECK(rle_decode(rle_encode(all_open), all_open.size()) == all_open);
    std::vector<std::uint8_t> starts_building{1, 1, 0};
    CHECK(rle_decode(rle_encode(starts_building), 3) == starts_building);
}

TEST_CASE("sample_scenario: distances and occupancy per spec ranges") {
    CityMapParams p;
    p.width_m = 128;
    p.height_m = 128;
    CityMap m = generate_city_map(1, p);

    LinkScenario s = sample_scenario(m, 10, 2.0, 32.0, 5);
    CHECK(s.n() == 10);
    for (const Link& l : s.links) {
        double d = distance(l.tx, l.rx);
        CHECK(d >= 2.0);
        CHECK(d <= 32.0);
    }

    LinkScenario s50 = sample_scenario(m, 50, 2.0, 65.0, 6);
    CHECK(s50.n() == 50);
    for (const Link& l : s50.links) {
        double d = distance(l.tx, l.rx);
        CHECK(d >= 2.0);
        CHECK(d <= 65.0);
    }
}

TEST_CASE("sample_scenario: degenerate distance range pins every distance") {
    CityMapParams p;
    p.width_m = 64;
    p.height_m = 64;
    CityMap m = generate_city_map(2, p);
    LinkScenario s = sample_scenario(m, 8, 5.0, 5.0, 3);
    for (const Link& l : s.links) CHECK(distance(l.tx, l.rx) == doctest::Approx(5.0).epsilon(1e-9));
}

TEST_CASE("sample_scenario: invariants hold over many seeds") {
    CityMapParams p;
    p.width_m = 64;
    p.height_m = 64;
    p.n_blocks_x = 3;
    p.n_blocks_y = 3;
    p.street_width_m = 8.0;
    CityMap m = generate_city_map(9, p);
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        LinkScenario s = sample_scenario(m, 4, 2.0, 24.0, seed);
        CHECK_NOTHROW(s.validate(m)); // endpoint occupancy + distance recheck
    }
}

TEST_CASE("sample_scenario: serialization is bit-identical per seed") {
    CityMapParams p;
    p.width_m = 64;
    p.height_m = 64;
    CityMap m = generate_city_map(3, p);
    LinkScenario a = sample_scenario(m, 6, 2.0, 20.0, 77);
    LinkScenario b = sample_scenario(m, 6, 2.0, 20.0, 77);
    CHECK(scenario_to_json(a).dump() == scenario_to_json(b).dump());

    fs::path f = temp_dir() / "s.json";
    save_scenario(a, f);
    LinkScenario l = load_scenario(f);
    fs::path f2 = temp_dir() / "s2.json";
    save_scenario(l, f2);
    CHECK(read_file_bytes(f) == read_file_bytes(f2));
}

TEST_CASE("sample_scenario: impossible geometry fails with attempt count") {
    CityMapParams p;
    p.width_m = 64;
    p.height_m = 64;
    CityMap m = generate_city_map(4, p);
    try {
        sample_scenario(m, 1, 500.0, 600.0, 1); // farther than the map diagonal
        FAIL("expected error");
    } catch (const error& e) {
        CHECK(std::string(e.what()).find("10000") != std::string::npos);
    }
}

TEST_CASE("sample_scenario: sited mode uses distinct sites and stays valid") {
    CityMapParams p;
    p.width_m = 64;
    p.height_m = 64;
    CityMap m = generate_city_map(5, p);
    ScenarioParams sp;
    sp.tx_sites = sample_tx_sites(m, 30, 11);
    LinkScenario s = sample_scenario(m, 10, 2.0, 20.0, 8, sp);
    std::set<std::pair<double, double>> seen;
    for (const Link& l : s.links) seen.insert({l.tx.x, l.tx.y});
    CHECK(seen.size() == 10); // distinct sites
}
