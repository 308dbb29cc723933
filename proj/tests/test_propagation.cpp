#include <doctest.h>

#include <cmath>
#include <filesystem>

#include <urbanlinq/citymap.hpp>
#include <urbanlinq/pathloss.hpp>
#include <urbanlinq/radiomap.hpp>

using namespace ulinq;
namespace fs = std::filesystem;

namespace {

CityMap empty_map(int cells, double res = 1.0) {
    CityMap m;
    m.width_m = cells / res;
    m.height_m = cells / res;
    m.resolution = res;
    m.rows = m.cols = cells;
    m.occupancy.assign(std::size_t(cells) * cells, 0);
    m.map_id = "empty";
    m.validate();
    return m;
}

void add_rect(CityMap& m, int r0, int r1, int c0, int c1) {
    for (int r = r0; r < r1; ++r)
        for (int c = c0; c < c1; ++c) m.occupancy[std::size_t(r) * m.cols + c] = 1;
}

// Independent oracle for the dominant-path cost: fixed-point relaxation over
// (cell, incoming direction) states with exact (orth, diag, corners)
// comparison. Deliberately written as plain repeated sweeps, not a heap
// search, so it shares no code path with the implementation.
struct OracleCost {
    long orth = -1, diag = 0, corners = 0;
    bool reached() const { return orth >= 0; }
    double length() const { return double(orth) + std::numbers::sqrt2 * double(diag); }
};

bool oracle_less(const OracleCost& a, const OracleCost& b) {
    if (!b.reached()) return a.reached();
    if (!a.reached()) return false;
    // exact compare of orth + diag*sqrt(2)
    long p = a.orth - b.orth, q = b.diag - a.diag;
    int cmp;
    if (p == 0 && q == 0)
        cmp = 0;
    else if (p <= 0 && q >= 0)
        cmp = -1;
    else if (p >= 0 && q <= 0)
        cmp = 1;
    else {
        long lhs = p * p, rhs = 2 * q * q;
        cmp = p > 0 ? (lhs < rhs ? -1 : (lhs == rhs ? 0 : 1))
                    : (lhs > rhs ? -1 : (lhs == rhs ? 0 : 1));
    }
    if (cmp != 0) return cmp < 0;
    return a.corners < b.corners;
}

std::vector<OracleCost> oracle_costs(const CityMap& m, int sr, int sc) {
    const int dirs[8][2] = {{-1, -1}, {0, -1}, {1, -1}, {-1, 0}, {1, 0}, {-1, 1}, {0, 1}, {1, 1}};
    auto near_building = [&](int r, int c) {
        for (int dr = -1; dr <= 1; ++dr)
            for (int dc = -1; dc <= 1; ++dc) {
                int rr = r + dr, cc = c + dc;
                if (m.in_bounds_cell(rr, cc) && m.building(rr, cc)) return true;
            }
        return false;
    };
    auto can_move = [&](int r, int c, int dc, int dr) {
        int nr = r + dr, nc = c + dc;
        if (!m.in_bounds_cell(nr, nc) || m.building(nr, nc)) return false;
        if (dc != 0 && dr != 0 && (m.building(r, nc) || m.building(nr, c))) return false;
        return true;
    };

    std::vector<std::array<OracleCost, 8>> dist(m.occupancy.size());
    // seed with first moves from the source
    for (int d = 0; d < 8; ++d) {
        int dc = dirs[d][0], dr = dirs[d][1];
        if (!can_move(sr, sc, dc, dr)) continue;
        bool diag = dc != 0 && dr != 0;
        OracleCost oc{diag ? 0L : 1L, diag ? 1L : 0L, 0};
        auto& slot = dist[std::size_t(sr + dr) * m.cols + (sc + dc)][std::size_t(d)];
        if (oracle_less(oc, slot)) slot = oc;
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (int r = 0; r < m.rows; ++r)
            for (int c = 0; c < m.cols; ++c) {
                if (m.building(r, c)) continue;
                for (int din = 0; din < 8; ++din) {
                    const OracleCost& cur = dist[std::size_t(r) * m.cols + c][std::size_t(din)];
                    if (!cur.reached()) continue;
                    for (int dout = 0; dout < 8; ++dout) {
                        int dc = dirs[dout][0], dr = dirs[dout][1];
                        if (!can_move(r, c, dc, dr)) continue;
                        bool diag = dc != 0 && dr != 0;
                        OracleCost nxt = cur;
                        nxt.orth += diag ? 0 : 1;
                        nxt.diag += diag ? 1 : 0;
                        if (dout != din && near_building(r, c)) nxt.corners += 1;
                        auto& slot =
                            dist[std::size_t(r + dr) * m.cols + (c + dc)][std::size_t(dout)];
                        if (oracle_less(nxt, slot)) {
                            slot = nxt;
                            changed = true;
                        }
                    }
                }
            }
    }
    std::vector<OracleCost> best(m.occupancy.size());
    for (std::size_t i = 0; i < best.size(); ++i)
        for (int d = 0; d < 8; ++d)
            if (oracle_less(dist[i][std::size_t(d)], best[i])) best[i] = dist[i][std::size_t(d)];
    return best;
}

} // namespace

TEST_CASE("los_visible basics") {
    CityMap m = empty_map(32);
    CHECK(los_visible(m, {5.5, 5.5}, {5.5, 5.5}));      // zero-length segment
    CHECK(los_visible(m, {1.5, 1.5}, {30.5, 28.5}));    // empty map, any pair
    add_rect(m, 10, 20, 10, 20);
    CHECK_FALSE(los_visible(m, {5.5, 15.5}, {25.5, 15.5})); // crosses the rectangle
    CHECK(los_visible(m, {5.5, 5.5}, {25.5, 5.5}));         // passes south of it
    CHECK_THROWS_AS(los_visible(m, {-1.0, 0.0}, {5.0, 5.0}), error);
}

TEST_CASE("radiomap on an empty map reduces to free space") {
    CityMap m = empty_map(32);
    PropagationParams pp;
    Radiomap rm = compute_radiomap(m, {16.5, 16.5}, pp);
    // exact free-space values at several distances
    for (auto [r, c] : {std::pair{16, 20}, {4, 16}, {28, 28}}) {
        double d = distance(m.center_of_cell(r, c), rm.tx);
        CHECK(rm.at(r, c) == doctest::Approx(-fspl_db(d, pp.f_carrier_hz)).epsilon(1e-12));
    }
    // distance clamp at the tx cell
    CHECK(rm.at(16, 16) ==
          doctest::Approx(-(20.0 * std::log10(pp.f_carrier_hz) - 147.55)).epsilon(1e-12));
    // tx cell gain is the grid maximum
    double mx = -1e300;
    for (double v : rm.gains_db) mx = std::max(mx, v);
    CHECK(rm.at(16, 16) == doctest::Approx(mx));
}

TEST_CASE("radiomap monotonicity with distance on an empty map") {
    CityMap m = empty_map(64);
    PropagationParams pp;
    Radiomap rm = compute_radiomap(m, {32.5, 32.5}, pp);
    double prev = rm.at(32, 33);
    for (int c = 34; c < 64; ++c) {
        double cur = rm.at(32, c);
        CHECK(cur < prev); // strictly decreasing beyond the 1 m clamp
        prev = cur;
    }
}

TEST_CASE("radiomap matches the independent dominant-path oracle on a 32x32 map") {
    CityMap m = empty_map(32);
    add_rect(m, 8, 24, 12, 20); // central slab forces corner diffraction
    m.map_id = "oracle-map";
    PropagationParams pp;
    Radiomap rm = compute_radiomap(m, {4.5, 16.5}, pp);

    auto oracle = oracle_costs(m, 16, 4);
    int checked = 0, nlos_checked = 0;
    for (int r = 0; r < 32; ++r)
        for (int c = 0; c < 32; ++c) {
            if (m.building(r, c)) {
                CHECK(rm.at(r, c) == pp.floor_db);
                continue;
            }
            Point cc = m.center_of_cell(r, c);
            double expected;
            if (los_visible(m, rm.tx, cc)) {
                expected = -fspl_db(distance(rm.tx, cc), pp.f_carrier_hz);
            } else {
                const OracleCost& oc = oracle[std::size_t(r) * m.cols + c];
                REQUIRE(oc.reached());
                int k = int(std::min<long>(oc.corners, pp.k_max));
                expected = -fspl_db(oc.length() / m.resolution, pp.f_carrier_hz) -
                           double(k) * pp.diffraction_loss_db;
                ++nlos_checked;
            }
            expected = std::max(expected, pp.floor_db);
            CHECK(rm.at(r, c) == doctest::Approx(expected).epsilon(1e-9));
            ++checked;
        }
    CHECK(checked > 500);
    CHECK(nlos_checked > 100); // the slab really shadows a region
}

TEST_CASE("cells behind one convex corner cost exactly one diffraction penalty") {
    // small block in the open; its shadow holds single-corner cells whose
    // corner count the independent oracle certifies
    CityMap m = empty_map(24);
    add_rect(m, 10, 14, 10, 14);
    m.map_id = "corner-map";
    PropagationParams pp;
    Radiomap rm = compute_radiomap(m, {4.5, 12.5}, pp);

    auto oracle = oracle_costs(m, 12, 4);
    int one_corner_cells = 0;
    for (int r = 0; r < m.rows; ++r)
        for (int c = 0; c < m.cols; ++c) {
            if (m.building(r, c) || los_visible(m, rm.tx, m.center_of_cell(r, c))) continue;
            const OracleCost& oc = oracle[std::size_t(r) * m.cols + c];
            REQUIRE(oc.reached());
            if (oc.corners != 1) continue;
            ++one_corner_cells;
            double expected =
                -fspl_db(oc.length() / m.resolution, pp.f_carrier_hz) - pp.diffraction_loss_db;
            CHECK(rm.at(r, c) == doctest::Approx(expected).epsilon(1e-9));
        }
    CHECK(one_corner_cells > 0);
}

TEST_CASE("repair_radiomap fixes isolated drops and is idempotent") {
    CityMap m = empty_map(16);
    add_rect(m, 6, 10, 6, 10);
    m.map_id = "repair-map";
    Radiomap rm = compute_radiomap(m, {2.5, 2.5});

    Radiomap clean = repair_radiomap(rm, m, 40.0);
    for (std::size_t i = 0; i < rm.gains_db.size(); ++i)
        CHECK(clean.gains_db[i] == rm.gains_db[i]); // no abnormal cells -> identity

    Radiomap broken = rm;
    broken.at(3, 12) = -200.0; // isolated artifact
    Radiomap fixed = repair_radiomap(broken, m, 40.0);
    double mx = -1e300;
    for (int dr = -1; dr <= 1; ++dr)
        for (int dc = -1; dc <= 1; ++dc) {
            if (!dr && !dc) continue;
            if (m.open(3 + dr, 12 + dc)) mx = std::max(mx, broken.at(3 + dr, 12 + dc));
        }
    CHECK(fixed.at(3, 12) == doctest::Approx(mx));

    Radiomap twice = repair_radiomap(fixed, m, 40.0);
    CHECK(twice.gains_db == fixed.gains_db); // idempotent
}

TEST_CASE("repair_radiomap near buildings uses only open neighbors") {
    // cell with buildings on 5 of 8 sides; forced drop takes max open neighbor
    CityMap m = empty_map(8);
    add_rect(m, 0, 2, 0, 3);  // occupy a corner pocket
    add_rect(m, 2, 3, 0, 1);
    m.map_id = "pocket-map";
    // hand-built radiomap
    Radiomap rm;
    rm.map_ref = m.map_id;
    rm.rows = rm.cols = 8;
    rm.resolution = 1;
    rm.floor_db = -160;
    rm.gains_db.assign(64, -60.0);
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c)
            if (m.building(r, c)) rm.gains_db[std::size_t(r) * 8 + c] = rm.floor_db;
    // target cell (2,1): neighbors (1,0),(1,1),(1,2),(2,0) are buildings
    rm.gains_db[2 * 8 + 1] = -200.0;
    rm.gains_db[2 * 8 + 2] = -70.0;
    rm.gains_db[3 * 8 + 0] = -65.0;
    rm.gains_db[3 * 8 + 1] = -72.0;
    rm.gains_db[3 * 8 + 2] = -80.0;
    Radiomap fixed = repair_radiomap(rm, m, 40.0);
    CHECK(fixed.at(2, 1) == doctest::Approx(-65.0)); // max of the open neighbors
}

TEST_CASE("compute_radiomap rejects a transmitter inside a building") {
    CityMap m = empty_map(16);
    add_rect(m, 4, 8, 4, 8);
    m.map_id = "tx-guard";
    CHECK_THROWS_AS(compute_radiomap(m, {5.5, 5.5}), error);
    CHECK_THROWS_AS(compute_radiomap(m, {100.0, 5.5}), error); // outside map
}

TEST_CASE("itu1411 two-slope gain") {
    Itu1411Params p;
    double at_bp = itu1411_gain_db(p.breakpoint_m, p);
    // continuity at the breakpoint: approach from both sides
    CHECK(itu1411_gain_db(p.breakpoint_m - 1e-9, p) == doctest::Approx(at_bp).epsilon(1e-9));
    CHECK(itu1411_gain_db(p.breakpoint_m + 1e-9, p) == doctest::Approx(at_bp).epsilon(1e-9));
    // slope below: n_before = 2 means +20 dB per decade toward the tx
    CHECK(itu1411_gain_db(p.breakpoint_m / 10.0, p) == doctest::Approx(at_bp + 20.0).epsilon(1e-12));
    // slope above: n_after = 4 means -40 dB per decade away
    CHECK(itu1411_gain_db(p.breakpoint_m * 10.0, p) == doctest::Approx(at_bp - 40.0).epsilon(1e-12));
    CHECK_THROWS_AS(itu1411_gain_db(0.0, p), error);
}

TEST_CASE("radiomap file round trip") {
    CityMap m = empty_map(16);
    add_rect(m, 4, 8, 4, 8);
    m.map_id = "io-map";
    Radiomap rm = compute_radiomap(m, {1.5, 1.5});
    fs::path dir = fs::temp_directory_path() / "ulinq_test_prop";
    fs::create_directories(dir);
    save_radiomap(rm, dir / "a.rmap");
    Radiomap l = load_radiomap(dir / "a.rmap");
    CHECK(l.rows == rm.rows);
    CHECK(l.tx.x == rm.tx.x);
    for (std::size_t i = 0; i < rm.gains_db.size(); ++i)
        CHECK(l.gains_db[i] == doctest::Approx(rm.gains_db[i]).epsilon(1e-6)); // f32 storage
    save_radiomap(l, dir / "b.rmap");
    // reload of a reloaded map is byte-identical (values already f32)
    Radiomap l2 = load_radiomap(dir / "b.rmap");
    save_radiomap(l2, dir / "c.rmap");
    CHECK(read_file_bytes(dir / "b.rmap") == read_file_bytes(dir / "c.rmap"));
}
