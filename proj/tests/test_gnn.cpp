#include <doctest.h>

#include <set>

#include <urbanlinq/embed.hpp>
#include <urbanlinq/linkgraph.hpp>
#include <urbanlinq/quantizer.hpp>

using namespace ulinq;

namespace {

ChannelMatrix random_matrix(Rng& rng, int n) {
    ChannelMatrix h(n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            h(j, i) = db_to_linear((i == j ? -60.0 : -85.0) + rng.uniform(-12.0, 12.0));
    return h;
}

Quantizer demo_quantizer(int p = 8) {
    Quantizer q;
    q.p = p;
    q.floor_db = -120.0;
    q.ceil_db = -40.0;
    for (int k = 1; k < p; ++k)
        q.edges.push_back(-120.0 + 80.0 * double(k) / double(p));
    q.validate();
    return q;
}

} // namespace

TEST_CASE("fit_quantizer: near-equal mass bins on continuous data") {
    Rng rng(5);
    std::vector<ChannelMatrix> mats;
    for (int k = 0; k < 8; ++k) mats.push_back(random_matrix(rng, 10));
    int p = 8;
    Quantizer q = fit_quantizer(mats, p);
    q.validate();

    std::vector<int> counts(std::size_t(p), 0);
    int total = 0;
    for (const ChannelMatrix& h : mats)
        for (double g : h.g) {
            counts[std::size_t(q.bin_of(linear_to_db(g)))] += 1;
            ++total;
        }
    for (int b = 0; b < p; ++b) {
        CHECK(counts[std::size_t(b)] >= total / p - 1);
        CHECK(counts[std::size_t(b)] <= total / p + 1);
    }
}

TEST_CASE("fit_quantizer: p=2 reduces to the median split") {
    Rng rng(6);
    std::vector<ChannelMatrix> mats{random_matrix(rng, 9)};
    Quantizer q = fit_quantizer(mats, 2);
    CHECK(q.edges.size() == 1);
    std::vector<double> vals;
    for (double g : mats[0].g) vals.push_back(linear_to_db(g));
    std::sort(vals.begin(), vals.end());
    CHECK(q.edges[0] == doctest::Approx(vals[vals.size() / 2]));
    CHECK(q.edges[0] > q.floor_db);
    CHECK(q.edges[0] < q.ceil_db);
}

TEST_CASE("fit_quantizer: constant-plus-noise keeps all edges inside the observed range") {
    Rng rng(7);
    ChannelMatrix h(6);
    for (int j = 0; j < 6; ++j)
        for (int i = 0; i < 6; ++i) h(j, i) = db_to_linear(-80.0 + rng.uniform(-0.5, 0.5));
    Quantizer q = fit_quantizer({h}, 4);
    for (double e : q.edges) {
        CHECK(e >= q.floor_db);
        CHECK(e <= q.ceil_db);
        CHECK(e >= -80.5);
        CHECK(e <= -79.5);
    }
}

TEST_CASE("fit_quantizer_uniform spreads direct gains over several bins") {
    // cross entries outnumber directs n:1; quantile bins collapse the direct
    // population into the top bin while uniform bins keep it spread
    Rng rng(8);
    std::vector<ChannelMatrix> mats;
    for (int k = 0; k < 6; ++k) {
        ChannelMatrix h(20);
        for (int j = 0; j < 20; ++j)
            for (int i = 0; i < 20; ++i)
                h(j, i) = db_to_linear(i == j ? rng.uniform(-90.0, -55.0)
                                              : rng.uniform(-150.0, -85.0));
        mats.push_back(std::move(h));
    }
    Quantizer uq = fit_quantizer_uniform(mats, 8);
    uq.validate();
    std::set<int> direct_bins_uniform, direct_bins_quantile;
    Quantizer qq = fit_quantizer(mats, 8);
    for (const ChannelMatrix& h : mats)
        for (int i = 0; i < h.n; ++i) {
            direct_bins_uniform.insert(uq.bin_of(linear_to_db(h.direct(i))));
            direct_bins_quantile.insert(qq.bin_of(linear_to_db(h.direct(i))));
        }
    CHECK(direct_bins_uniform.size() >= 3);
    CHECK(direct_bins_uniform.size() >= direct_bins_quantile.size());
    // evenly spaced edges
    for (std::size_t k = 2; k < uq.edges.size(); ++k)
        CHECK(uq.edges[k] - uq.edges[k - 1] ==
              doctest::Approx(uq.edges[1] - uq.edges[0]).epsilon(1e-9));
}

TEST_CASE("fit_quantizer rejects degenerate pools") {
    ChannelMatrix h(2);
    h(0, 0) = h(1, 1) = 1e-6;
    h(0, 1) = h(1, 0) = 1e-6; // a single distinct value
    CHECK_THROWS_AS(fit_quantizer({h}, 8), error);
}

TEST_CASE("quantize: clamp and tie rules") {
    Quantizer q = demo_quantizer();
    CHECK(q.bin_of(-500.0) == 0);           // below floor
    CHECK(q.bin_of(0.0) == q.p - 1);        // above ceil
    CHECK(q.bin_of(q.edges[2]) == 3);       // boundary value -> upper bin
    CHECK(q.bin_of(q.edges[2] - 1e-9) == 2);
    CHECK_THROWS_AS(q.bin_of(std::nan("")), error);

    // one-hot validity for arbitrary inputs
    Rng rng(8);
    for (int t = 0; t < 200; ++t) {
        auto v = quantize(q, rng.uniform(-200.0, 20.0));
        double sum = 0.0;
        int hot = 0;
        for (double e : v) {
            sum += e;
            hot += (e == 1.0);
        }
        CHECK(sum == 1.0);
        CHECK(hot == 1);
    }
}

TEST_CASE("build_graph: full adjacency has n(n-1) directed edges") {
    Rng rng(9);
    Quantizer q = demo_quantizer();
    ChannelMatrix h1 = random_matrix(rng, 1);
    LinkGraph g1 = build_graph(h1, q);
    CHECK(g1.n == 1);
    CHECK(g1.in_neighbors[0].empty());

    ChannelMatrix h3 = random_matrix(rng, 3);
    LinkGraph g3 = build_graph(h3, q);
    int edges = 0;
    for (const auto& nb : g3.in_neighbors) edges += int(nb.size());
    CHECK(edges == 6);
}

TEST_CASE("build_graph: top-1 keeps only the strongest interferer") {
    Rng rng(10);
    Quantizer q = demo_quantizer();
    ChannelMatrix h = random_matrix(rng, 5);
    LinkGraph g = build_graph(h, q, Adjacency::top_k(1));
    for (int i = 0; i < 5; ++i) {
        REQUIRE(g.in_neighbors[std::size_t(i)].size() == 1);
        int kept = g.in_neighbors[std::size_t(i)][0];
        for (int j = 0; j < 5; ++j)
            if (j != i) CHECK(h(kept, i) >= h(j, i));
    }
}

TEST_CASE("embed_forward: zero weights give zero embeddings") {
    Quantizer q = demo_quantizer();
    EmbedModel m = init_embed_model(q, 1);
    m.w1.zero();
    m.w2.zero();
    m.w3.zero();
    Rng rng(11);
    LinkGraph g = build_graph(random_matrix(rng, 4), q);
    auto mu = embed_forward(m, g);
    for (const auto& v : mu)
        for (double e : v) CHECK(e == 0.0);
}

TEST_CASE("embed_forward: isolated node reduces to relu(W1 a)") {
    Quantizer q = demo_quantizer();
    EmbedModel m = init_embed_model(q, 2);
    ChannelMatrix h(1);
    h(0, 0) = db_to_linear(-60.0);
    LinkGraph g = build_graph(h, q);
    auto mu = embed_forward(m, g);
    int bin = g.node_bin[0];
    for (int r = 0; r < m.hidden_dim; ++r)
        CHECK(mu[0][std::size_t(r)] == doctest::Approx(relu(m.w1(r, bin))).epsilon(1e-15));
}

TEST_CASE("classifier: zero weights mean exactly 0.5 per class") {
    Quantizer q = demo_quantizer();
    EmbedModel m = init_embed_model(q, 3);
    m.c2.zero();
    Rng rng(12);
    LinkGraph g = build_graph(random_matrix(rng, 3), q);
    Classified c = classify(m, embed_forward(m, g));
    for (double p : c.prob_active) CHECK(p == 0.5);
}

TEST_CASE("identical hidden vectors get identical decisions") {
    Quantizer q = demo_quantizer();
    EmbedModel m = init_embed_model(q, 4);
    std::vector<std::vector<double>> mu(2, std::vector<double>(32, 0.25));
    Classified c = classify(m, mu);
    CHECK(c.prob_active[0] == c.prob_active[1]);
    CHECK(c.schedule.x[0] == c.schedule.x[1]);
}

TEST_CASE("embedding and classifier are permutation-equivariant") {
    Rng rng(13);
    Quantizer q = demo_quantizer();
    EmbedModel m = init_embed_model(q, 5);
    int n = 7;
    ChannelMatrix h = random_matrix(rng, n);
    std::vector<int> p(std::size_t(n), 0);
    for (int i = 0; i < n; ++i) p[std::size_t(i)] = i;
    rng.shuffle(p);
    ChannelMatrix hp(n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) hp(j, i) = h(p[std::size_t(j)], p[std::size_t(i)]);

    auto mu = embed_forward(m, build_graph(h, q));
    auto mup = embed_forward(m, build_graph(hp, q));
    for (int i = 0; i < n; ++i)
        for (int r = 0; r < m.hidden_dim; ++r)
            CHECK(mup[std::size_t(i)][std::size_t(r)] ==
                  doctest::Approx(mu[std::size_t(p[std::size_t(i)])][std::size_t(r)])
                      .epsilon(1e-12));

    Classified c = classify(m, mu);
    Classified cp = classify(m, mup);
    for (int i = 0; i < n; ++i)
        CHECK(cp.prob_active[std::size_t(i)] ==
              doctest::Approx(c.prob_active[std::size_t(p[std::size_t(i)])]).epsilon(1e-12));
}

TEST_CASE("a model built at N=10 runs unchanged on N=50") {
    Rng rng(14);
    Quantizer q = demo_quantizer();
    EmbedModel m = init_embed_model(q, 6);
    Classified small = predict(m, random_matrix(rng, 10));
    CHECK(small.schedule.n() == 10);
    Classified big = predict(m, random_matrix(rng, 50));
    CHECK(big.schedule.n() == 50);
}

TEST_CASE("model file round trip preserves predictions") {
    Rng rng(15);
    Quantizer q = demo_quantizer();
    EmbedModel m = init_embed_model(q, 7);
    auto dir = std::filesystem::temp_directory_path() / "ulinq_test_gnn";
    std::filesystem::create_directories(dir);
    save_model(m, dir / "m.ulmodel");
    EmbedModel l = load_model(dir / "m.ulmodel");
    CHECK(l.q.edges == m.q.edges);
    CHECK(l.t_iters == m.t_iters);

    // weights go through f32; a save of the reload is byte-identical
    save_model(l, dir / "m2.ulmodel");
    CHECK(read_file_bytes(dir / "m.ulmodel") != ""); // sanity
    EmbedModel l2 = load_model(dir / "m2.ulmodel");
    save_model(l2, dir / "m3.ulmodel");
    CHECK(read_file_bytes(dir / "m2.ulmodel") == read_file_bytes(dir / "m3.ulmodel"));

    ChannelMatrix h = random_matrix(rng, 6);
    Classified a = predict(l, h);
    Classified b = predict(l2, h);
    CHECK(a.prob_active == b.prob_active);
}
