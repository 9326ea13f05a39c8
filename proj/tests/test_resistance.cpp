#include <doctest.h>

#include <cmath>

#include "ctlab/resistance.hpp"
#include "test_util.hpp"

using namespace ctlab;
using namespace ctlab::testutil;

TEST_CASE("series and parallel laws") {
    // single edge of conductance 2.5 -> resistance 0.4
    WeightedGraph e = WeightedGraph::build(2, {{0, 1, 2.5}});
    ResistanceMetric me = ResistanceMetric::dense(e);
    CHECK(me(0, 1) == doctest::Approx(0.4).epsilon(1e-12));

    // series: 1/w1 + 1/w2
    WeightedGraph p = WeightedGraph::build(3, {{0, 1, 2.0}, {1, 2, 4.0}});
    ResistanceMetric mp = ResistanceMetric::dense(p);
    CHECK(mp(0, 2) == doctest::Approx(0.75).epsilon(1e-12));

    // parallel: direct 1-ohm edge against a 2-ohm two-hop branch -> 2/3
    WeightedGraph theta = WeightedGraph::build(3, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}});
    ResistanceMetric mt = ResistanceMetric::dense(theta);
    CHECK(mt(0, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("frozen values: path, complete, gasket") {
    ResistanceMetric p3 = ResistanceMetric::dense(path_graph(3));
    CHECK(p3(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p3(0, 2) == doctest::Approx(2.0).epsilon(1e-12));

    ResistanceMetric k3 = ResistanceMetric::dense(complete_graph(3));
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            CHECK(k3(i, j) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

    // level-1 gasket corner pair; 10/9 from a delta-wye + series-parallel
    // reduction done by hand
    ResistanceMetric g1 = ResistanceMetric::dense(gasket_level1());
    CHECK(g1(0, 1) == doctest::Approx(10.0 / 9.0).epsilon(1e-9));
    CHECK(g1(0, 2) == doctest::Approx(10.0 / 9.0).epsilon(1e-9));
    CHECK(g1(1, 2) == doctest::Approx(10.0 / 9.0).epsilon(1e-9));
}

TEST_CASE("metric axioms on random graphs") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        int n = 4 + (int)(seed % 12);
        WeightedGraph g = random_connected_graph(n, (int)(seed % 5), seed);
        ResistanceMetric m = ResistanceMetric::dense(g);
        for (int x = 0; x < n; ++x) {
            CHECK(m(x, x) == 0.0);
            for (int y = x + 1; y < n; ++y) {
                CHECK(m(x, y) > 0.0);
                CHECK(m(x, y) == m(y, x));
                for (int z = 0; z < n; ++z)
                    CHECK(m(x, y) <= m(x, z) + m(z, y) + 1e-9);
            }
        }
    }
}

TEST_CASE("per-pair solve agrees with the dense table") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        int n = 6 + (int)(2 * seed);
        WeightedGraph g = random_connected_graph(n, 4, seed + 100);
        ResistanceMetric dense = ResistanceMetric::dense(g);
        ResistanceMetric lazy = ResistanceMetric::per_pair(g);
        for (int x = 0; x < n; ++x)
            for (int y = x + 1; y < n; ++y)
                CHECK(lazy(x, y) == doctest::Approx(dense(x, y)).epsilon(1e-8));
    }
}

TEST_CASE("dense cap raises BudgetExceeded") {
    WeightedGraph g = path_graph(8);
    ResistanceOptions opt;
    opt.dense_cap = 4;
    try {
        ResistanceMetric::dense(g, opt);
        FAIL("expected BudgetExceeded");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BudgetExceeded);
    }
}

TEST_CASE("diameter, min positive, balls") {
    ResistanceMetric p3 = ResistanceMetric::dense(path_graph(3));
    auto d = p3.diameter();
    CHECK(d.value == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(d.x == 0);
    CHECK(d.y == 2);
    CHECK(p3.min_positive() == doctest::Approx(1.0).epsilon(1e-12));

    ResistanceMetric s3 = ResistanceMetric::dense(star_graph(3));
    CHECK(s3.ball(0, 1.0).size() == 4);       // center reaches everything
    CHECK(s3.ball(1, 1.0) == std::vector<int>{0, 1});
    CHECK(s3.ball(1, 0.0) == std::vector<int>{1});
    CHECK(s3.diameter().value == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("rayleigh monotonicity: deleting an edge cannot lower resistance") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        int n = 5 + (int)(seed % 8);
        WeightedGraph g = random_connected_graph(n, 5, seed + 300);
        ResistanceMetric before = ResistanceMetric::dense(g);
        Rng rng(mix_seed(seed, {7}));
        // try a few random edges until one is removable without disconnecting
        for (int attempt = 0; attempt < 10; ++attempt) {
            std::size_t drop = rng.below(g.edge_count());
            std::vector<Edge> rest;
            for (std::size_t i = 0; i < g.edge_count(); ++i)
                if (i != drop) rest.push_back(g.edges()[i]);
            try {
                WeightedGraph h = WeightedGraph::build(n, rest);
                ResistanceMetric after = ResistanceMetric::dense(h);
                for (int x = 0; x < n; ++x)
                    for (int y = x + 1; y < n; ++y)
                        CHECK(after(x, y) >= before(x, y) - 1e-9);
                break;
            } catch (const Error& e) {
                REQUIRE(e.code() == ErrorCode::DisconnectedGraph);
            }
        }
    }
}

TEST_CASE("green kernel identities") {
    ResistanceMetric p3 = ResistanceMetric::dense(path_graph(3));
    GreenKernel k = green_kernel(p3, 0);
    CHECK(k(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(k(2, 2) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(k(1, 2) == doctest::Approx(1.0).epsilon(1e-12));
    for (int x = 0; x < 3; ++x) {
        CHECK(k(0, x) == 0.0);
        CHECK(k(x, 0) == 0.0);
    }

    ResistanceMetric k3 = ResistanceMetric::dense(complete_graph(3));
    for (int root = 0; root < 3; ++root) {
        GreenKernel kk = green_kernel(k3, root);
        for (int x = 0; x < 3; ++x)
            if (x != root) CHECK(kk(x, x) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    }

    // C(x,x)+C(y,y)-2C(x,y) = R(x,y) and PSD on the non-root block
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        int n = 5 + (int)seed;
        WeightedGraph g = random_connected_graph(n, 3, seed + 500);
        ResistanceMetric m = ResistanceMetric::dense(g);
        GreenKernel kr = green_kernel(m, (int)(seed % n));
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y)
                CHECK(kr(x, x) + kr(y, y) - 2 * kr(x, y) ==
                      doctest::Approx(m(x, y)).epsilon(1e-9));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(kr.c);
        CHECK(es.eigenvalues().minCoeff() >= -1e-9);
    }
}

TEST_CASE("nash-williams lower bound") {
    // tree path: singleton cutsets per path edge give equality
    WeightedGraph p3 = path_graph(3);
    double b = nash_williams_bound(p3, 0, 2, {{0}, {1}});
    CHECK(b == doctest::Approx(2.0).epsilon(1e-12));

    // complete triangle: both edges at vertex 0 form one cutset; 1/2 <= 2/3
    WeightedGraph k3 = complete_graph(3);
    // edges sorted: (0,1)=0, (0,2)=1, (1,2)=2
    double bk = nash_williams_bound(k3, 0, 1, {{0, 1}});
    CHECK(bk == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(bk <= 2.0 / 3.0 + 1e-12);

    // weighted tree equality against the metric
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        WeightedGraph t = random_connected_graph(9, 0, seed + 900);
        ResistanceMetric m = ResistanceMetric::dense(t);
        // path edges from 0 to the farthest vertex via parent walk
        std::vector<int> dist = bfs_distances(t, 0);
        int far = 0;
        for (int v = 0; v < 9; ++v)
            if (dist[v] > dist[far]) far = v;
        // collect path edge indices by walking back to 0
        std::vector<std::vector<std::size_t>> cuts;
        int cur = far;
        while (cur != 0) {
            for (std::size_t ei = 0; ei < t.edge_count(); ++ei) {
                const Edge& e = t.edges()[ei];
                int other = e.u == cur ? e.v : (e.v == cur ? e.u : -1);
                if (other >= 0 && dist[other] == dist[cur] - 1) {
                    cuts.push_back({ei});
                    cur = other;
                    break;
                }
            }
        }
        double bound = nash_williams_bound(t, 0, far, cuts);
        CHECK(bound == doctest::Approx(m(0, far)).epsilon(1e-9));
    }

    // error taxonomy
    try {
        nash_williams_bound(p3, 0, 2, {{0}, {0}});
        FAIL("expected OverlappingCutsets");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::OverlappingCutsets);
    }
    try {
        nash_williams_bound(p3, 0, 2, {{0}, {1}, {0, 1}});
        FAIL("expected overlap");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::OverlappingCutsets);
    }
    try {
        WeightedGraph k4 = complete_graph(4);
        nash_williams_bound(k4, 0, 1, {{0}});  // single edge does not separate K_4
        FAIL("expected NotACutset");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotACutset);
    }
}

TEST_CASE("tree fast paths match the dense metric") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        WeightedGraph t = random_connected_graph(14, 0, seed + 1200);
        REQUIRE(t.is_tree());
        ResistanceMetric m = ResistanceMetric::dense(t);
        std::vector<double> row0 = tree_resistance_from(t, 0);
        for (int v = 0; v < 14; ++v)
            CHECK(row0[v] == doctest::Approx(m(0, v)).epsilon(1e-9));
        auto d = tree_resistance_diameter(t);
        auto dd = m.diameter();
        CHECK(d.value == doctest::Approx(dd.value).epsilon(1e-9));
    }
}

TEST_CASE("trivial graph resistance") {
    WeightedGraph t = WeightedGraph::trivial();
    ResistanceMetric m = ResistanceMetric::dense(t);
    CHECK(m(0, 0) == 0.0);
}
