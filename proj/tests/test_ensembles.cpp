#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ctlab/ensembles.hpp"
#include "ctlab/resistance.hpp"
#include "test_util.hpp"

using namespace ctlab;
using namespace ctlab::testutil;

namespace {

double pmf_sum(const OffspringSpec& s) {
    double acc = 0.0;
    for (double q : s.pmf()) acc += q;
    return acc;
}

int tree_depth(const WeightedGraph& g) {
    std::vector<int> d = bfs_distances(g, 0);
    return *std::max_element(d.begin(), d.end());
}

} // namespace

TEST_CASE("offspring tables") {
    OffspringSpec po = OffspringSpec::poisson(2.0);
    CHECK(std::abs(pmf_sum(po) - 1.0) <= 1e-12);
    CHECK(std::abs(po.mean() - 2.0) <= 1e-10);

    OffspringSpec ge = OffspringSpec::geometric(0.5);
    CHECK(std::abs(pmf_sum(ge) - 1.0) <= 1e-12);
    CHECK(std::abs(ge.mean() - 1.0) <= 1e-10);
    CHECK(ge.pmf()[0] == 0.5);
    CHECK(ge.pmf()[3] == doctest::Approx(1.0 / 16.0).epsilon(1e-14));

    OffspringSpec bi = OffspringSpec::binomial(5, 0.4);
    CHECK(std::abs(pmf_sum(bi) - 1.0) <= 1e-12);
    CHECK(std::abs(bi.mean() - 2.0) <= 1e-12);

    OffspringSpec ex = OffspringSpec::explicit_table({0.25, 0.5, 0.25});
    CHECK(ex.mean() == doctest::Approx(1.0).epsilon(1e-15));

    OffspringSpec pt = OffspringSpec::power_tail(1.5, 1000);
    CHECK(std::abs(pmf_sum(pt) - 1.0) <= 1e-12);
    CHECK(std::abs(pt.mean() - 1.0) <= 1e-9);
    CHECK(pt.tail_alpha() == 1.5);
    CHECK(pt.pmf()[1] == 0.5);

    try {
        OffspringSpec::explicit_table({0.5, 0.4});
        FAIL("expected InvalidParameters");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidParameters);
    }
}

TEST_CASE("generating functions") {
    OffspringSpec ge = OffspringSpec::geometric(0.5);
    for (double s : {0.0, 0.3, 0.7, 1.0})
        CHECK(ge.pgf(s) == doctest::Approx(1.0 / (2.0 - s)).epsilon(1e-14));

    OffspringSpec ex = OffspringSpec::explicit_table({0.0, 0.0, 1.0});
    CHECK(ex.pgf(0.5) == doctest::Approx(0.25).epsilon(1e-15));

    OffspringSpec po = OffspringSpec::poisson(1.0);
    CHECK(po.pgf(1.0) == doctest::Approx(1.0).epsilon(1e-12));
    // survival_step agrees with its definition at moderate arguments
    CHECK(po.survival_step(0.5) ==
          doctest::Approx(1.0 - po.pgf(0.5)).epsilon(1e-12));
}

TEST_CASE("offspring sampling frequencies") {
    OffspringSpec ge = OffspringSpec::geometric(0.5);
    Rng rng(31);
    int n = 10000;
    int c0 = 0, c1 = 0;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        int k = ge.sample(rng);
        acc += k;
        if (k == 0) ++c0;
        if (k == 1) ++c1;
    }
    CHECK(std::abs(c0 / (double)n - 0.5) <= 0.02);
    CHECK(std::abs(c1 / (double)n - 0.25) <= 0.018);
    CHECK(std::abs(acc / n - 1.0) <= 4.0 * std::sqrt(2.0 / n));

    OffspringSpec bi = OffspringSpec::binomial(5, 0.4);
    acc = 0.0;
    for (int i = 0; i < n; ++i) acc += bi.sample(rng);
    CHECK(std::abs(acc / n - 2.0) <= 4.0 * std::sqrt(1.2 / n));
}

TEST_CASE("survival recursion") {
    OffspringSpec ge = OffspringSpec::geometric(0.5);
    CHECK(survival_probability(ge, 0) == 1.0);
    CHECK(survival_probability(ge, 1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(survival_probability(ge, 9) == doctest::Approx(0.1).epsilon(1e-13));
    for (int n : {10, 100, 1000, 10000})
        CHECK(std::abs(survival_probability(ge, n) - 1.0 / (n + 1)) <= 1e-12);

    OffspringSpec po1 = OffspringSpec::poisson(1.0);
    double prev = 1.0;
    for (int n : {1, 2, 4, 8, 16}) {
        double p = survival_probability(po1, n);
        CHECK(p > 0.0);
        CHECK(p < prev);
        prev = p;
    }

    OffspringSpec pt = OffspringSpec::power_tail(2.0, 100000);
    double p10 = survival_probability(pt, 10);
    CHECK(p10 > 0.0);
    CHECK(p10 < 1.0);
    CHECK(survival_probability(pt, 20) < p10);

    try {
        survival_probability(OffspringSpec::poisson(2.0), 3);
        FAIL("expected NotCritical");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotCritical);
    }
}

TEST_CASE("supercritical family trees") {
    OffspringSpec two = OffspringSpec::explicit_table({0.0, 0.0, 1.0});
    WeightedGraph bin = gen_supercritical_gw(two, 3, 5);
    CHECK(bin.vertex_count() == 15);
    CHECK(bin.is_tree());
    CHECK(tree_depth(bin) == 3);
    int leaves = 0;
    for (int v = 0; v < 15; ++v)
        if (bin.degree(v) == 1 && v != 0) ++leaves;
    CHECK(leaves == 8);

    OffspringSpec po2 = OffspringSpec::poisson(2.0);
    WeightedGraph t = gen_supercritical_gw(po2, 6, 42);
    CHECK(t.is_tree());
    CHECK(tree_depth(t) == 6);
    CHECK(t.same_graph(gen_supercritical_gw(po2, 6, 42)));
    CHECK(!t.same_graph(gen_supercritical_gw(po2, 6, 43)));

    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        WeightedGraph g = gen_supercritical_gw(OffspringSpec::geometric(0.25), 5, seed);
        CHECK(g.is_tree());
        CHECK(tree_depth(g) == 5);
    }

    try {
        gen_supercritical_gw(OffspringSpec::explicit_table({1.0}), 3, 1);
        FAIL("expected InvalidParameters");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidParameters);
    }
    try {
        GwOptions opt;
        opt.resample_cap = 0;
        gen_supercritical_gw(OffspringSpec::poisson(2.0), 3, 1, opt);
        FAIL("expected RejectionBudgetExceeded");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::RejectionBudgetExceeded);
    }
    try {
        GwOptions opt;
        opt.max_vertices = 100;
        gen_supercritical_gw(OffspringSpec::explicit_table({0.0, 0.0, 1.0}), 10,
                             1, opt);
        FAIL("expected BudgetExceeded");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BudgetExceeded);
    }
}

TEST_CASE("conditioned critical trees") {
    OffspringSpec one = OffspringSpec::explicit_table({0.0, 1.0});
    CHECK(gen_kesten_iic(one, 5, 3).same_graph(path_graph(6)));

    OffspringSpec ge = OffspringSpec::geometric(0.5);
    WeightedGraph t = gen_kesten_iic(ge, 8, 17);
    CHECK(t.is_tree());
    CHECK(tree_depth(t) == 8);
    CHECK(t.same_graph(gen_kesten_iic(ge, 8, 17)));

    OffspringSpec po1 = OffspringSpec::poisson(1.0);
    WeightedGraph tp = gen_kesten_iic(po1, 8, 7);
    CHECK(tp.is_tree());
    CHECK(tree_depth(tp) == 8);
    CHECK(tp.degree(0) >= 1);

    try {
        gen_kesten_iic(OffspringSpec::poisson(2.0), 3, 1);
        FAIL("expected NotCritical");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotCritical);
    }
}

TEST_CASE("spine child counts follow the size-biased law") {
    // root degree of a depth-1 conditioned tree is the size-biased draw
    OffspringSpec ge = OffspringSpec::geometric(0.5);
    int n = 10000;
    std::vector<int> count(11, 0);
    for (int i = 0; i < n; ++i) {
        int deg = gen_kesten_iic(ge, 1, 50000 + (std::uint64_t)i).degree(0);
        ++count[(std::size_t)std::min(deg, 10)];
    }
    CHECK(count[0] == 0);
    double chi2 = 0.0;
    for (int k = 1; k <= 10; ++k) {
        double q = k < 10 ? k * std::pow(2.0, -(k + 1)) : 11.0 / 1024.0;
        double expect = n * q;
        double d = count[(std::size_t)k] - expect;
        chi2 += d * d / expect;
    }
    CHECK(chi2 < 27.88); // chi-square df=9 at the 0.001 level
}

TEST_CASE("largest surviving component") {
    CHECK(gen_er(3, 1.0, 1).same_graph(complete_graph(3)));

    for (std::uint64_t seed = 1; seed <= 20; ++seed)
        CHECK(gen_er(1000, 0.002, seed).vertex_count() >= 100);

    CHECK(gen_er(50, 0.08, 5).same_graph(gen_er(50, 0.08, 5)));

    try {
        gen_er(2, 0.0, 1);
        FAIL("expected EmptyGraph");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyGraph);
    }
}

TEST_CASE("box percolation clusters") {
    WeightedGraph full = gen_percolation_box(2, 1, 1.0, 1);
    CHECK(full.vertex_count() == 9);
    CHECK(full.edge_count() == 12);
    int deg2 = 0, deg3 = 0, deg4 = 0;
    for (int v = 0; v < 9; ++v) {
        if (full.degree(v) == 2) ++deg2;
        if (full.degree(v) == 3) ++deg3;
        if (full.degree(v) == 4) ++deg4;
    }
    CHECK(deg2 == 4);
    CHECK(deg3 == 4);
    CHECK(deg4 == 1);

    for (std::uint64_t seed = 1; seed <= 20; ++seed)
        CHECK(gen_percolation_box(2, 20, 0.7, seed).vertex_count() >= 505);

    try {
        gen_percolation_box(2, 2, 0.0, 1);
        FAIL("expected EmptyGraph");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyGraph);
    }
    try {
        gen_percolation_box(5, 2, 0.5, 1);
        FAIL("expected InvalidParameters");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidParameters);
    }
    try {
        gen_percolation_box(1, 2, 0.5, 1);
        FAIL("expected InvalidParameters");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidParameters);
    }
}

TEST_CASE("walk trace graphs") {
    WeightedGraph one = gen_rw_range(5, 1, 9);
    CHECK(one.vertex_count() == 2);
    CHECK(one.edge_count() == 1);

    WeightedGraph t = gen_rw_range(5, 10000, 11);
    CHECK(t.vertex_count() <= 10001);
    CHECK(t.same_graph(gen_rw_range(5, 10000, 11)));

    double acc = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed)
        acc += gen_rw_range(5, 10000, seed).vertex_count() / 10000.0;
    double mean_ratio = acc / 20.0;
    CHECK(mean_ratio >= 0.5);
    CHECK(mean_ratio <= 1.0);

    try {
        gen_rw_range(4, 100, 1);
        FAIL("expected InvalidParameters");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidParameters);
    }
}

TEST_CASE("gasket graphs") {
    CHECK(gen_sierpinski(0, 1.0, 1.0, 1).same_graph(complete_graph(3)));
    CHECK(gen_sierpinski(1, 1.0, 1.0, 1).same_graph(gasket_level1()));

    WeightedGraph g3 = gen_sierpinski(3, 1.0, 1.0, 1);
    CHECK(g3.vertex_count() == 42);
    CHECK(g3.edge_count() == 81);
    for (int level = 0; level <= 6; ++level) {
        WeightedGraph g = gen_sierpinski(level, 1.0, 1.0, 2);
        std::int64_t expect = 1;
        for (int i = 0; i <= level; ++i) expect *= 3;
        expect = (expect + 3) / 2;
        CHECK((std::int64_t)g.vertex_count() == expect);
        CHECK(g.degree(0) == 2);
        CHECK(g.degree(1) == 2);
        CHECK(g.degree(2) == 2);
    }

    WeightedGraph w = gen_sierpinski(2, 0.5, 2.0, 7);
    for (const Edge& e : w.edges()) {
        CHECK(e.w >= 0.5);
        CHECK(e.w <= 2.0);
    }
    CHECK(w.same_graph(gen_sierpinski(2, 0.5, 2.0, 7)));
    CHECK(!w.same_graph(gen_sierpinski(2, 0.5, 2.0, 8)));
}

TEST_CASE("complete cores with pendants") {
    WeightedGraph b = gen_barbell(4, 2);
    CHECK(b.vertex_count() == 6);
    CHECK(b.edge_count() == 8);
    ResistanceMetric m = ResistanceMetric::dense(b);
    CHECK(m.diameter().value == doctest::Approx(2.5).epsilon(1e-9));

    WeightedGraph b44 = gen_barbell(4, 4);
    CHECK(b44.vertex_count() == 8);
    CHECK(b44.edge_count() == 10);
    for (int v = 4; v < 8; ++v) CHECK(b44.degree(v) == 1);

    try {
        gen_barbell(3, 4);
        FAIL("expected InvalidParameters");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidParameters);
    }
}

TEST_CASE("family dispatch") {
    FamilySpec cyc;
    cyc.family = Family::cycle;
    CHECK(generate(cyc, 8, 1).same_graph(cycle_graph(8)));

    FamilySpec com;
    com.family = Family::complete;
    CHECK(generate(com, 5, 1).same_graph(complete_graph(5)));

    FamilySpec bar;
    bar.family = Family::barbell;
    CHECK(generate(bar, 4, 1).vertex_count() == 8); // pendants default to N

    FamilySpec er;
    er.family = Family::er;
    er.regime = ErRegime::critical;
    CHECK(generate(er, 500, 9).vertex_count() >= 2);
    CHECK(er_probability(er, 100) == doctest::Approx(0.01).epsilon(1e-15));
    er.regime = ErRegime::supercritical_c_over_n;
    er.er_c = 3.0;
    CHECK(er_probability(er, 100) == doctest::Approx(0.03).epsilon(1e-15));
    er.regime = ErRegime::supercritical_f_over_n;
    CHECK(er_probability(er, 100) ==
          doctest::Approx(std::pow(std::log(100.0), 2.0) / 100.0).epsilon(1e-15));

    FamilySpec gw;
    gw.family = Family::gw_supercritical;
    try {
        generate(gw, 4, 1);
        FAIL("expected InvalidParameters");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidParameters);
    }
    gw.offspring = OffspringSpec::poisson(2.0);
    CHECK(generate(gw, 4, 1).is_tree());

    for (Family f : {Family::gw_supercritical, Family::iic_kesten, Family::er,
                     Family::percolation_box, Family::rw_range,
                     Family::sierpinski, Family::barbell, Family::cycle,
                     Family::complete})
        CHECK(family_from_name(family_name(f)) == f);
    try {
        family_from_name("nonsense");
        FAIL("expected InvalidParameters");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidParameters);
    }
}
