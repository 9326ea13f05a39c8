#include <doctest.h>

#include <cmath>
#include <vector>

#include "ctlab/chain_exact.hpp"
#include "ctlab/classifier.hpp"
#include "ctlab/metric_geometry.hpp"
#include "test_util.hpp"

using namespace ctlab;
using namespace ctlab::testutil;

namespace {

double harmonic(int k) {
    double h = 0.0;
    for (int i = 1; i <= k; ++i) h += 1.0 / i;
    return h;
}

EnsembleStats synthetic_stats(const std::vector<int>& ns,
                              const std::vector<std::vector<double>>& covs) {
    EnsembleStats st;
    st.spec.family = Family::complete;
    st.n_values = ns;
    st.samples_per_n = (int)covs.front().size();
    for (std::size_t gi = 0; gi < ns.size(); ++gi)
        for (std::size_t si = 0; si < covs[gi].size(); ++si) {
            SampleRecord r;
            r.n_param = ns[gi];
            r.sample_index = (int)si;
            r.vertices = ns[gi];
            r.edges = (std::uint64_t)ns[gi];
            r.volume = 2.0 * ns[gi];
            r.diam_r = (double)ns[gi];
            r.t_hit = 1.0;
            r.t_cov = covs[gi][si];
            st.records.push_back(r);
        }
    return st;
}

} // namespace

TEST_CASE("clique-with-pendants diameters") {
    FamilySpec spec;
    spec.family = Family::barbell;
    EstimatorBudgets b;
    b.cover_replicas = 8;
    EnsembleStats st = run_ensemble(spec, {4, 8, 16, 32}, 2, b, 42);
    CHECK(st.records.size() == 8);
    CHECK(st.failed_samples == 0);
    CHECK(st.guard_violations == 0);
    CHECK(!st.partial());
    for (const SampleRecord& r : st.records) {
        CHECK(r.diam_exact);
        CHECK(std::abs(r.diam_r - (2.0 + 2.0 / r.n_param)) <= 1e-8);
        CHECK(r.vertices == 2 * r.n_param);
        CHECK(r.t_hit_exact);
        CHECK(r.metric_done);
        CHECK(r.chaining > 0.0);
        CHECK(r.packing_counts.size() == b.radius_fractions.size());
        for (std::size_t i = 1; i < r.packing_counts.size(); ++i)
            CHECK(r.packing_counts[i] <= r.packing_counts[i - 1]);
    }
    // the packing and chaining columns agree with a direct recomputation
    const SampleRecord& r0 = st.records[2]; // n = 8, sample 0
    WeightedGraph g = generate(spec, r0.n_param, r0.graph_seed);
    ResistanceMetric m = ResistanceMetric::dense(g);
    CHECK(r0.chaining ==
          doctest::Approx(chaining_functional(m, dyadic_scales(m), NetMode::greedy))
              .epsilon(1e-12));
    for (std::size_t i = 0; i < b.radius_fractions.size(); ++i)
        CHECK(r0.packing_counts[i] ==
              packing_number(m, b.radius_fractions[i] * r0.diam_r, NetMode::greedy).count);
}

TEST_CASE("closed-form columns for cliques and cycles") {
    EstimatorBudgets b;
    FamilySpec spec;
    spec.family = Family::complete;
    EnsembleStats ks = run_ensemble(spec, {4, 6, 8}, 2, b, 7);
    for (const SampleRecord& r : ks.records) {
        CHECK(r.t_cov_exact);
        CHECK(std::abs(r.t_cov - (r.n_param - 1) * harmonic(r.n_param - 1)) <= 1e-8);
        CHECK(std::abs(r.t_hit - (r.n_param - 1)) <= 1e-8);
        CHECK(r.volume == doctest::Approx((double)r.n_param * (r.n_param - 1)));
    }
    spec.family = Family::cycle;
    EnsembleStats cs = run_ensemble(spec, {4, 8, 12}, 2, b, 7);
    for (const SampleRecord& r : cs.records) {
        CHECK(r.t_cov_exact);
        CHECK(std::abs(r.t_cov - r.n_param * (r.n_param - 1) / 2.0) <= 1e-8);
        CHECK(std::abs(r.t_hit - r.n_param * r.n_param / 4.0) <= 1e-8);
    }
}

TEST_CASE("worst-case first passage off the metric table") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        int n = 4 + (int)(seed % 9);
        WeightedGraph g = random_connected_graph(n, (int)(seed % 4), seed + 9100);
        ResistanceMetric m = ResistanceMetric::dense(g);
        MaxHitting mh = max_hitting_from_metric(m);
        HittingProfile hp = hitting_times(g);
        CHECK(std::abs(mh.t_hit - hp.t_hit) <= 1e-8 * hp.t_hit);
        CHECK(std::abs(mh.t_hit - hp.h(mh.from, mh.to)) <= 1e-8 * hp.t_hit);
    }
}

TEST_CASE("witness fallback above the metric cap") {
    FamilySpec spec;
    spec.family = Family::rw_range;
    spec.dim = 5;
    EstimatorBudgets b;
    b.metric_cap = 10;
    b.cover_replicas = 4;
    b.hitting_replicas = 4;
    EnsembleStats st = run_ensemble(spec, {200}, 3, b, 11);
    CHECK(st.records.size() == 3);
    CHECK(st.guard_violations == 0);
    for (const SampleRecord& r : st.records) {
        CHECK(!r.t_hit_exact);
        CHECK(!r.diam_exact);
        CHECK(!r.metric_done);
        CHECK(r.packing_counts.empty());
        CHECK(r.t_hit > 0.0);
        CHECK(r.t_hit_se > 0.0);
        CHECK(r.t_cov_se > 0.0);
        CHECK(r.witness_from != r.witness_to);
        CHECK(r.diam_r > 0.0);
    }
    EnsembleStats again = run_ensemble(spec, {200}, 3, b, 11);
    EstimatorBudgets threaded = b;
    threaded.threads = 3;
    EnsembleStats wide = run_ensemble(spec, {200}, 3, threaded, 11);
    for (std::size_t i = 0; i < st.records.size(); ++i) {
        CHECK(st.records[i].t_cov == again.records[i].t_cov);
        CHECK(st.records[i].t_hit == again.records[i].t_hit);
        CHECK(st.records[i].t_cov == wide.records[i].t_cov);
        CHECK(st.records[i].t_hit == wide.records[i].t_hit);
        CHECK(st.records[i].diam_r == wide.records[i].diam_r);
    }
}

TEST_CASE("empty draws are counted and skipped") {
    FamilySpec spec;
    spec.family = Family::er;
    spec.regime = ErRegime::critical;
    EstimatorBudgets b;
    b.cover_replicas = 6;
    b.hitting_replicas = 4;
    EnsembleStats st = run_ensemble(spec, {4}, 40, b, 5);
    CHECK(st.failed_samples > 0);
    CHECK(st.records.size() + (std::size_t)st.failed_samples +
              (std::size_t)st.guard_violations ==
          40);
    CHECK(st.partial());
}

TEST_CASE("verdict anchors") {
    EstimatorBudgets b;
    b.cover_replicas = 48;
    b.max_starts = 1;
    FamilySpec spec;
    spec.family = Family::complete;
    EnsembleStats ks = run_ensemble(spec, {8, 64, 512}, 10, b, 2026);
    CHECK(ks.guard_violations == 0);
    TypeReport kr = classify_type(ks);
    CHECK(kr.verdict == Verdict::type1_consistent);
    CHECK(kr.lambda1_star.front() == 2.0);
    CHECK(kr.lambda1_star.back() == 2.0);
    CHECK(kr.lambda2_star.back() > kr.lambda2_star.front());

    spec.family = Family::cycle;
    EnsembleStats cs = run_ensemble(spec, {32, 128, 512}, 10, b, 2026);
    CHECK(cs.guard_violations == 0);
    TypeReport cr = classify_type(cs);
    CHECK(cr.verdict == Verdict::type2_consistent);
    CHECK(cr.lambda2_star.front() == 2.0);
    CHECK(cr.lambda2_star.back() == 2.0);
    CHECK(cr.lambda1_star.back() > cr.lambda1_star.front());

    // frequencies are monotone in lambda by interval nesting
    for (const TypeReport* rep : {&kr, &cr})
        for (std::size_t ri = 0; ri < rep->n_values.size(); ++ri)
            for (std::size_t li = 1; li < rep->lambda_grid.size(); ++li) {
                CHECK(rep->type1_freq[ri][li] >= rep->type1_freq[ri][li - 1]);
                CHECK(rep->type2_freq[ri][li] >= rep->type2_freq[ri][li - 1]);
            }
}

TEST_CASE("classification preconditions") {
    EstimatorBudgets b;
    FamilySpec spec;
    spec.family = Family::complete;
    EnsembleStats thin = run_ensemble(spec, {4, 6, 8}, 5, b, 3);
    try {
        classify_type(thin);
        FAIL("expected InsufficientData");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InsufficientData);
    }
    EnsembleStats narrow = run_ensemble(spec, {6, 8}, 10, b, 3);
    try {
        classify_type(narrow);
        FAIL("expected InsufficientData");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InsufficientData);
    }
    try {
        classify_type(thin, {4, 2});
        FAIL("expected InvalidParameters");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidParameters);
    }
}

TEST_CASE("scaling fits on synthetic tables") {
    std::vector<int> ns = {4, 8, 16, 32};
    std::vector<std::vector<double>> cubes;
    for (int n : ns)
        cubes.push_back({(double)n * n * n, (double)n * n * n, (double)n * n * n});
    ScalingFit cube = fit_scaling_exponent(synthetic_stats(ns, cubes),
                                           ScalingModel::power_in_n);
    CHECK(cube.exponent == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(cube.ci_lo == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(cube.ci_hi == doctest::Approx(3.0).epsilon(1e-9));

    std::vector<int> lv = {1, 2, 3, 4};
    std::vector<std::vector<double>> pows;
    for (int n : lv) pows.push_back({std::pow(5.0, n), std::pow(5.0, n)});
    ScalingFit geo = fit_scaling_exponent(synthetic_stats(lv, pows),
                                          ScalingModel::per_level_geometric);
    CHECK(geo.exponent == doctest::Approx(5.0).epsilon(1e-9));

    // jittered values: the interval brackets the point estimate, and the
    // bootstrap is a pure function of its seed
    std::vector<std::vector<double>> noisy;
    for (std::size_t gi = 0; gi < ns.size(); ++gi) {
        std::vector<double> vs;
        for (int s = 0; s < 9; ++s)
            vs.push_back((double)ns[gi] * ns[gi] * (1.0 + 0.03 * ((s % 5) - 2)));
        noisy.push_back(vs);
    }
    EnsembleStats jitter = synthetic_stats(ns, noisy);
    ScalingFit f1 = fit_scaling_exponent(jitter, ScalingModel::power_in_n,
                                         FitQuantity::cover_time, 99);
    ScalingFit f2 = fit_scaling_exponent(jitter, ScalingModel::power_in_n,
                                         FitQuantity::cover_time, 99);
    CHECK(f1.ci_lo == f2.ci_lo);
    CHECK(f1.ci_hi == f2.ci_hi);
    CHECK(f1.ci_lo <= f1.exponent);
    CHECK(f1.ci_hi >= f1.exponent);
    CHECK(std::abs(f1.exponent - 2.0) <= 0.05);

    try {
        fit_scaling_exponent(synthetic_stats({4, 8}, {{1.0}, {2.0}}),
                             ScalingModel::power_in_n);
        FAIL("expected InsufficientData");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InsufficientData);
    }
}

TEST_CASE("cycle exponent from live runs") {
    FamilySpec spec;
    spec.family = Family::cycle;
    EstimatorBudgets b;
    b.cover_replicas = 40;
    b.max_starts = 1;
    EnsembleStats st = run_ensemble(spec, {8, 16, 32, 64}, 12, b, 314);
    ScalingFit fit = fit_scaling_exponent(st, ScalingModel::power_in_n);
    CHECK(std::abs(fit.exponent - 2.0) <= 0.1);
    CHECK(fit.medians.size() == 4);
    CHECK(std::abs(fit.medians.front() - 28.0) <= 1e-8); // exact route at n = 8
}

TEST_CASE("per-edge quantity changes the fitted slope") {
    std::vector<int> ns = {4, 8, 16, 32};
    std::vector<std::vector<double>> covs;
    for (int n : ns) covs.push_back({(double)n * n * n});
    EnsembleStats st = synthetic_stats(ns, covs); // edges column equals n
    ScalingFit per_edge = fit_scaling_exponent(st, ScalingModel::power_in_n,
                                               FitQuantity::cover_per_edge);
    CHECK(per_edge.exponent == doctest::Approx(2.0).epsilon(1e-9));
    ScalingFit diam = fit_scaling_exponent(st, ScalingModel::power_in_n,
                                           FitQuantity::resistance_diameter);
    CHECK(diam.exponent == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("dispersion quartiles") {
    std::vector<int> ns = {4, 8, 16};
    std::vector<std::vector<double>> vals;
    for (std::size_t gi = 0; gi < ns.size(); ++gi) {
        std::vector<double> vs;
        for (int k = 9; k >= 1; --k) vs.push_back((double)k); // unsorted on purpose
        vals.push_back(vs);
    }
    EnsembleStats st = synthetic_stats(ns, vals);
    std::vector<QuartileRow> rows = cover_quartiles(st);
    CHECK(rows.size() == 3);
    for (const QuartileRow& row : rows) {
        CHECK(row.count == 9);
        CHECK(row.q1 == doctest::Approx(3.0));
        CHECK(row.median == doctest::Approx(5.0));
        CHECK(row.q3 == doctest::Approx(7.0));
        CHECK(row.iqr_ratio == doctest::Approx(7.0 / 3.0));
    }
    std::vector<QuartileRow> scaled = cover_quartiles(st, {2.0, 2.0, 2.0});
    CHECK(scaled[0].median == doctest::Approx(10.0));
    CHECK(scaled[0].iqr_ratio == doctest::Approx(7.0 / 3.0));
    try {
        cover_quartiles(st, {1.0});
        FAIL("expected InvalidParameters");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidParameters);
    }
}
