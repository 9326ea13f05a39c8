#include "ctlab/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ctlab/chain_exact.hpp"
#include "ctlab/errors.hpp"
#include "ctlab/gff.hpp"
#include "ctlab/metric_geometry.hpp"
#include "ctlab/report.hpp"
#include "ctlab/rng.hpp"
#include "ctlab/summary.hpp"
#include "ctlab/walk_mc.hpp"

namespace ctlab {
namespace {

// the largest catalog graph (gasket level 2) has 15 vertices
constexpr int kCoverCap = 15;

struct NamedGraph {
    std::string name;
    WeightedGraph g;
};

WeightedGraph make_path(int n) {
    std::vector<Edge> es;
    for (int i = 0; i + 1 < n; ++i) es.push_back({i, i + 1, 1.0});
    return WeightedGraph::build(n, std::move(es));
}

WeightedGraph make_star(int n) {
    std::vector<Edge> es;
    for (int i = 1; i < n; ++i) es.push_back({0, i, 1.0});
    return WeightedGraph::build(n, std::move(es));
}

// Paths, cycles, stars, cliques, cliques with pendants, and the first gasket
// levels: closed-form families small enough for every exact solver at once.
std::vector<NamedGraph> exact_catalog() {
    std::vector<NamedGraph> out;
    for (int n = 2; n <= 12; ++n) out.push_back({"P" + std::to_string(n), make_path(n)});
    for (int n = 3; n <= 12; ++n) out.push_back({"C" + std::to_string(n), gen_cycle(n)});
    for (int n = 3; n <= 12; ++n) out.push_back({"S" + std::to_string(n), make_star(n)});
    for (int n = 3; n <= 12; ++n) out.push_back({"K" + std::to_string(n), gen_complete(n)});
    for (int n = 4; n <= 6; ++n) out.push_back({"B" + std::to_string(n), gen_barbell(n, n)});
    for (int l = 0; l <= 2; ++l)
        out.push_back({"G" + std::to_string(l), gen_sierpinski(l, 1.0, 1.0, 0)});
    return out;
}

// Random spanning tree plus extra chords, log-uniform conductances.
WeightedGraph random_graph(Rng& rng, int n, int extra, double wlo, double whi) {
    std::vector<Edge> es;
    std::set<std::pair<int, int>> seen;
    auto weight = [&] { return wlo * std::exp(rng.real01() * std::log(whi / wlo)); };
    for (int v = 1; v < n; ++v) {
        int u = (int)rng.below((std::uint64_t)v);
        es.push_back({u, v, weight()});
        seen.insert({u, v});
    }
    for (int t = 0; t < extra; ++t) {
        int a = (int)rng.below((std::uint64_t)n);
        int b = (int)rng.below((std::uint64_t)n);
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        if (!seen.insert({a, b}).second) continue;
        es.push_back({a, b, weight()});
    }
    return WeightedGraph::build(n, std::move(es));
}

int scaled_reps(int base, double scale) {
    return std::max(2, (int)std::llround((double)base * scale));
}

// widening factor for fixed tolerance bands under a reduced replica budget
double band_widening(double scale) { return scale >= 1.0 ? 1.0 : 1.0 / std::sqrt(scale); }

void push(CriterionResult& r, const char* name, double value, const char* unit) {
    r.measures.push_back({name, value, unit});
}

CriterionResult c1_commute(const CatalogOptions& opt) {
    CriterionResult res;
    res.id = 1;
    res.name = "commute identity residuals on random weighted graphs";
    Rng rng(mix_seed(opt.master_seed, {1}));
    const int graphs = 200;
    double worst = 0.0;
    for (int k = 0; k < graphs; ++k) {
        int n = 3 + (int)rng.below(18);
        int extra = (int)rng.below((std::uint64_t)(2 * n));
        WeightedGraph g = random_graph(rng, n, extra, 0.25, 4.0);
        ResistanceMetric m = ResistanceMetric::dense(g);
        HittingProfile hp = hitting_times(g);
        for (int x = 0; x < n; ++x)
            for (int y = x + 1; y < n; ++y) {
                double commute = g.volume() * m(x, y);
                double resid = std::abs(hp.h(x, y) + hp.h(y, x) - commute) / commute;
                worst = std::max(worst, resid);
            }
    }
    push(res, "graphs", graphs, "count");
    push(res, "max_relative_residual", worst, "dimensionless");
    res.pass = worst <= 1e-8;
    return res;
}

CriterionResult c2_sandwich(const CatalogOptions& opt) {
    (void)opt;
    CriterionResult res;
    res.id = 2;
    res.name = "hitting-cover sandwich and log-factor bound on the small catalog";
    int violations = 0;
    auto cat = exact_catalog();
    for (const NamedGraph& ng : cat) {
        int n = ng.g.vertex_count();
        HittingProfile hp = hitting_times(ng.g);
        CoverExact ce = exact_cover_time(ng.g, kCoverCap);
        SandwichResult s = sandwich_check(ce.t_cov, hp.t_hit, n);
        bool matthews_ok = ce.t_cov <= matthews_upper(hp.t_hit, n) + 1e-9 * (1.0 + ce.t_cov);
        if (!s.pass || !matthews_ok) {
            ++violations;
            res.notes.push_back("violated at " + ng.name);
        }
    }
    push(res, "graphs", (double)cat.size(), "count");
    push(res, "violations", violations, "count");
    res.pass = violations == 0;
    return res;
}

CriterionResult c3_closed_forms(const CatalogOptions& opt) {
    CriterionResult res;
    res.id = 3;
    res.name = "closed-form cover and hitting values, exact and Monte Carlo";
    bool ok = true;
    double worst_exact = 0.0;
    auto check_exact = [&](const std::string& name, double got, double want) {
        double err = std::abs(got - want);
        worst_exact = std::max(worst_exact, err);
        if (err > 1e-8) {
            ok = false;
            res.notes.push_back("exact value off at " + name);
        }
    };
    check_exact("K3 cover", exact_cover_time(gen_complete(3), kCoverCap).t_cov, 3.0);
    check_exact("P3 cover", exact_cover_time(make_path(3), kCoverCap).t_cov, 5.0);
    for (int n = 3; n <= 12; ++n)
        check_exact("C" + std::to_string(n) + " cover",
                    exact_cover_time(gen_cycle(n), kCoverCap).t_cov, n * (n - 1) / 2.0);
    check_exact("P3 hitting", hitting_times(make_path(3)).t_hit, 4.0);

    const int reps = scaled_reps(100000, opt.replica_scale);
    WalkOptions wopt;
    wopt.threads = opt.threads;
    double worst_z = 0.0;
    auto check_mc = [&](const std::string& name, double mean, double se, double want) {
        if (se > 0) worst_z = std::max(worst_z, std::abs(mean - want) / se);
        if (std::abs(mean - want) > 4.0 * se) {
            ok = false;
            res.notes.push_back("Monte Carlo off at " + name);
        }
    };
    CoverEstimate k3 = estimate_cover_time(gen_complete(3), StartPolicy::worst_of_set({0, 1, 2}),
                                           reps, mix_seed(opt.master_seed, {3, 1}), wopt);
    check_mc("K3 cover", k3.mean, k3.se, 3.0);
    CoverEstimate p3 = estimate_cover_time(make_path(3), StartPolicy::worst_of_set({0, 1, 2}),
                                           reps, mix_seed(opt.master_seed, {3, 2}), wopt);
    check_mc("P3 cover", p3.mean, p3.se, 5.0);
    CoverEstimate c12 = estimate_cover_time(gen_cycle(12), StartPolicy::fixed_start(0), reps,
                                            mix_seed(opt.master_seed, {3, 3}), wopt);
    check_mc("C12 cover", c12.mean, c12.se, 66.0);
    CoverEstimate h3 = estimate_hitting(make_path(3), 0, 2, reps,
                                        mix_seed(opt.master_seed, {3, 4}), wopt);
    check_mc("P3 end-to-end hitting", h3.mean, h3.se, 4.0);

    push(res, "max_exact_error", worst_exact, "steps");
    push(res, "max_mc_z", worst_z, "dimensionless");
    push(res, "mc_replicas", reps, "count");
    if (opt.replica_scale != 1.0)
        res.notes.push_back("replica budget scaled by " + format_double(opt.replica_scale));
    res.pass = ok;
    return res;
}

CriterionResult c4_resistance(const CatalogOptions& opt) {
    CriterionResult res;
    res.id = 4;
    res.name = "resistance engine: series-parallel forms, monotonicity, cutset bounds";
    bool ok = true;
    Rng rng(mix_seed(opt.master_seed, {4}));
    double worst_sp = 0.0;

    // weighted cycle: two series arcs in parallel, so every pair has a closed form
    for (int k = 0; k < 20; ++k) {
        int n = 3 + (int)rng.below(10);
        std::vector<double> w(n);
        std::vector<Edge> es;
        for (int i = 0; i < n; ++i) {
            w[i] = 0.25 * std::exp(rng.real01() * std::log(16.0));
            es.push_back({i, (i + 1) % n, w[i]});
        }
        WeightedGraph g = WeightedGraph::build(n, std::move(es));
        ResistanceMetric m = ResistanceMetric::dense(g);
        double total = 0.0;
        for (int i = 0; i < n; ++i) total += 1.0 / w[i];
        for (int x = 0; x < n; ++x)
            for (int y = x + 1; y < n; ++y) {
                double a = 0.0;
                for (int i = x; i < y; ++i) a += 1.0 / w[i];
                double b = total - a;
                double want = a * b / (a + b);
                worst_sp = std::max(worst_sp, std::abs(m(x, y) - want) / std::max(1.0, want));
            }
    }
    // weighted path: pure series
    for (int k = 0; k < 10; ++k) {
        int n = 2 + (int)rng.below(11);
        std::vector<double> w(n - 1);
        std::vector<Edge> es;
        for (int i = 0; i + 1 < n; ++i) {
            w[i] = 0.25 * std::exp(rng.real01() * std::log(16.0));
            es.push_back({i, i + 1, w[i]});
        }
        WeightedGraph g = WeightedGraph::build(n, std::move(es));
        ResistanceMetric m = ResistanceMetric::dense(g);
        for (int x = 0; x < n; ++x)
            for (int y = x + 1; y < n; ++y) {
                double want = 0.0;
                for (int i = x; i < y; ++i) want += 1.0 / w[i];
                worst_sp = std::max(worst_sp, std::abs(m(x, y) - want) / std::max(1.0, want));
            }
    }
    if (worst_sp > 1e-9) {
        ok = false;
        res.notes.push_back("series-parallel closed form missed");
    }

    // raising one conductance must not raise any resistance
    int rayleigh_viol = 0;
    for (int k = 0; k < 20; ++k) {
        int n = 3 + (int)rng.below(13);
        WeightedGraph g = random_graph(rng, n, (int)rng.below((std::uint64_t)(2 * n)), 0.25, 4.0);
        std::vector<Edge> es = g.edges();
        es[(std::size_t)rng.below(es.size())].w *= 2.0;
        WeightedGraph g2 = WeightedGraph::build(n, std::move(es));
        ResistanceMetric m1 = ResistanceMetric::dense(g);
        ResistanceMetric m2 = ResistanceMetric::dense(g2);
        for (int x = 0; x < n; ++x)
            for (int y = x + 1; y < n; ++y)
                if (m2(x, y) > m1(x, y) + 1e-12) ++rayleigh_viol;
    }
    if (rayleigh_viol > 0) {
        ok = false;
        res.notes.push_back("monotonicity violated");
    }

    // on a tree the single-edge cutsets along the path give equality
    double worst_tree = 0.0;
    for (int k = 0; k < 10; ++k) {
        int n = 2 + (int)rng.below(15);
        WeightedGraph g = random_graph(rng, n, 0, 0.25, 4.0);
        ResistanceMetric m = ResistanceMetric::dense(g);
        std::map<std::pair<int, int>, std::size_t> idx;
        for (std::size_t e = 0; e < g.edges().size(); ++e) {
            const Edge& ed = g.edges()[e];
            idx[{std::min(ed.u, ed.v), std::max(ed.u, ed.v)}] = e;
        }
        int x = (int)rng.below((std::uint64_t)n);
        int y = (int)rng.below((std::uint64_t)n);
        if (x == y) y = (x + 1) % n;
        std::vector<int> parent(n, -2);
        std::vector<int> queue{x};
        parent[x] = -1;
        for (std::size_t qi = 0; qi < queue.size(); ++qi) {
            int v = queue[qi];
            for (int u : g.neighbors(v))
                if (parent[u] == -2) {
                    parent[u] = v;
                    queue.push_back(u);
                }
        }
        std::vector<std::vector<std::size_t>> cutsets;
        for (int v = y; v != x; v = parent[v])
            cutsets.push_back({idx.at({std::min(v, parent[v]), std::max(v, parent[v])})});
        double nw = nash_williams_bound(g, x, y, cutsets);
        worst_tree = std::max(worst_tree, std::abs(nw - m(x, y)) / std::max(1.0, m(x, y)));
    }
    if (worst_tree > 1e-9) {
        ok = false;
        res.notes.push_back("tree cutset equality missed");
    }

    // on general graphs vertex stars give disjoint cutsets and a lower bound
    int cutset_viol = 0;
    for (int k = 0; k < 10; ++k) {
        int n = 4 + (int)rng.below(13);
        WeightedGraph g = random_graph(rng, n, (int)rng.below((std::uint64_t)(2 * n)), 0.25, 4.0);
        ResistanceMetric m = ResistanceMetric::dense(g);
        int x = (int)rng.below((std::uint64_t)n);
        int y = -1;
        for (int c = 1; c < n && y < 0; ++c) {
            int cand = (x + c) % n;
            bool adjacent = false;
            for (int u : g.neighbors(x)) adjacent = adjacent || u == cand;
            if (!adjacent) y = cand;
        }
        auto star = [&](int v) {
            std::vector<std::size_t> out;
            for (std::size_t e = 0; e < g.edges().size(); ++e)
                if (g.edges()[e].u == v || g.edges()[e].v == v) out.push_back(e);
            return out;
        };
        std::vector<std::vector<std::size_t>> cutsets{star(x)};
        if (y < 0) y = (x + 1) % n;
        else cutsets.push_back(star(y));
        if (nash_williams_bound(g, x, y, cutsets) > m(x, y) + 1e-12) ++cutset_viol;
    }
    if (cutset_viol > 0) {
        ok = false;
        res.notes.push_back("cutset lower bound exceeded the metric");
    }

    push(res, "max_series_parallel_error", worst_sp, "dimensionless");
    push(res, "rayleigh_violations", rayleigh_viol, "count");
    push(res, "max_tree_cutset_error", worst_tree, "dimensionless");
    push(res, "cutset_bound_violations", cutset_viol, "count");
    res.pass = ok;
    return res;
}

int brute_packing(const ResistanceMetric& m, double r) {
    int n = m.vertex_count();
    std::vector<std::uint32_t> ball(n, 0);
    for (int x = 0; x < n; ++x)
        for (int y : m.ball(x, r)) ball[x] |= 1u << y;
    int best = 0;
    for (std::uint32_t s = 1; s < (1u << n); ++s) {
        std::uint32_t used = 0;
        int cnt = 0;
        bool ok = true;
        for (int v = 0; v < n && ok; ++v)
            if (s >> v & 1u) {
                if (used & ball[v]) ok = false;
                used |= ball[v];
                ++cnt;
            }
        if (ok) best = std::max(best, cnt);
    }
    return best;
}

int brute_covering(const ResistanceMetric& m, double r) {
    int n = m.vertex_count();
    std::vector<std::uint32_t> ball(n, 0);
    for (int x = 0; x < n; ++x)
        for (int y : m.ball(x, r)) ball[x] |= 1u << y;
    std::uint32_t full = (1u << n) - 1u;
    int best = n;
    for (std::uint32_t s = 1; s < (1u << n); ++s) {
        std::uint32_t un = 0;
        int cnt = 0;
        for (int v = 0; v < n; ++v)
            if (s >> v & 1u) {
                un |= ball[v];
                ++cnt;
            }
        if (un == full) best = std::min(best, cnt);
    }
    return best;
}

CriterionResult c5_nets(const CatalogOptions& opt) {
    (void)opt;
    CriterionResult res;
    res.id = 5;
    res.name = "packing and covering numbers against exhaustive search, with duality";
    int mismatches = 0;
    int duality_viol = 0;
    int checks = 0;
    for (const NamedGraph& ng : exact_catalog()) {
        if (ng.g.vertex_count() > 12) continue;
        ResistanceMetric m = ResistanceMetric::dense(ng.g);
        double diam = m.diameter().value;
        for (int j = 0; j < 20; ++j) {
            double r = diam * 1.02 * j / 19.0;
            ++checks;
            NetResult pe = packing_number(m, r, NetMode::exact);
            NetResult ce = covering_number(m, r, NetMode::exact);
            if (pe.count != brute_packing(m, r) || ce.count != brute_covering(m, r)) {
                ++mismatches;
                res.notes.push_back("exhaustive mismatch at " + ng.name);
            }
            NetResult c2r = covering_number(m, 2.0 * r, NetMode::exact);
            NetResult pg = packing_number(m, r, NetMode::greedy);
            if (pe.count > ce.count || c2r.count > pg.count) {
                ++duality_viol;
                res.notes.push_back("duality violated at " + ng.name);
            }
        }
    }
    push(res, "radii_checked", checks, "count");
    push(res, "exhaustive_mismatches", mismatches, "count");
    push(res, "duality_violations", duality_viol, "count");
    res.pass = mismatches == 0 && duality_viol == 0;
    return res;
}

CriterionResult c6_field(const CatalogOptions& opt) {
    CriterionResult res;
    res.id = 6;
    res.name = "field increments, the single-edge maximum, and the cover ratio band";
    bool ok = true;
    const double target = 1.0 / std::sqrt(2.0 * std::acos(-1.0));
    GffOptions go;
    go.threads = opt.threads;
    const int reps = scaled_reps(100000, opt.replica_scale);

    WeightedGraph p2 = make_path(2);
    ResistanceMetric m2 = ResistanceMetric::dense(p2);
    GffModel single = GffModel::build(green_kernel(m2, 0), go);
    ScalarEstimate e2 = estimate_expected_max(single, reps, mix_seed(opt.master_seed, {6, 0}), go);
    if (std::abs(e2.mean - target) > 4.0 * e2.se) {
        ok = false;
        res.notes.push_back("single-edge expected maximum off target");
    }

    double worst_inc = 0.0;
    double dlp_lo = std::numeric_limits<double>::infinity();
    double dlp_hi = -std::numeric_limits<double>::infinity();
    std::string lo_name, hi_name;
    auto cat = exact_catalog();
    for (std::size_t gi = 0; gi < cat.size(); ++gi) {
        const NamedGraph& ng = cat[gi];
        int n = ng.g.vertex_count();
        ResistanceMetric m = ResistanceMetric::dense(ng.g);
        GreenKernel ker = green_kernel(m, m.diameter().x);
        for (int x = 0; x < n; ++x)
            for (int y = x + 1; y < n; ++y)
                worst_inc = std::max(
                    worst_inc,
                    std::abs(ker.c(x, x) + ker.c(y, y) - 2.0 * ker.c(x, y) - m(x, y)));
        GffModel model = GffModel::build(ker, go);
        ScalarEstimate e = estimate_expected_max(model, reps,
                                                 mix_seed(opt.master_seed, {6, gi + 1}), go);
        double t_cov = exact_cover_time(ng.g, kCoverCap).t_cov;
        double ratio = dlp_ratio(ng.g, t_cov, e.mean);
        if (ratio < dlp_lo) {
            dlp_lo = ratio;
            lo_name = ng.name;
        }
        if (ratio > dlp_hi) {
            dlp_hi = ratio;
            hi_name = ng.name;
        }
    }
    if (worst_inc > 1e-9) {
        ok = false;
        res.notes.push_back("kernel increment identity missed");
    }
    if (!(dlp_lo >= 0.05 && dlp_hi <= 50.0)) {
        ok = false;
        res.notes.push_back("cover ratio left the band");
    }
    res.notes.push_back("cover ratio extremes: " + lo_name + " at " + format_double(dlp_lo) +
                        ", " + hi_name + " at " + format_double(dlp_hi));

    push(res, "single_edge_mean", e2.mean, "sqrt-ohms");
    push(res, "max_increment_error", worst_inc, "ohms");
    push(res, "ratio_min", dlp_lo, "dimensionless");
    push(res, "ratio_max", dlp_hi, "dimensionless");
    push(res, "field_replicas", reps, "count");
    if (opt.replica_scale != 1.0)
        res.notes.push_back("replica budget scaled by " + format_double(opt.replica_scale));
    res.pass = ok;
    return res;
}

struct FamilyOutcome {
    std::string key;
    EnsembleStats stats;
    std::optional<ScalingFit> cover_fit;
    std::optional<ScalingFit> diam_fit;
    std::optional<TypeReport> type;
    std::vector<QuartileRow> dispersion;
};

EstimatorBudgets family_budgets(const CatalogOptions& opt, int cover, int hit, int starts) {
    EstimatorBudgets b;
    b.cover_replicas = scaled_reps(cover, opt.replica_scale);
    b.hitting_replicas = scaled_reps(hit, opt.replica_scale);
    b.max_starts = starts;
    b.threads = opt.threads;
    return b;
}

CriterionResult c7_families(const CatalogOptions& opt, std::vector<FamilyOutcome>* out) {
    CriterionResult res;
    res.id = 7;
    res.name = "growth-rate reproductions across the graph families";
    bool ok = true;
    const double w = band_widening(opt.replica_scale);
    const int samples = 20;
    auto clean = [&](const EnsembleStats& s, const std::string& key) {
        if (s.failed_samples == 0 && s.guard_violations == 0) return;
        ok = false;
        res.notes.push_back(key + ": " + std::to_string(s.failed_samples) + " failed samples, " +
                            std::to_string(s.guard_violations) + " guard violations");
    };
    auto keep = [&](FamilyOutcome fo) {
        if (out) out->push_back(std::move(fo));
    };

    {
        FamilySpec spec;
        spec.family = Family::gw_supercritical;
        spec.offspring = OffspringSpec::poisson(2.0);
        EnsembleStats st = run_ensemble(spec, {4, 5, 6, 7, 8, 9}, samples,
                                        family_budgets(opt, 8, 4, 2),
                                        mix_seed(opt.master_seed, {7, 1}));
        clean(st, "gw");
        ScalingFit fit = fit_scaling_exponent(st, ScalingModel::power_in_n,
                                              FitQuantity::cover_per_edge,
                                              mix_seed(opt.master_seed, {7, 1, 99}));
        push(res, "gw_cover_per_edge_exponent", fit.exponent, "dimensionless");
        if (std::abs(fit.exponent - 2.0) > 0.4 * w) {
            ok = false;
            res.notes.push_back("gw cover-per-edge exponent outside 2 +- 0.4");
        }
        FamilyOutcome fo;
        fo.key = "gw";
        fo.stats = std::move(st);
        fo.cover_fit = std::move(fit);
        keep(std::move(fo));
    }

    {
        FamilySpec spec;
        spec.family = Family::sierpinski;
        EnsembleStats st = run_ensemble(spec, {1, 2, 3, 4, 5}, samples,
                                        family_budgets(opt, 8, 4, 2),
                                        mix_seed(opt.master_seed, {7, 2}));
        clean(st, "sierpinski");
        ScalingFit cfit = fit_scaling_exponent(st, ScalingModel::per_level_geometric,
                                               FitQuantity::cover_time,
                                               mix_seed(opt.master_seed, {7, 2, 99}));
        ScalingFit dfit = fit_scaling_exponent(st, ScalingModel::per_level_geometric,
                                               FitQuantity::resistance_diameter,
                                               mix_seed(opt.master_seed, {7, 2, 98}));
        auto ratio_median = [](const ScalingFit& f) {
            std::vector<double> r;
            for (std::size_t i = 0; i + 1 < f.medians.size(); ++i)
                r.push_back(f.medians[i + 1] / f.medians[i]);
            return median_of(r);
        };
        double ct = ratio_median(cfit);
        double dt = ratio_median(dfit);
        push(res, "sierpinski_cover_level_ratio", ct, "dimensionless");
        push(res, "sierpinski_diameter_level_ratio", dt, "dimensionless");
        if (ct < 5.0 - 1.0 * w || ct > 5.0 + 1.0 * w) {
            ok = false;
            res.notes.push_back("gasket cover ratio outside [4, 6]");
        }
        if (dt < 1.675 - 0.125 * w || dt > 1.675 + 0.125 * w) {
            ok = false;
            res.notes.push_back("gasket diameter ratio outside [1.55, 1.80]");
        }
        FamilyOutcome fo;
        fo.key = "sierpinski";
        fo.stats = std::move(st);
        fo.cover_fit = std::move(cfit);
        fo.diam_fit = std::move(dfit);
        keep(std::move(fo));
    }

    {
        FamilySpec spec;
        spec.family = Family::er;
        spec.regime = ErRegime::critical;
        EnsembleStats st = run_ensemble(spec, {500, 1000, 2000}, samples,
                                        family_budgets(opt, 12, 6, 2),
                                        mix_seed(opt.master_seed, {7, 3}));
        clean(st, "er_critical");
        ScalingFit fit = fit_scaling_exponent(st, ScalingModel::power_in_n,
                                              FitQuantity::cover_time,
                                              mix_seed(opt.master_seed, {7, 3, 99}));
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        for (std::size_t i = 0; i < fit.medians.size(); ++i) {
            double v = fit.medians[i] / (double)fit.n_values[i];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        push(res, "er_cover_exponent", fit.exponent, "dimensionless");
        push(res, "er_cover_over_n_spread", hi / lo, "dimensionless");
        if (hi / lo > 3.0 * w) {
            ok = false;
            res.notes.push_back("er cover medians drift beyond a factor 3 of linear");
        }
        TypeReport tr = classify_type(st);
        std::size_t j16 = tr.lambda_grid.size();
        for (std::size_t j = 0; j < tr.lambda_grid.size(); ++j)
            if (std::abs(tr.lambda_grid[j] - 16.0) < 1e-9) j16 = j;
        double freq = 1.0;
        std::size_t last = tr.n_values.size() - 1;
        if (j16 < tr.lambda_grid.size() && last >= 1) {
            freq = std::min(tr.type2_freq[last - 1][j16], tr.type2_freq[last][j16]);
        }
        push(res, "er_type2_freq_lambda16", freq, "dimensionless");
        if (freq < 0.9 - 1e-12) {
            ok = false;
            res.notes.push_back("er short-range event frequency below 0.9 at lambda 16");
        }
        FamilyOutcome fo;
        fo.key = "er_critical";
        fo.stats = std::move(st);
        fo.cover_fit = std::move(fit);
        fo.type = std::move(tr);
        keep(std::move(fo));
    }

    {
        FamilySpec spec;
        spec.family = Family::iic_kesten;
        spec.offspring = OffspringSpec::geometric(0.5);
        EnsembleStats st = run_ensemble(spec, {8, 12, 16, 20, 24}, samples,
                                        family_budgets(opt, 8, 4, 2),
                                        mix_seed(opt.master_seed, {7, 4}));
        clean(st, "iic");
        ScalingFit fit = fit_scaling_exponent(st, ScalingModel::power_in_n,
                                              FitQuantity::cover_time,
                                              mix_seed(opt.master_seed, {7, 4, 99}));
        push(res, "iic_cover_exponent", fit.exponent, "dimensionless");
        if (std::abs(fit.exponent - 3.0) > 0.5 * w) {
            ok = false;
            res.notes.push_back("iic cover exponent outside 3 +- 0.5");
        }
        std::vector<double> scales;
        for (int n : st.n_values)
            scales.push_back(survival_probability(*spec.offspring, n) / ((double)n * (double)n));
        std::vector<QuartileRow> q = cover_quartiles(st, scales);
        std::string spread = "iic interquartile ratios of the survival-scaled cover:";
        for (const QuartileRow& row : q)
            spread += " " + std::to_string(row.n) + ":" + format_double(row.iqr_ratio);
        res.notes.push_back(spread);
        FamilyOutcome fo;
        fo.key = "iic";
        fo.stats = std::move(st);
        fo.cover_fit = std::move(fit);
        fo.dispersion = std::move(q);
        keep(std::move(fo));
    }

    {
        FamilySpec spec;
        spec.family = Family::rw_range;
        spec.dim = 5;
        EnsembleStats st = run_ensemble(spec, {2000, 5000, 10000}, samples,
                                        family_budgets(opt, 2, 2, 1),
                                        mix_seed(opt.master_seed, {7, 5}));
        clean(st, "rw_range");
        ScalingFit fit = fit_scaling_exponent(st, ScalingModel::power_in_n,
                                              FitQuantity::cover_time,
                                              mix_seed(opt.master_seed, {7, 5, 99}));
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        for (std::size_t i = 0; i < fit.medians.size(); ++i) {
            double nn = (double)fit.n_values[i];
            double v = fit.medians[i] / (nn * nn);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        push(res, "rw_cover_exponent", fit.exponent, "dimensionless");
        push(res, "rw_cover_over_n2_spread", hi / lo, "dimensionless");
        if (hi / lo > 3.0 * w) {
            ok = false;
            res.notes.push_back("walk-trace cover medians drift beyond a factor 3 of quadratic");
        }
        FamilyOutcome fo;
        fo.key = "rw_range";
        fo.stats = std::move(st);
        fo.cover_fit = std::move(fit);
        keep(std::move(fo));
    }

    {
        FamilySpec spec;
        spec.family = Family::complete;
        EnsembleStats st = run_ensemble(spec, {8, 64, 512}, samples,
                                        family_budgets(opt, 48, 4, 1),
                                        mix_seed(opt.master_seed, {7, 6}));
        clean(st, "anchor_complete");
        TypeReport tr = classify_type(st);
        push(res, "anchor_complete_type1", tr.verdict == Verdict::type1_consistent ? 1.0 : 0.0,
             "dimensionless");
        if (tr.verdict != Verdict::type1_consistent) {
            ok = false;
            res.notes.push_back(std::string("complete-graph anchor classified as ") +
                                verdict_name(tr.verdict));
        }
        FamilyOutcome fo;
        fo.key = "anchor_complete";
        fo.stats = std::move(st);
        fo.type = std::move(tr);
        keep(std::move(fo));
    }

    {
        FamilySpec spec;
        spec.family = Family::cycle;
        EnsembleStats st = run_ensemble(spec, {32, 128, 512}, samples,
                                        family_budgets(opt, 48, 4, 1),
                                        mix_seed(opt.master_seed, {7, 7}));
        clean(st, "anchor_cycle");
        TypeReport tr = classify_type(st);
        push(res, "anchor_cycle_type2", tr.verdict == Verdict::type2_consistent ? 1.0 : 0.0,
             "dimensionless");
        if (tr.verdict != Verdict::type2_consistent) {
            ok = false;
            res.notes.push_back(std::string("cycle anchor classified as ") +
                                verdict_name(tr.verdict));
        }
        FamilyOutcome fo;
        fo.key = "anchor_cycle";
        fo.stats = std::move(st);
        fo.type = std::move(tr);
        keep(std::move(fo));
    }

    if (opt.replica_scale != 1.0)
        res.notes.push_back("replica budget scaled by " + format_double(opt.replica_scale) +
                            "; fixed bands widened by " + format_double(w));
    res.pass = ok;
    return res;
}

struct CatalogData {
    std::vector<CriterionResult> criteria; // ids 1..7
    std::vector<FamilyOutcome> families;
};

void validate_options(const CatalogOptions& opt) {
    require(std::isfinite(opt.replica_scale) && opt.replica_scale > 0,
            ErrorCode::InvalidParameters, "replica_scale must be positive and finite");
    require(opt.threads >= 1, ErrorCode::InvalidParameters, "threads must be at least 1");
}

CatalogData compute_catalog(const CatalogOptions& opt) {
    CatalogData d;
    d.criteria.push_back(c1_commute(opt));
    d.criteria.push_back(c2_sandwich(opt));
    d.criteria.push_back(c3_closed_forms(opt));
    d.criteria.push_back(c4_resistance(opt));
    d.criteria.push_back(c5_nets(opt));
    d.criteria.push_back(c6_field(opt));
    d.criteria.push_back(c7_families(opt, &d.families));
    return d;
}

nlohmann::json criterion_json(const CriterionResult& r) {
    nlohmann::json j;
    j["id"] = r.id;
    j["name"] = r.name;
    j["required"] = r.required;
    j["pass"] = r.pass;
    nlohmann::json ms = nlohmann::json::object();
    for (const Measure& m : r.measures) ms[m.name] = num(m.value, m.unit.c_str());
    j["measures"] = ms;
    j["notes"] = r.notes;
    return j;
}

// Everything the catalog writes, keyed by relative path. The determinism row
// is absent while the two passes are being compared and appended afterwards.
std::map<std::string, std::string> serialize_catalog(const CatalogData& d,
                                                     const CatalogOptions& opt,
                                                     const CriterionResult* row8) {
    nlohmann::json root = report_header(opt.master_seed);
    root["suite"] = "cover-time acceptance catalog";
    root["replica_scale"] = num(opt.replica_scale, "dimensionless");
    nlohmann::json rows = nlohmann::json::array();
    bool all = true;
    for (const CriterionResult& c : d.criteria) {
        rows.push_back(criterion_json(c));
        if (c.required && !c.pass) all = false;
    }
    if (row8) {
        rows.push_back(criterion_json(*row8));
        if (row8->required && !row8->pass) all = false;
    }
    root["criteria"] = rows;
    root["all_required_pass"] = all;
    nlohmann::json fams = nlohmann::json::object();
    for (const FamilyOutcome& f : d.families) {
        nlohmann::json fj;
        fj["summary"] = stats_summary_json(f.stats);
        if (f.cover_fit) fj["cover_fit"] = scaling_fit_json(*f.cover_fit);
        if (f.diam_fit) fj["diameter_fit"] = scaling_fit_json(*f.diam_fit);
        if (f.type) fj["type_report"] = type_report_json(*f.type);
        if (!f.dispersion.empty()) fj["dispersion"] = quartiles_json(f.dispersion);
        fams[f.key] = fj;
    }
    root["families"] = fams;

    std::map<std::string, std::string> files;
    files["catalog_report.json"] = dump_report(root);
    std::string csv = "id,name,required,pass\n";
    auto add_row = [&csv](const CriterionResult& c) {
        csv += std::to_string(c.id) + "," + c.name + "," + (c.required ? "1" : "0") + "," +
               (c.pass ? "1" : "0") + "\n";
    };
    for (const CriterionResult& c : d.criteria) add_row(c);
    if (row8) add_row(*row8);
    files["catalog_criteria.csv"] = csv;
    for (const FamilyOutcome& f : d.families) {
        files["families/" + f.key + "_samples.csv"] = stats_csv(f.stats);
        if (f.cover_fit)
            files["families/" + f.key + "_cover_medians.dat"] = two_column_dat(
                "n", "median_cover_steps", f.cover_fit->n_values, f.cover_fit->medians);
    }
    return files;
}

} // namespace

CriterionResult run_criterion(int id, const CatalogOptions& opt) {
    validate_options(opt);
    switch (id) {
        case 1: return c1_commute(opt);
        case 2: return c2_sandwich(opt);
        case 3: return c3_closed_forms(opt);
        case 4: return c4_resistance(opt);
        case 5: return c5_nets(opt);
        case 6: return c6_field(opt);
        case 7: return c7_families(opt, nullptr);
        default: break;
    }
    fail(ErrorCode::InvalidParameters,
         "criterion id must be 1..7; the determinism row only exists in a full catalog run");
}

CatalogOutput run_catalog(const CatalogOptions& opt) {
    validate_options(opt);
    CatalogOutput out;
    out.options = opt;
    CatalogData d = compute_catalog(opt);
    std::map<std::string, std::string> first = serialize_catalog(d, opt, nullptr);

    CriterionResult r8;
    r8.id = 8;
    r8.name = "byte-identical reports from one master seed";
    if (opt.verify_determinism) {
        CatalogData d2 = compute_catalog(opt);
        std::map<std::string, std::string> second = serialize_catalog(d2, opt, nullptr);
        r8.pass = first == second;
        push(r8, "files_compared", (double)first.size(), "count");
        if (!r8.pass) {
            for (const auto& [path, bytes] : first) {
                auto it = second.find(path);
                if (it == second.end() || it->second != bytes)
                    r8.notes.push_back("differs: " + path);
            }
            for (const auto& [path, bytes] : second)
                if (!first.count(path)) r8.notes.push_back("differs: " + path);
        }
    } else {
        r8.required = false;
        r8.pass = false;
        r8.notes.push_back("not evaluated: the double run is disabled by options");
    }

    out.criteria = d.criteria;
    out.criteria.push_back(r8);
    out.all_required_pass = true;
    for (const CriterionResult& c : out.criteria)
        if (c.required && !c.pass) out.all_required_pass = false;
    out.files = serialize_catalog(d, opt, &r8);
    return out;
}

} // namespace ctlab
