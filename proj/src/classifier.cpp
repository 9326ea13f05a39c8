#include "ctlab/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "ctlab/chain_exact.hpp"
#include "ctlab/errors.hpp"
#include "ctlab/metric_geometry.hpp"
#include "ctlab/parallel.hpp"
#include "ctlab/rng.hpp"
#include "ctlab/summary.hpp"
#include "ctlab/walk_mc.hpp"

namespace ctlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool uniform_edge_weights(const WeightedGraph& g) {
    const std::vector<Edge>& es = g.edges();
    for (const Edge& e : es)
        if (e.w != es.front().w) return false;
    return true;
}

// The guard behind every record: t_hit <= t_cov <= 2 t_hit ln|V|, with four
// standard errors of slack on whichever sides carry Monte Carlo noise.
bool record_guard(const SampleRecord& rec) {
    double logn = std::log((double)std::max(rec.vertices, 2));
    double slack = 4.0 * (rec.t_cov_se + rec.t_hit_se * 2.0 * logn) +
                   1e-9 * (1.0 + rec.t_cov);
    return sandwich_check(rec.t_cov, rec.t_hit, rec.vertices, slack).pass;
}

SampleRecord measure_sample(const FamilySpec& spec, int n, int sample_idx,
                            const EstimatorBudgets& b, std::uint64_t master) {
    SampleRecord rec;
    rec.n_param = n;
    rec.sample_index = sample_idx;
    std::uint64_t fam = (std::uint64_t)spec.family;
    std::uint64_t nn = (std::uint64_t)n;
    std::uint64_t ss = (std::uint64_t)sample_idx;
    rec.graph_seed = mix_seed(master, {fam, nn, ss, 0});
    rec.walk_seed = mix_seed(master, {fam, nn, ss, 1});

    WeightedGraph g = generate(spec, n, rec.graph_seed);
    rec.vertices = g.vertex_count();
    rec.edges = (std::uint64_t)g.edge_count();
    rec.volume = g.volume();

    WalkOptions wo;
    wo.step_cap = b.step_cap;
    wo.threads = 1; // parallelism lives at the sample level

    bool dense_ok = rec.vertices >= 2 && rec.vertices <= b.metric_cap;
    if (dense_ok) {
        ResistanceMetric m = ResistanceMetric::dense(g);
        ResistanceMetric::Diameter d = m.diameter();
        rec.diam_r = d.value;
        rec.diam_exact = true;
        rec.witness_from = d.x;
        rec.witness_to = d.y;
        MaxHitting mh = max_hitting_from_metric(m);
        rec.t_hit = mh.t_hit;
        rec.t_hit_exact = true;
        rec.metric_done = true;
        if (b.with_chaining)
            rec.chaining = chaining_functional(m, dyadic_scales(m), NetMode::greedy);
        if (b.with_packing)
            for (double f : b.radius_fractions)
                rec.packing_counts.push_back(
                    packing_number(m, f * rec.diam_r, NetMode::greedy).count);
    } else {
        std::pair<int, int> sweep = bfs_double_sweep(g);
        rec.witness_from = sweep.first;
        rec.witness_to = sweep.second;
        if (g.is_tree() && uniform_edge_weights(g)) {
            // hop double sweep is exact on trees, and with one common
            // conductance the resistance metric is the hop metric over it
            std::vector<int> hops = bfs_distances(g, sweep.first);
            rec.diam_r = (double)hops[(std::size_t)sweep.second] / g.edges().front().w;
            rec.diam_exact = true;
        } else {
            ResistanceMetric pp = ResistanceMetric::per_pair(g);
            rec.diam_r = pp(sweep.first, sweep.second);
            rec.diam_exact = false; // witness value only: a lower bound
        }
        CoverEstimate fwd = estimate_hitting(g, sweep.first, sweep.second,
                                             b.hitting_replicas,
                                             mix_seed(master, {fam, nn, ss, 2}), wo);
        CoverEstimate bwd = estimate_hitting(g, sweep.second, sweep.first,
                                             b.hitting_replicas,
                                             mix_seed(master, {fam, nn, ss, 3}), wo);
        if (bwd.mean > fwd.mean) std::swap(rec.witness_from, rec.witness_to);
        const CoverEstimate& win = bwd.mean > fwd.mean ? bwd : fwd;
        rec.t_hit = win.mean;
        rec.t_hit_se = win.se;
        rec.t_hit_exact = false;
    }

    if (rec.vertices <= b.exact_cover_cap) {
        CoverExact ce = exact_cover_time(g, b.exact_cover_cap);
        rec.t_cov = ce.t_cov;
        rec.t_cov_exact = true;
        rec.cover_start = ce.witness_start;
    } else {
        std::vector<int> cand =
            heuristic_start_set(g, {rec.witness_from, rec.witness_to});
        int cap = std::max(1, b.max_starts);
        if ((int)cand.size() > cap) cand.resize((std::size_t)cap);
        CoverEstimate ce = estimate_cover_time(g, StartPolicy::worst_of_set(cand),
                                               b.cover_replicas, rec.walk_seed, wo);
        rec.t_cov = ce.mean;
        rec.t_cov_se = ce.se;
        rec.cover_replicas = ce.replicas;
        rec.cover_start = ce.start_used;
    }
    return rec;
}

std::vector<std::vector<const SampleRecord*>> group_by_n(const EnsembleStats& stats) {
    std::vector<std::vector<const SampleRecord*>> groups(stats.n_values.size());
    for (const SampleRecord& r : stats.records) {
        auto it = std::find(stats.n_values.begin(), stats.n_values.end(), r.n_param);
        require(it != stats.n_values.end(), ErrorCode::InvalidParameters,
                "record carries an n outside the stats n grid");
        groups[(std::size_t)(it - stats.n_values.begin())].push_back(&r);
    }
    return groups;
}

double record_value(const SampleRecord& r, FitQuantity q) {
    switch (q) {
    case FitQuantity::cover_time: return r.t_cov;
    case FitQuantity::cover_per_edge: return r.t_cov / (double)r.edges;
    case FitQuantity::resistance_diameter: return r.diam_r;
    }
    throw Error(ErrorCode::InvalidParameters, "unknown fit quantity");
}

double lsq_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    double n = (double)xs.size();
    double sx = kahan_sum(xs);
    double sy = kahan_sum(ys);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - sx / n) * (xs[i] - sx / n);
        sxy += (xs[i] - sx / n) * (ys[i] - sy / n);
    }
    require(sxx > 0.0, ErrorCode::InvalidParameters,
            "scaling fit needs at least two distinct n");
    return sxy / sxx;
}

double quantile_sorted(const std::vector<double>& v, double p) {
    double pos = p * (double)(v.size() - 1);
    std::size_t lo = (std::size_t)pos;
    if (lo + 1 >= v.size()) return v.back();
    double frac = pos - (double)lo;
    return v[lo] + (v[lo + 1] - v[lo]) * frac;
}

} // namespace

MaxHitting max_hitting_from_metric(const ResistanceMetric& m) {
    require(m.has_table(), ErrorCode::InvalidParameters,
            "worst-case first-passage extraction needs the dense table");
    const WeightedGraph& g = m.graph();
    int n = g.vertex_count();
    const Eigen::MatrixXd& t = m.table();
    Eigen::VectorXd mu(n);
    for (int v = 0; v < n; ++v) mu(v) = g.strength(v);
    Eigen::VectorXd s = t * mu; // s(x) = sum_z mu_z R(x,z)
    double vol = g.volume();
    MaxHitting best;
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            double h = 0.5 * (vol * t(x, y) + s(y) - s(x));
            if (h > best.t_hit) {
                best.t_hit = h;
                best.from = x;
                best.to = y;
            }
        }
    return best;
}

EnsembleStats run_ensemble(const FamilySpec& spec, const std::vector<int>& n_values,
                           int samples_per_n, const EstimatorBudgets& budgets,
                           std::uint64_t seed) {
    require(!n_values.empty(), ErrorCode::InvalidParameters, "no n values given");
    require(samples_per_n >= 1, ErrorCode::InvalidParameters,
            "samples per n must be >= 1");
    require(budgets.cover_replicas >= 2 && budgets.hitting_replicas >= 2,
            ErrorCode::InvalidParameters, "replica budgets must be >= 2");
    require(budgets.exact_cover_cap >= 0 && budgets.metric_cap >= 0,
            ErrorCode::InvalidParameters, "size caps must be >= 0");
    for (double f : budgets.radius_fractions)
        require(f >= 0.0 && std::isfinite(f), ErrorCode::InvalidParameters,
                "radius fractions must be finite and >= 0");

    EnsembleStats stats;
    stats.spec = spec;
    stats.n_values = n_values;
    std::sort(stats.n_values.begin(), stats.n_values.end());
    stats.n_values.erase(std::unique(stats.n_values.begin(), stats.n_values.end()),
                         stats.n_values.end());
    stats.samples_per_n = samples_per_n;
    stats.master_seed = seed;
    stats.budgets = budgets;

    int total = (int)stats.n_values.size() * samples_per_n;
    std::vector<std::optional<SampleRecord>> slots((std::size_t)total);
    std::vector<std::uint8_t> state((std::size_t)total, 0); // 0 ok, 1 empty, 2 guard
    parallel_for(total, budgets.threads, [&](int idx) {
        int ni = idx / samples_per_n;
        int si = idx % samples_per_n;
        try {
            SampleRecord rec =
                measure_sample(spec, stats.n_values[(std::size_t)ni], si, budgets, seed);
            state[(std::size_t)idx] = record_guard(rec) ? 0 : 2;
            slots[(std::size_t)idx] = std::move(rec);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::EmptyGraph) throw;
            state[(std::size_t)idx] = 1;
        }
    });

    for (int idx = 0; idx < total; ++idx) {
        if (state[(std::size_t)idx] == 0)
            stats.records.push_back(std::move(*slots[(std::size_t)idx]));
        else if (state[(std::size_t)idx] == 1)
            ++stats.failed_samples;
        else
            ++stats.guard_violations;
    }
    return stats;
}

const char* verdict_name(Verdict v) {
    switch (v) {
    case Verdict::type1_consistent: return "type1-consistent";
    case Verdict::type2_consistent: return "type2-consistent";
    case Verdict::neither: return "neither";
    case Verdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

TypeReport classify_type(const EnsembleStats& stats,
                         const std::vector<double>& lambda_grid, double threshold) {
    require(!lambda_grid.empty(), ErrorCode::InvalidParameters, "empty lambda grid");
    for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
        require(lambda_grid[i] > 1.0, ErrorCode::InvalidParameters,
                "lambda values must exceed 1");
        require(i == 0 || lambda_grid[i] > lambda_grid[i - 1],
                ErrorCode::InvalidParameters, "lambda grid must be ascending");
    }
    require(threshold > 0.0 && threshold <= 1.0, ErrorCode::InvalidParameters,
            "threshold must lie in (0,1]");

    std::vector<std::vector<const SampleRecord*>> groups = group_by_n(stats);
    TypeReport rep;
    rep.lambda_grid = lambda_grid;
    rep.threshold = threshold;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        if ((int)groups[gi].size() >= 10) {
            rep.n_values.push_back(stats.n_values[gi]);
            rep.records_per_n.push_back((int)groups[gi].size());
        }
    }
    require((int)rep.n_values.size() >= 3, ErrorCode::InsufficientData,
            "type classification needs >= 3 n values with >= 10 records each");

    std::size_t nl = lambda_grid.size();
    rep.type1_freq.assign(rep.n_values.size(), std::vector<double>(nl, 0.0));
    rep.type2_freq.assign(rep.n_values.size(), std::vector<double>(nl, 0.0));
    for (std::size_t ri = 0; ri < rep.n_values.size(); ++ri) {
        std::size_t gi = 0;
        while (stats.n_values[gi] != rep.n_values[ri]) ++gi;
        for (const SampleRecord* r : groups[gi]) {
            double logv = std::log((double)std::max(r->vertices, 2));
            double h = r->t_hit;
            double c = r->t_cov;
            double r1 = c / (h * logv);
            double s1 = 4.0 * (r->t_cov_se / (h * logv) +
                               c * r->t_hit_se / (h * h * logv));
            double r2 = c / h;
            double s2 = 4.0 * (r->t_cov_se / h + c * r->t_hit_se / (h * h));
            for (std::size_t li = 0; li < nl; ++li) {
                double lam = lambda_grid[li];
                if (r1 + s1 >= 1.0 / lam && r1 - s1 <= 2.0)
                    rep.type1_freq[ri][li] += 1.0;
                if (r2 + s2 >= 1.0 && r2 - s2 <= lam)
                    rep.type2_freq[ri][li] += 1.0;
            }
        }
        for (std::size_t li = 0; li < nl; ++li) {
            rep.type1_freq[ri][li] /= (double)rep.records_per_n[ri];
            rep.type2_freq[ri][li] /= (double)rep.records_per_n[ri];
        }
    }

    auto star = [&](const std::vector<double>& freq) {
        for (std::size_t li = 0; li < nl; ++li)
            if (freq[li] >= threshold - 1e-12) return lambda_grid[li];
        return kInf;
    };
    for (std::size_t ri = 0; ri < rep.n_values.size(); ++ri) {
        rep.lambda1_star.push_back(star(rep.type1_freq[ri]));
        rep.lambda2_star.push_back(star(rep.type2_freq[ri]));
    }

    std::size_t last = rep.n_values.size() - 1;
    bool met1 = rep.lambda1_star[last] < kInf && rep.lambda1_star[last - 1] < kInf;
    bool met2 = rep.lambda2_star[last] < kInf && rep.lambda2_star[last - 1] < kInf;
    if (met1 && !met2) {
        rep.verdict = Verdict::type1_consistent;
    } else if (met2 && !met1) {
        rep.verdict = Verdict::type2_consistent;
    } else if (!met1) {
        rep.verdict = Verdict::neither;
    } else {
        // both events saturate; fall back to how the threshold lambda moves
        // with n, which separates a ratio that stays put from one that grows
        bool grew1 = rep.lambda1_star[last] > rep.lambda1_star[0];
        bool stable1 = rep.lambda1_star[last] == rep.lambda1_star[0];
        bool grew2 = rep.lambda2_star[last] > rep.lambda2_star[0];
        bool stable2 = rep.lambda2_star[last] == rep.lambda2_star[0];
        if (grew1 && stable2)
            rep.verdict = Verdict::type2_consistent;
        else if (grew2 && stable1)
            rep.verdict = Verdict::type1_consistent;
        else
            rep.verdict = Verdict::inconclusive;
    }
    return rep;
}

ScalingFit fit_scaling_exponent(const EnsembleStats& stats, ScalingModel model,
                                FitQuantity quantity, std::uint64_t seed,
                                int bootstrap_replicas) {
    require(bootstrap_replicas >= 0, ErrorCode::InvalidParameters,
            "bootstrap replicas must be >= 0");
    std::vector<std::vector<const SampleRecord*>> groups = group_by_n(stats);

    ScalingFit fit;
    fit.model = model;
    fit.quantity = quantity;
    std::vector<std::vector<double>> values;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        if (groups[gi].empty()) continue;
        std::vector<double> vs;
        for (const SampleRecord* r : groups[gi]) vs.push_back(record_value(*r, quantity));
        fit.n_values.push_back(stats.n_values[gi]);
        values.push_back(std::move(vs));
    }
    require((int)fit.n_values.size() >= 3, ErrorCode::InsufficientData,
            "scaling fit needs >= 3 n values with records");

    auto slope_of = [&](const std::vector<double>& med) {
        std::vector<double> xs, ys;
        for (std::size_t i = 0; i < med.size(); ++i) {
            require(med[i] > 0.0, ErrorCode::InvalidParameters,
                    "scaling fit needs positive medians");
            xs.push_back(model == ScalingModel::power_in_n
                             ? std::log((double)fit.n_values[i])
                             : (double)fit.n_values[i]);
            ys.push_back(std::log(med[i]));
        }
        return lsq_slope(xs, ys);
    };
    auto finish = [&](double slope) {
        return model == ScalingModel::power_in_n ? slope : std::exp(slope);
    };

    for (const std::vector<double>& vs : values) fit.medians.push_back(median_of(vs));
    fit.exponent = finish(slope_of(fit.medians));
    fit.bootstrap_replicas = bootstrap_replicas;

    if (bootstrap_replicas == 0) {
        fit.ci_lo = fit.ci_hi = fit.exponent;
        return fit;
    }
    std::vector<double> reps;
    for (int rep = 0; rep < bootstrap_replicas; ++rep) {
        std::vector<double> med;
        for (std::size_t gi = 0; gi < values.size(); ++gi) {
            Rng rng(mix_seed(seed, {(std::uint64_t)rep, (std::uint64_t)gi}));
            std::vector<double> draw(values[gi].size());
            for (double& d : draw)
                d = values[gi][(std::size_t)rng.below(values[gi].size())];
            med.push_back(median_of(draw));
        }
        reps.push_back(finish(slope_of(med)));
    }
    std::sort(reps.begin(), reps.end());
    fit.ci_lo = quantile_sorted(reps, 0.025);
    fit.ci_hi = quantile_sorted(reps, 0.975);
    return fit;
}

std::vector<QuartileRow> cover_quartiles(const EnsembleStats& stats,
                                         const std::vector<double>& scale_per_n) {
    require(scale_per_n.empty() || scale_per_n.size() == stats.n_values.size(),
            ErrorCode::InvalidParameters,
            "scale list must match the n grid when given");
    for (double s : scale_per_n)
        require(s > 0.0 && std::isfinite(s), ErrorCode::InvalidParameters,
                "scales must be finite and > 0");
    std::vector<std::vector<const SampleRecord*>> groups = group_by_n(stats);
    std::vector<QuartileRow> rows;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        if (groups[gi].empty()) continue;
        double scale = scale_per_n.empty() ? 1.0 : scale_per_n[gi];
        std::vector<double> vs;
        for (const SampleRecord* r : groups[gi]) vs.push_back(r->t_cov * scale);
        std::sort(vs.begin(), vs.end());
        QuartileRow row;
        row.n = stats.n_values[gi];
        row.count = (int)vs.size();
        row.q1 = quantile_sorted(vs, 0.25);
        row.median = quantile_sorted(vs, 0.5);
        row.q3 = quantile_sorted(vs, 0.75);
        row.iqr_ratio = row.q1 > 0.0 ? row.q3 / row.q1 : 0.0;
        rows.push_back(row);
    }
    return rows;
}

} // namespace ctlab
