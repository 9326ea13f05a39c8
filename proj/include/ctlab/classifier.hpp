#pragma once

#include <cstdint>
#include <vector>

#include "ctlab/ensembles.hpp"
#include "ctlab/graph.hpp"
#include "ctlab/resistance.hpp"

namespace ctlab {

// Per-sample measurement of one generated graph. Exact routes (small
// instances) leave the SE at zero; Monte Carlo routes record it. When the
// graph is too large for the dense metric, t_hit falls back to first-passage
// estimates between the diameter witness pair (a lower bound; the winning
// direction is recorded) and chaining / packing columns are left empty with
// metric_done = false.
struct SampleRecord {
    int n_param = 0;
    int sample_index = 0;
    std::uint64_t graph_seed = 0;
    std::uint64_t walk_seed = 0;

    int vertices = 0;
    std::uint64_t edges = 0;
    double volume = 0.0;

    double diam_r = 0.0;
    bool diam_exact = true;
    int witness_from = 0; // pair realizing (or witnessing) the diameter
    int witness_to = 0;

    double t_hit = 0.0;
    double t_hit_se = 0.0;
    bool t_hit_exact = true;

    double t_cov = 0.0;
    double t_cov_se = 0.0;
    bool t_cov_exact = false;
    int cover_replicas = 0;
    int cover_start = -1; // argmax start; -1 for the exact route

    bool metric_done = false;
    double chaining = 0.0;
    std::vector<int> packing_counts; // greedy, at radius_fractions * diam_r
};

struct EstimatorBudgets {
    int cover_replicas = 24;
    int hitting_replicas = 12;
    std::uint64_t step_cap = 10'000'000'000ULL;
    int exact_cover_cap = 12;  // vertex ceiling for the visited-set DP
    int metric_cap = 600;      // vertex ceiling for the dense metric work
    int max_starts = 3;        // worst-of-set candidate budget
    int threads = 1;
    bool with_chaining = true;
    bool with_packing = true;
    std::vector<double> radius_fractions = {0.0625, 0.125, 0.25, 0.5};
};

struct EnsembleStats {
    FamilySpec spec;
    std::vector<int> n_values; // ascending, unique
    int samples_per_n = 0;
    std::uint64_t master_seed = 0;
    EstimatorBudgets budgets;

    std::vector<SampleRecord> records; // grouped by n, then sample index
    int failed_samples = 0;    // generation produced an empty graph
    int guard_violations = 0;  // record failed the hit <= cov <= 2 hit ln n guard

    bool partial() const { return failed_samples > 0 || guard_violations > 0; }
};

// Runs the family at every (n, sample) cell on independent substreams of the
// master seed; the result is a pure function of (spec, n_values, samples,
// budgets, seed) regardless of thread count. Samples whose generation comes
// up empty are counted and skipped; records violating the
// t_hit <= t_cov <= 2 t_hit ln|V| guard (with 4 SE slack) are counted and
// dropped.
EnsembleStats run_ensemble(const FamilySpec& spec, const std::vector<int>& n_values,
                           int samples_per_n, const EstimatorBudgets& budgets,
                           std::uint64_t seed);

// Worst-case expected first-passage time read off a dense resistance table:
// h(x,y) = (volume * R(x,y) + S(y) - S(x)) / 2 with S(v) = sum_z mu_z R(z,v).
// Independent of the per-target linear-system route, hence cheap enough for
// a few hundred vertices.
struct MaxHitting {
    double t_hit = 0.0;
    int from = 0;
    int to = 0;
};
MaxHitting max_hitting_from_metric(const ResistanceMetric& m);

enum class Verdict { type1_consistent, type2_consistent, neither, inconclusive };
const char* verdict_name(Verdict v);

// Per n and per lambda: empirical frequency of the two ratio events
//   event 1:  1/lambda <= t_cov / (t_hit ln|V|) <= 2
//   event 2:  1 <= t_cov / t_hit <= lambda
// evaluated with 4 SE slack on both ends, so frequencies are monotone in
// lambda by interval nesting.
struct TypeReport {
    std::vector<double> lambda_grid;
    std::vector<int> n_values;
    std::vector<int> records_per_n;
    std::vector<std::vector<double>> type1_freq; // [n index][lambda index]
    std::vector<std::vector<double>> type2_freq;
    // Smallest grid lambda whose frequency reaches the threshold, per n;
    // +infinity when no grid value does.
    std::vector<double> lambda1_star;
    std::vector<double> lambda2_star;
    double threshold = 0.9;
    Verdict verdict = Verdict::inconclusive;
};

// Verdict rule: a side is "met" when some grid lambda reaches the threshold
// at the two largest n. One side met -> that verdict; neither -> neither.
// Both met (common at small scale, where a large lambda makes both events
// easy) breaks the tie by the trend of the per-n thresholds lambda*: the
// side whose lambda* stays flat while the other side's grows wins; no such
// asymmetry -> inconclusive.
TypeReport classify_type(const EnsembleStats& stats,
                         const std::vector<double>& lambda_grid = {2, 4, 8, 16, 32},
                         double threshold = 0.9);

enum class ScalingModel { power_in_n, per_level_geometric };
enum class FitQuantity { cover_time, cover_per_edge, resistance_diameter };

struct ScalingFit {
    ScalingModel model = ScalingModel::power_in_n;
    FitQuantity quantity = FitQuantity::cover_time;
    double exponent = 0.0; // log-log slope, or the per-level base e^slope
    double ci_lo = 0.0;    // bootstrap 95% percentile interval
    double ci_hi = 0.0;
    int bootstrap_replicas = 0;
    std::vector<int> n_values;
    std::vector<double> medians; // per n, of the fitted quantity
};

// Least squares of log(median) against log n (power model) or against n
// (geometric model; the base e^slope is returned). The CI resamples records
// within each n. Needs >= 3 n values with records.
ScalingFit fit_scaling_exponent(const EnsembleStats& stats, ScalingModel model,
                                FitQuantity quantity = FitQuantity::cover_time,
                                std::uint64_t seed = 1,
                                int bootstrap_replicas = 200);

// Quartiles of t_cov * scale at each n (scale_per_n aligned with n_values;
// empty means scale 1). The interquartile ratio q3/q1 is a dispersion
// summary for families whose normalized cover time stays spread out.
struct QuartileRow {
    int n = 0;
    int count = 0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double iqr_ratio = 0.0;
};
std::vector<QuartileRow> cover_quartiles(const EnsembleStats& stats,
                                         const std::vector<double>& scale_per_n = {});

} // namespace ctlab
