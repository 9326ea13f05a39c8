#include "ctlab/run_config.hpp"

#include <cstdio>
#include <optional>
#include <string>
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

using nlohmann::json;

namespace {

void check_keys(const json& j, const char* what, const std::vector<const char*>& allowed) {
    require(j.is_object(), ErrorCode::MalformedFile, std::string(what) + " must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* a : allowed) known = known || it.key() == a;
        require(known, ErrorCode::InvalidParameters,
                "unknown key '" + it.key() + "' in " + what);
    }
}

const json& need(const json& j, const char* key, const char* what) {
    require(j.contains(key), ErrorCode::InvalidParameters,
            std::string(what) + " needs key '" + key + "'");
    return j.at(key);
}

double as_double(const json& v, const std::string& name) {
    require(v.is_number(), ErrorCode::InvalidParameters, "'" + name + "' must be a number");
    return v.get<double>();
}

std::int64_t as_integer(const json& v, const std::string& name) {
    require(v.is_number_integer() || v.is_number_unsigned(), ErrorCode::InvalidParameters,
            "'" + name + "' must be an integer");
    return v.get<std::int64_t>();
}

int as_int(const json& v, const std::string& name) {
    std::int64_t x = as_integer(v, name);
    require(x >= INT32_MIN && x <= INT32_MAX, ErrorCode::InvalidParameters,
            "'" + name + "' is out of range");
    return (int)x;
}

int as_positive_int(const json& v, const std::string& name) {
    int x = as_int(v, name);
    require(x >= 1, ErrorCode::InvalidParameters, "'" + name + "' must be at least 1");
    return x;
}

std::uint64_t as_seed(const json& v, const std::string& name) {
    require(v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0),
            ErrorCode::InvalidParameters,
            "'" + name + "' must be a nonnegative integer");
    return v.get<std::uint64_t>();
}

bool as_bool(const json& v, const std::string& name) {
    require(v.is_boolean(), ErrorCode::InvalidParameters, "'" + name + "' must be true or false");
    return v.get<bool>();
}

std::string as_string(const json& v, const std::string& name) {
    require(v.is_string(), ErrorCode::InvalidParameters, "'" + name + "' must be a string");
    return v.get<std::string>();
}

OffspringSpec parse_offspring(const json& j) {
    require(j.is_object(), ErrorCode::MalformedFile, "offspring must be a JSON object");
    std::string kind = as_string(need(j, "kind", "offspring"), "offspring.kind");
    if (kind == "poisson") {
        check_keys(j, "offspring", {"kind", "mean"});
        return OffspringSpec::poisson(as_double(need(j, "mean", "offspring"), "offspring.mean"));
    }
    if (kind == "geometric") {
        check_keys(j, "offspring", {"kind", "p"});
        return OffspringSpec::geometric(as_double(need(j, "p", "offspring"), "offspring.p"));
    }
    if (kind == "binomial") {
        check_keys(j, "offspring", {"kind", "n", "p"});
        return OffspringSpec::binomial(as_int(need(j, "n", "offspring"), "offspring.n"),
                                       as_double(need(j, "p", "offspring"), "offspring.p"));
    }
    if (kind == "table") {
        check_keys(j, "offspring", {"kind", "probs"});
        const json& ps = need(j, "probs", "offspring");
        require(ps.is_array() && !ps.empty(), ErrorCode::InvalidParameters,
                "'offspring.probs' must be a nonempty array");
        std::vector<double> probs;
        for (const json& p : ps) probs.push_back(as_double(p, "offspring.probs[]"));
        return OffspringSpec::explicit_table(std::move(probs));
    }
    if (kind == "power_tail") {
        check_keys(j, "offspring", {"kind", "alpha", "cutoff"});
        return OffspringSpec::power_tail(
            as_double(need(j, "alpha", "offspring"), "offspring.alpha"),
            as_positive_int(need(j, "cutoff", "offspring"), "offspring.cutoff"));
    }
    fail(ErrorCode::InvalidParameters, "unknown offspring kind: " + kind);
}

FamilySpec parse_family(const json& j) {
    require(j.is_object(), ErrorCode::MalformedFile, "family must be a JSON object");
    FamilySpec spec;
    spec.family = family_from_name(as_string(need(j, "kind", "family"), "family.kind"));
    switch (spec.family) {
    case Family::gw_supercritical:
    case Family::iic_kesten:
        check_keys(j, "family", {"kind", "offspring"});
        spec.offspring = parse_offspring(need(j, "offspring", "family"));
        break;
    case Family::er: {
        check_keys(j, "family", {"kind", "er_regime", "er_c"});
        if (j.contains("er_regime")) {
            std::string r = as_string(j.at("er_regime"), "family.er_regime");
            if (r == "c_over_n") spec.regime = ErRegime::supercritical_c_over_n;
            else if (r == "f_over_n") spec.regime = ErRegime::supercritical_f_over_n;
            else if (r == "critical") spec.regime = ErRegime::critical;
            else fail(ErrorCode::InvalidParameters, "unknown er_regime: " + r);
        }
        if (j.contains("er_c")) {
            require(spec.regime == ErRegime::supercritical_c_over_n, ErrorCode::InvalidParameters,
                    "'er_c' only applies to the c_over_n regime");
            spec.er_c = as_double(j.at("er_c"), "family.er_c");
        }
        break;
    }
    case Family::percolation_box:
        check_keys(j, "family", {"kind", "dim", "perc_p"});
        if (j.contains("dim")) spec.dim = as_int(j.at("dim"), "family.dim");
        if (j.contains("perc_p")) spec.perc_p = as_double(j.at("perc_p"), "family.perc_p");
        break;
    case Family::rw_range:
        check_keys(j, "family", {"kind", "dim"});
        spec.dim = as_int(need(j, "dim", "family"), "family.dim");
        break;
    case Family::sierpinski:
        check_keys(j, "family", {"kind", "weight_lo", "weight_hi"});
        if (j.contains("weight_lo")) spec.weight_lo = as_double(j.at("weight_lo"), "family.weight_lo");
        if (j.contains("weight_hi")) spec.weight_hi = as_double(j.at("weight_hi"), "family.weight_hi");
        break;
    case Family::barbell:
        check_keys(j, "family", {"kind", "pendants"});
        if (j.contains("pendants")) spec.pendants = as_int(j.at("pendants"), "family.pendants");
        break;
    case Family::cycle:
    case Family::complete:
        check_keys(j, "family", {"kind"});
        break;
    }
    return spec;
}

void parse_budgets(const json& j, EstimatorBudgets& b) {
    check_keys(j, "budgets",
               {"cover_replicas", "hitting_replicas", "step_cap", "exact_cover_cap",
                "metric_cap", "max_starts", "with_chaining", "with_packing",
                "radius_fractions"});
    if (j.contains("cover_replicas"))
        b.cover_replicas = as_positive_int(j.at("cover_replicas"), "budgets.cover_replicas");
    if (j.contains("hitting_replicas"))
        b.hitting_replicas = as_positive_int(j.at("hitting_replicas"), "budgets.hitting_replicas");
    if (j.contains("step_cap")) {
        std::int64_t cap = as_integer(j.at("step_cap"), "budgets.step_cap");
        require(cap >= 1, ErrorCode::InvalidParameters, "'budgets.step_cap' must be at least 1");
        b.step_cap = (std::uint64_t)cap;
    }
    if (j.contains("exact_cover_cap"))
        b.exact_cover_cap = as_positive_int(j.at("exact_cover_cap"), "budgets.exact_cover_cap");
    if (j.contains("metric_cap"))
        b.metric_cap = as_positive_int(j.at("metric_cap"), "budgets.metric_cap");
    if (j.contains("max_starts"))
        b.max_starts = as_positive_int(j.at("max_starts"), "budgets.max_starts");
    if (j.contains("with_chaining"))
        b.with_chaining = as_bool(j.at("with_chaining"), "budgets.with_chaining");
    if (j.contains("with_packing"))
        b.with_packing = as_bool(j.at("with_packing"), "budgets.with_packing");
    if (j.contains("radius_fractions")) {
        const json& fr = j.at("radius_fractions");
        require(fr.is_array(), ErrorCode::InvalidParameters,
                "'budgets.radius_fractions' must be an array");
        b.radius_fractions.clear();
        for (const json& f : fr) {
            double v = as_double(f, "budgets.radius_fractions[]");
            require(v > 0, ErrorCode::InvalidParameters,
                    "'budgets.radius_fractions' entries must be positive");
            b.radius_fractions.push_back(v);
        }
    }
}

std::optional<std::uint64_t> parse_seed(const json& j) {
    if (!j.contains("seed")) return std::nullopt;
    return as_seed(j.at("seed"), "seed");
}

int parse_threads(const json& j) {
    if (!j.contains("threads")) return 0;
    return as_positive_int(j.at("threads"), "threads");
}

} // namespace

bool family_is_stochastic(const FamilySpec& spec) {
    switch (spec.family) {
    case Family::cycle:
    case Family::complete:
    case Family::barbell:
        return false;
    case Family::sierpinski:
        return spec.weight_lo != spec.weight_hi;
    default:
        return true;
    }
}

GenConfig parse_gen_config(const json& j) {
    check_keys(j, "gen config", {"family", "n", "count", "seed", "threads"});
    GenConfig c;
    c.family = parse_family(need(j, "family", "gen config"));
    c.n = as_positive_int(need(j, "n", "gen config"), "n");
    if (j.contains("count")) {
        c.count = as_positive_int(j.at("count"), "count");
        require(c.count <= 10000, ErrorCode::InvalidParameters, "'count' is capped at 10000");
    }
    c.seed = parse_seed(j);
    c.threads = parse_threads(j);
    if (family_is_stochastic(c.family))
        require(c.seed.has_value(), ErrorCode::InvalidParameters,
                std::string("family '") + family_name(c.family.family) +
                    "' draws random graphs; provide a seed");
    return c;
}

AnalyzeConfig parse_analyze_config(const json& j) {
    check_keys(j, "analyze config",
               {"graph", "analyses", "budgets", "gff_replicas", "seed", "threads"});
    AnalyzeConfig c;
    c.graph_path = as_string(need(j, "graph", "analyze config"), "graph");
    if (j.contains("analyses")) {
        const json& a = j.at("analyses");
        check_keys(a, "analyses",
                   {"resistance", "cover_exact", "cover_mc", "chaining", "packing", "gff"});
        if (a.contains("resistance")) c.analyses.resistance = as_bool(a.at("resistance"), "analyses.resistance");
        if (a.contains("cover_exact")) c.analyses.cover_exact = as_bool(a.at("cover_exact"), "analyses.cover_exact");
        if (a.contains("cover_mc")) c.analyses.cover_mc = as_bool(a.at("cover_mc"), "analyses.cover_mc");
        if (a.contains("chaining")) c.analyses.chaining = as_bool(a.at("chaining"), "analyses.chaining");
        if (a.contains("packing")) c.analyses.packing = as_bool(a.at("packing"), "analyses.packing");
        if (a.contains("gff")) c.analyses.gff = as_bool(a.at("gff"), "analyses.gff");
    }
    if (j.contains("budgets")) parse_budgets(j.at("budgets"), c.budgets);
    if (j.contains("gff_replicas")) {
        c.gff_replicas = as_positive_int(j.at("gff_replicas"), "gff_replicas");
        require(c.gff_replicas >= 2, ErrorCode::InvalidParameters,
                "'gff_replicas' must be at least 2");
    }
    c.seed = parse_seed(j);
    c.threads = parse_threads(j);
    if (c.analyses.cover_mc || c.analyses.gff)
        require(c.seed.has_value(), ErrorCode::InvalidParameters,
                "cover_mc and gff sample randomly; provide a seed");
    return c;
}

ClassifyConfig parse_classify_config(const json& j) {
    check_keys(j, "classify config",
               {"family", "n_values", "samples_per_n", "budgets", "lambda_grid",
                "threshold", "fit", "seed", "threads"});
    ClassifyConfig c;
    c.family = parse_family(need(j, "family", "classify config"));
    const json& ns = need(j, "n_values", "classify config");
    require(ns.is_array() && !ns.empty(), ErrorCode::InvalidParameters,
            "'n_values' must be a nonempty array");
    for (const json& n : ns) c.n_values.push_back(as_positive_int(n, "n_values[]"));
    c.samples_per_n = as_positive_int(need(j, "samples_per_n", "classify config"),
                                      "samples_per_n");
    if (j.contains("budgets")) parse_budgets(j.at("budgets"), c.budgets);
    if (j.contains("lambda_grid")) {
        const json& grid = j.at("lambda_grid");
        require(grid.is_array() && !grid.empty(), ErrorCode::InvalidParameters,
                "'lambda_grid' must be a nonempty array");
        c.lambda_grid.clear();
        for (const json& l : grid) c.lambda_grid.push_back(as_double(l, "lambda_grid[]"));
    }
    if (j.contains("threshold")) {
        c.threshold = as_double(j.at("threshold"), "threshold");
        require(c.threshold > 0 && c.threshold <= 1, ErrorCode::InvalidParameters,
                "'threshold' must lie in (0, 1]");
    }
    if (j.contains("fit")) {
        const json& f = j.at("fit");
        check_keys(f, "fit", {"model", "quantity"});
        c.with_fit = true;
        if (f.contains("model")) {
            std::string m = as_string(f.at("model"), "fit.model");
            if (m == "power_in_n") c.fit_model = ScalingModel::power_in_n;
            else if (m == "per_level_geometric") c.fit_model = ScalingModel::per_level_geometric;
            else fail(ErrorCode::InvalidParameters, "unknown fit model: " + m);
        }
        if (f.contains("quantity")) {
            std::string q = as_string(f.at("quantity"), "fit.quantity");
            if (q == "t_cov") c.fit_quantity = FitQuantity::cover_time;
            else if (q == "t_cov_per_edge") c.fit_quantity = FitQuantity::cover_per_edge;
            else if (q == "diam_r") c.fit_quantity = FitQuantity::resistance_diameter;
            else fail(ErrorCode::InvalidParameters, "unknown fit quantity: " + q);
        }
    }
    c.seed = parse_seed(j);
    c.threads = parse_threads(j);
    require(c.seed.has_value(), ErrorCode::InvalidParameters,
            "classification is always stochastic; provide a seed");
    return c;
}

CatalogConfig parse_catalog_config(const json& j) {
    check_keys(j, "catalog config",
               {"master_seed", "replica_scale", "verify_determinism", "threads"});
    CatalogConfig c;
    if (j.contains("master_seed"))
        c.options.master_seed = as_seed(j.at("master_seed"), "master_seed");
    if (j.contains("replica_scale")) {
        c.options.replica_scale = as_double(j.at("replica_scale"), "replica_scale");
        require(c.options.replica_scale > 0, ErrorCode::InvalidParameters,
                "'replica_scale' must be positive");
    }
    if (j.contains("verify_determinism"))
        c.options.verify_determinism = as_bool(j.at("verify_determinism"), "verify_determinism");
    c.threads = parse_threads(j);
    return c;
}

std::map<std::string, std::string> execute_gen(const GenConfig& cfg) {
    std::map<std::string, std::string> files;
    json manifest = report_header(cfg.seed.value_or(0));
    if (!cfg.seed) manifest.erase("master_seed");
    manifest["command"] = "gen";
    manifest["family"] = family_spec_json(cfg.family);
    manifest["n"] = num_int(cfg.n, "count");
    json rows = json::array();
    for (int i = 0; i < cfg.count; ++i) {
        std::uint64_t gseed = cfg.seed ? mix_seed(*cfg.seed, {(std::uint64_t)i}) : 0;
        WeightedGraph g = generate(cfg.family, cfg.n, gseed);
        char name[32];
        std::snprintf(name, sizeof name, "graph_%03d.wgr", i);
        files[name] = format_graph(g);
        json row;
        row["file"] = name;
        if (cfg.seed) row["seed"] = seed_field(gseed);
        row["vertices"] = num_int(g.vertex_count(), "vertices");
        row["edges"] = num_int((std::int64_t)g.edge_count(), "edges");
        row["volume"] = num(g.volume(), "ohms");
        rows.push_back(row);
    }
    manifest["graphs"] = rows;
    files["manifest.json"] = dump_report(manifest);
    return files;
}

std::map<std::string, std::string> execute_analyze(const AnalyzeConfig& cfg) {
    WeightedGraph g = read_graph(cfg.graph_path);
    const int n = g.vertex_count();
    const EstimatorBudgets& b = cfg.budgets;

    json rep = report_header(cfg.seed.value_or(0));
    if (!cfg.seed) rep.erase("master_seed");
    rep["command"] = "analyze";
    {
        json gj;
        gj["source"] = cfg.graph_path;
        gj["vertices"] = num_int(n, "vertices");
        gj["edges"] = num_int((std::int64_t)g.edge_count(), "edges");
        gj["volume"] = num(g.volume(), "ohms");
        rep["graph"] = gj;
    }

    std::optional<ResistanceMetric> metric;
    int witness_a = -1, witness_b = -1;
    if (cfg.analyses.resistance) {
        json rj;
        if (n <= b.metric_cap) {
            metric.emplace(ResistanceMetric::dense(g));
            ResistanceMetric::Diameter d = metric->diameter();
            witness_a = d.x;
            witness_b = d.y;
            rj["exact"] = true;
            rj["diam_r"] = num(d.value, "ohms");
            if (n >= 2) rj["min_positive"] = num(metric->min_positive(), "ohms");
            MaxHitting mh = max_hitting_from_metric(*metric);
            json hj;
            hj["exact"] = true;
            hj["t_hit"] = num(mh.t_hit, "steps");
            hj["from"] = mh.from;
            hj["to"] = mh.to;
            rep["hitting"] = hj;
        } else if (g.is_tree()) {
            ResistanceMetric::Diameter d = tree_resistance_diameter(g);
            witness_a = d.x;
            witness_b = d.y;
            rj["exact"] = true;
            rj["diam_r"] = num(d.value, "ohms");
        } else {
            std::pair<int, int> ends = bfs_double_sweep(g);
            ResistanceMetric pp = ResistanceMetric::per_pair(g);
            witness_a = ends.first;
            witness_b = ends.second;
            rj["exact"] = false;
            rj["diam_lower_bound"] = num(pp(ends.first, ends.second), "ohms");
        }
        rj["witness_from"] = witness_a;
        rj["witness_to"] = witness_b;
        rep["resistance"] = rj;
    }

    double t_cov_known = -1.0;
    const char* t_cov_source = "";
    if (cfg.analyses.cover_exact) {
        require(n <= b.exact_cover_cap, ErrorCode::InvalidParameters,
                "cover_exact handles at most exact_cover_cap = " +
                    std::to_string(b.exact_cover_cap) + " vertices, got " + std::to_string(n));
        CoverExact ce = exact_cover_time(g, b.exact_cover_cap);
        json cj;
        cj["exact"] = true;
        cj["t_cov"] = num(ce.t_cov, "steps");
        cj["witness_start"] = ce.witness_start;
        rep["cover_exact"] = cj;
        t_cov_known = ce.t_cov;
        t_cov_source = "exact";
    }
    if (cfg.analyses.cover_mc) {
        WalkOptions wopt;
        wopt.step_cap = b.step_cap;
        wopt.threads = cfg.threads;
        std::vector<int> extras;
        if (witness_a >= 0) extras = {witness_a, witness_b};
        std::vector<int> starts = heuristic_start_set(g, extras);
        if ((int)starts.size() > b.max_starts) starts.resize((std::size_t)b.max_starts);
        CoverEstimate est = estimate_cover_time(g, StartPolicy::worst_of_set(starts),
                                                b.cover_replicas,
                                                mix_seed(cfg.seed.value_or(0), {1}), wopt);
        json cj;
        cj["exact"] = false;
        cj["t_cov"] = num(est.mean, "steps");
        cj["se"] = num(est.se, "steps");
        cj["replicas"] = num_int(est.replicas, "count");
        cj["start_used"] = est.start_used;
        json ss = json::array();
        for (int s : est.starts) ss.push_back(s);
        cj["starts"] = ss;
        rep["cover_mc"] = cj;
        if (t_cov_known < 0) {
            t_cov_known = est.mean;
            t_cov_source = "mc";
        }
    }

    if (cfg.analyses.chaining || cfg.analyses.packing || cfg.analyses.gff)
        require(metric.has_value(), ErrorCode::InvalidParameters,
                "chaining, packing, and gff need the dense resistance table; "
                "enable resistance and keep the graph under metric_cap");

    if (cfg.analyses.chaining) {
        ScaleSequence s = dyadic_scales(*metric);
        json ch;
        ch["value"] = num(chaining_functional(*metric, s, NetMode::greedy), "sqrt-ohms");
        ch["scales"] = num_int((std::int64_t)s.scales.size(), "count");
        rep["chaining"] = ch;
    }
    if (cfg.analyses.packing) {
        double diam = metric->diameter().value;
        json rows = json::array();
        for (double f : b.radius_fractions) {
            NetResult nr = packing_number(*metric, f * diam, NetMode::greedy);
            json row;
            row["radius_fraction"] = num(f, "dimensionless");
            row["radius"] = num(f * diam, "ohms");
            row["count"] = num_int(nr.count, "count");
            rows.push_back(row);
        }
        rep["packing"] = rows;
    }
    if (cfg.analyses.gff) {
        GffOptions go;
        go.threads = cfg.threads;
        GffModel model = GffModel::build(green_kernel(*metric, witness_a), go);
        ScalarEstimate e = estimate_expected_max(model, cfg.gff_replicas,
                                                 mix_seed(cfg.seed.value_or(0), {2}), go);
        json fj;
        fj["root"] = model.root();
        fj["rank"] = num_int(model.rank(), "count");
        fj["expected_max"] = num(e.mean, "sqrt-ohms");
        fj["se"] = num(e.se, "sqrt-ohms");
        fj["replicas"] = num_int(e.replicas, "count");
        if (t_cov_known >= 0) {
            fj["dlp_ratio"] = num(dlp_ratio(g, t_cov_known, e.mean), "dimensionless");
            fj["t_cov_source"] = t_cov_source;
        }
        rep["gff"] = fj;
    }

    std::map<std::string, std::string> files;
    files["analyze_report.json"] = dump_report(rep);
    return files;
}

std::map<std::string, std::string> execute_classify(const ClassifyConfig& cfg) {
    EstimatorBudgets budgets = cfg.budgets;
    budgets.threads = cfg.threads;
    EnsembleStats st = run_ensemble(cfg.family, cfg.n_values, cfg.samples_per_n,
                                    budgets, cfg.seed.value_or(0));
    TypeReport tr = classify_type(st, cfg.lambda_grid, cfg.threshold);

    json rep = report_header(cfg.seed.value_or(0));
    rep["command"] = "classify";
    rep["summary"] = stats_summary_json(st);
    rep["type_report"] = type_report_json(tr);
    if (cfg.with_fit) {
        ScalingFit fit = fit_scaling_exponent(st, cfg.fit_model, cfg.fit_quantity,
                                              mix_seed(cfg.seed.value_or(0), {1009}));
        rep["scaling_fit"] = scaling_fit_json(fit);
    }

    std::vector<int> ns;
    std::vector<double> meds;
    for (int n : st.n_values) {
        std::vector<double> cov;
        for (const SampleRecord& r : st.records)
            if (r.n_param == n) cov.push_back(r.t_cov);
        if (!cov.empty()) {
            ns.push_back(n);
            meds.push_back(median_of(cov));
        }
    }

    std::map<std::string, std::string> files;
    files["classify_report.json"] = dump_report(rep);
    files["ensemble_stats.csv"] = stats_csv(st);
    files["medians.dat"] = two_column_dat("n", "median_cover_steps", ns, meds);
    return files;
}

std::map<std::string, std::string> execute_catalog(const CatalogConfig& cfg) {
    CatalogOptions opt = cfg.options;
    opt.threads = cfg.threads;
    return run_catalog(opt).files;
}

int exit_code_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::RejectionBudgetExceeded:
    case ErrorCode::BudgetExceeded:
    case ErrorCode::NumericalFailure:
    case ErrorCode::StepBudgetExceeded:
        return 3;
    default:
        return 2;
    }
}

} // namespace ctlab
