#include "ctlab/report.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "ctlab/errors.hpp"
#include "ctlab/summary.hpp"

namespace ctlab {

namespace fs = std::filesystem;
using nlohmann::json;

json num(double value, const char* unit) {
    json j;
    j["value"] = value;
    j["unit"] = unit;
    return j;
}

json num_int(std::int64_t value, const char* unit) {
    json j;
    j["value"] = value;
    j["unit"] = unit;
    return j;
}

json seed_field(std::uint64_t seed) {
    json j;
    j["value"] = seed;
    j["unit"] = "seed";
    return j;
}

json report_header(std::uint64_t master_seed) {
    json j;
    j["schema_version"] = kReportSchemaVersion;
    j["log_convention"] = "natural";
    j["master_seed"] = seed_field(master_seed);
    return j;
}

json family_spec_json(const FamilySpec& spec) {
    json j;
    j["kind"] = family_name(spec.family);
    if (spec.offspring) {
        json o;
        switch (spec.offspring->kind()) {
        case OffspringKind::poisson: o["kind"] = "poisson"; break;
        case OffspringKind::geometric: o["kind"] = "geometric"; break;
        case OffspringKind::binomial: o["kind"] = "binomial"; break;
        case OffspringKind::explicit_table: o["kind"] = "table"; break;
        case OffspringKind::power_tail: o["kind"] = "power_tail"; break;
        }
        o["mean"] = num(spec.offspring->mean(), "dimensionless");
        if (spec.offspring->kind() == OffspringKind::power_tail)
            o["tail_alpha"] = num(spec.offspring->tail_alpha(), "dimensionless");
        j["offspring"] = o;
    }
    if (spec.family == Family::er) {
        switch (spec.regime) {
        case ErRegime::supercritical_c_over_n: j["er_regime"] = "c_over_n"; break;
        case ErRegime::supercritical_f_over_n:
            j["er_regime"] = "f_over_n";
            // the slowly-growing degree function is a knob, not canonical
            j["er_f"] = "(log N)^2";
            break;
        case ErRegime::critical: j["er_regime"] = "critical"; break;
        }
        if (spec.regime == ErRegime::supercritical_c_over_n)
            j["er_c"] = num(spec.er_c, "dimensionless");
    }
    if (spec.family == Family::percolation_box) {
        j["dim"] = num_int(spec.dim, "count");
        j["perc_p"] = num(spec.perc_p, "dimensionless");
    }
    if (spec.family == Family::rw_range) j["dim"] = num_int(spec.dim, "count");
    if (spec.family == Family::sierpinski) {
        j["weight_lo"] = num(spec.weight_lo, "ohms");
        j["weight_hi"] = num(spec.weight_hi, "ohms");
    }
    if (spec.family == Family::barbell) j["pendants"] = num_int(spec.pendants, "count");
    return j;
}

json budgets_json(const EstimatorBudgets& b) {
    json j;
    j["cover_replicas"] = num_int(b.cover_replicas, "count");
    j["hitting_replicas"] = num_int(b.hitting_replicas, "count");
    j["step_cap"] = num_int((std::int64_t)b.step_cap, "steps");
    j["exact_cover_cap"] = num_int(b.exact_cover_cap, "vertices");
    j["metric_cap"] = num_int(b.metric_cap, "vertices");
    j["max_starts"] = num_int(b.max_starts, "count");
    json fr = json::array();
    for (double f : b.radius_fractions) fr.push_back(num(f, "dimensionless"));
    j["radius_fractions"] = fr;
    j["with_chaining"] = b.with_chaining;
    j["with_packing"] = b.with_packing;
    return j;
}

json stats_summary_json(const EnsembleStats& stats) {
    json j;
    j["family"] = family_spec_json(stats.spec);
    j["master_seed"] = seed_field(stats.master_seed);
    j["samples_per_n"] = num_int(stats.samples_per_n, "count");
    j["failed_samples"] = num_int(stats.failed_samples, "count");
    j["guard_violations"] = num_int(stats.guard_violations, "count");
    j["partial"] = stats.partial();
    j["budgets"] = budgets_json(stats.budgets);
    json per_n = json::array();
    for (int n : stats.n_values) {
        std::vector<double> cov, hit, diam;
        for (const SampleRecord& r : stats.records)
            if (r.n_param == n) {
                cov.push_back(r.t_cov);
                hit.push_back(r.t_hit);
                diam.push_back(r.diam_r);
            }
        json row;
        row["n"] = num_int(n, "count");
        row["records"] = num_int((std::int64_t)cov.size(), "count");
        if (!cov.empty()) {
            row["median_t_cov"] = num(median_of(cov), "steps");
            row["median_t_hit"] = num(median_of(hit), "steps");
            row["median_diam_r"] = num(median_of(diam), "ohms");
        }
        per_n.push_back(row);
    }
    j["per_n"] = per_n;
    return j;
}

json type_report_json(const TypeReport& rep) {
    json j;
    j["verdict"] = verdict_name(rep.verdict);
    j["threshold"] = num(rep.threshold, "dimensionless");
    json grid = json::array();
    for (double l : rep.lambda_grid) grid.push_back(num(l, "dimensionless"));
    j["lambda_grid"] = grid;
    json rows = json::array();
    for (std::size_t ri = 0; ri < rep.n_values.size(); ++ri) {
        json row;
        row["n"] = num_int(rep.n_values[ri], "count");
        row["records"] = num_int(rep.records_per_n[ri], "count");
        json f1 = json::array(), f2 = json::array();
        for (std::size_t li = 0; li < rep.lambda_grid.size(); ++li) {
            f1.push_back(num(rep.type1_freq[ri][li], "dimensionless"));
            f2.push_back(num(rep.type2_freq[ri][li], "dimensionless"));
        }
        row["type1_freq"] = f1;
        row["type2_freq"] = f2;
        // infinity is not a JSON number; an off-grid threshold reports null
        if (std::isfinite(rep.lambda1_star[ri]))
            row["lambda1_star"] = num(rep.lambda1_star[ri], "dimensionless");
        else
            row["lambda1_star"] = nullptr;
        if (std::isfinite(rep.lambda2_star[ri]))
            row["lambda2_star"] = num(rep.lambda2_star[ri], "dimensionless");
        else
            row["lambda2_star"] = nullptr;
        rows.push_back(row);
    }
    j["per_n"] = rows;
    return j;
}

json scaling_fit_json(const ScalingFit& fit) {
    json j;
    j["model"] = fit.model == ScalingModel::power_in_n ? "power_in_n"
                                                       : "per_level_geometric";
    switch (fit.quantity) {
    case FitQuantity::cover_time: j["quantity"] = "t_cov"; break;
    case FitQuantity::cover_per_edge: j["quantity"] = "t_cov_per_edge"; break;
    case FitQuantity::resistance_diameter: j["quantity"] = "diam_r"; break;
    }
    j["exponent"] = num(fit.exponent, "dimensionless");
    j["ci_lo"] = num(fit.ci_lo, "dimensionless");
    j["ci_hi"] = num(fit.ci_hi, "dimensionless");
    j["bootstrap_replicas"] = num_int(fit.bootstrap_replicas, "count");
    json rows = json::array();
    const char* unit = fit.quantity == FitQuantity::resistance_diameter ? "ohms" : "steps";
    for (std::size_t i = 0; i < fit.n_values.size(); ++i) {
        json row;
        row["n"] = num_int(fit.n_values[i], "count");
        row["median"] = num(fit.medians[i], unit);
        rows.push_back(row);
    }
    j["per_n"] = rows;
    return j;
}

json quartiles_json(const std::vector<QuartileRow>& rows) {
    json arr = json::array();
    for (const QuartileRow& r : rows) {
        json row;
        row["n"] = num_int(r.n, "count");
        row["count"] = num_int(r.count, "count");
        row["q1"] = num(r.q1, "steps");
        row["median"] = num(r.median, "steps");
        row["q3"] = num(r.q3, "steps");
        row["iqr_ratio"] = num(r.iqr_ratio, "dimensionless");
        arr.push_back(row);
    }
    return arr;
}

std::string stats_csv(const EnsembleStats& stats) {
    std::string out =
        "# units: n/sample/counts dimensionless, seeds opaque, volume ohms, "
        "diam_r ohms, t_hit/t_cov/ses steps, chaining sqrt-ohms, flags 0/1\n";
    out += "family,n,sample,graph_seed,walk_seed,vertices,edges,volume,diam_r,"
           "diam_exact,witness_from,witness_to,t_hit,t_hit_se,t_hit_exact,"
           "t_cov,t_cov_se,t_cov_exact,cover_replicas,cover_start,metric_done,"
           "chaining";
    for (std::size_t i = 0; i < stats.budgets.radius_fractions.size(); ++i)
        out += ",pack_r" + std::to_string(i);
    out += "\n";
    for (const SampleRecord& r : stats.records) {
        out += family_name(stats.spec.family);
        out += "," + std::to_string(r.n_param);
        out += "," + std::to_string(r.sample_index);
        out += "," + std::to_string(r.graph_seed);
        out += "," + std::to_string(r.walk_seed);
        out += "," + std::to_string(r.vertices);
        out += "," + std::to_string(r.edges);
        out += "," + format_double(r.volume);
        out += "," + format_double(r.diam_r);
        out += r.diam_exact ? ",1" : ",0";
        out += "," + std::to_string(r.witness_from);
        out += "," + std::to_string(r.witness_to);
        out += "," + format_double(r.t_hit);
        out += "," + format_double(r.t_hit_se);
        out += r.t_hit_exact ? ",1" : ",0";
        out += "," + format_double(r.t_cov);
        out += "," + format_double(r.t_cov_se);
        out += r.t_cov_exact ? ",1" : ",0";
        out += "," + std::to_string(r.cover_replicas);
        out += "," + std::to_string(r.cover_start);
        out += r.metric_done ? ",1" : ",0";
        out += ",";
        if (r.metric_done) out += format_double(r.chaining);
        for (std::size_t i = 0; i < stats.budgets.radius_fractions.size(); ++i) {
            out += ",";
            if (i < r.packing_counts.size())
                out += std::to_string(r.packing_counts[i]);
        }
        out += "\n";
    }
    return out;
}

std::string two_column_dat(const std::string& xlabel, const std::string& ylabel,
                           const std::vector<int>& xs, const std::vector<double>& ys) {
    require(xs.size() == ys.size(), ErrorCode::InvalidParameters,
            "column lengths differ");
    std::string out = "# " + xlabel + " " + ylabel + "\n";
    for (std::size_t i = 0; i < xs.size(); ++i)
        out += std::to_string(xs[i]) + " " + format_double(ys[i]) + "\n";
    return out;
}

std::string dump_report(const nlohmann::json& j) { return j.dump(2) + "\n"; }

void atomic_write_file(const std::string& path, const std::string& content) {
    fs::path target(path);
    std::error_code ec;
    if (target.has_parent_path()) {
        fs::create_directories(target.parent_path(), ec);
        require(!ec, ErrorCode::IoFailure,
                "cannot create directory " + target.parent_path().string());
    }
    fs::path tmp = target;
    tmp += ".partial";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        f.write(content.data(), (std::streamsize)content.size());
        f.flush();
        if (!f.good()) {
            f.close();
            fs::remove(tmp, ec);
            throw Error(ErrorCode::IoFailure, "short write to " + tmp.string());
        }
    }
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error(ErrorCode::IoFailure, "cannot move report into place at " + path);
    }
}

} // namespace ctlab
