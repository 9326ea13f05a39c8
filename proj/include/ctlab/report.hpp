#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "ctlab/classifier.hpp"

namespace ctlab {

inline constexpr int kReportSchemaVersion = 1;

// Every number in a JSON report is wrapped as {"value": v, "unit": u} so a
// consumer never has to guess scales. Seeds are integers with unit "seed";
// 64-bit values survive because the writer emits them as JSON integers, not
// doubles. Reports carry no clocks of any kind: two runs from one master
// seed must serialize to identical bytes.
nlohmann::json num(double value, const char* unit);
nlohmann::json num_int(std::int64_t value, const char* unit);
nlohmann::json seed_field(std::uint64_t seed);

// schema_version, log_convention ("natural"), master seed.
nlohmann::json report_header(std::uint64_t master_seed);

nlohmann::json family_spec_json(const FamilySpec& spec);
nlohmann::json budgets_json(const EstimatorBudgets& b);
nlohmann::json stats_summary_json(const EnsembleStats& stats);
nlohmann::json type_report_json(const TypeReport& rep);
nlohmann::json scaling_fit_json(const ScalingFit& fit);
nlohmann::json quartiles_json(const std::vector<QuartileRow>& rows);

// One row per sample. First line is a '#' units comment, second the header;
// booleans are 0/1, absent metric columns are empty cells, doubles use the
// shortest round-trip form.
std::string stats_csv(const EnsembleStats& stats);

// gnuplot-ready: "# xlabel ylabel" then one "x y" line per point.
std::string two_column_dat(const std::string& xlabel, const std::string& ylabel,
                           const std::vector<int>& xs, const std::vector<double>& ys);

// Stable serialization: 2-space indent, keys in sorted order, trailing
// newline.
std::string dump_report(const nlohmann::json& j);

// Write-to-temp in the target directory, then atomic rename. Parent
// directories are created. Throws IoFailure and cleans the temp up on any
// short write.
void atomic_write_file(const std::string& path, const std::string& content);

} // namespace ctlab
