#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ctlab/catalog.hpp"

namespace ctlab {

// Run configurations parsed from JSON files. Parsing is strict: unknown keys
// anywhere, keys that do not apply to the chosen family or offspring law, and
// wrongly typed values are all rejected up front, so a typo cannot silently
// fall back to a default.

struct GenConfig {
    FamilySpec family;
    int n = 0;
    int count = 1;
    std::optional<std::uint64_t> seed;
    int threads = 0; // 0 = unset; the driver resolves it
};

struct AnalyzeToggles {
    bool resistance = true;
    bool cover_exact = false;
    bool cover_mc = false;
    bool chaining = false;
    bool packing = false;
    bool gff = false;
};

struct AnalyzeConfig {
    std::string graph_path;
    AnalyzeToggles analyses;
    EstimatorBudgets budgets;
    int gff_replicas = 100000;
    std::optional<std::uint64_t> seed;
    int threads = 0;
};

struct ClassifyConfig {
    FamilySpec family;
    std::vector<int> n_values;
    int samples_per_n = 0;
    EstimatorBudgets budgets;
    std::vector<double> lambda_grid = {2, 4, 8, 16, 32};
    double threshold = 0.9;
    bool with_fit = false;
    ScalingModel fit_model = ScalingModel::power_in_n;
    FitQuantity fit_quantity = FitQuantity::cover_time;
    std::optional<std::uint64_t> seed;
    int threads = 0;
};

struct CatalogConfig {
    CatalogOptions options;
    int threads = 0;
};

// A family whose draw depends on the seed. Walk and field estimates are
// always stochastic; graph generation only for these.
bool family_is_stochastic(const FamilySpec& spec);

GenConfig parse_gen_config(const nlohmann::json& j);
AnalyzeConfig parse_analyze_config(const nlohmann::json& j);
ClassifyConfig parse_classify_config(const nlohmann::json& j);
CatalogConfig parse_catalog_config(const nlohmann::json& j);

// Each returns relative path -> file bytes; the caller writes them out.
// Configs must arrive with threads already resolved to >= 1.
std::map<std::string, std::string> execute_gen(const GenConfig& cfg);
std::map<std::string, std::string> execute_analyze(const AnalyzeConfig& cfg);
std::map<std::string, std::string> execute_classify(const ClassifyConfig& cfg);
std::map<std::string, std::string> execute_catalog(const CatalogConfig& cfg);

// 2 for contract violations (bad config, bad input, impossible request),
// 3 for exhausted budgets and numerical failures.
int exit_code_for(ErrorCode code);

} // namespace ctlab
