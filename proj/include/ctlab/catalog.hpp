#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ctlab/classifier.hpp"

namespace ctlab {

struct CatalogOptions {
    std::uint64_t master_seed = 20260822;
    int threads = 1;
    // Re-run the whole computation and require byte-identical serialization.
    // Doubles the runtime; the determinism row is marked not-evaluated when
    // disabled.
    bool verify_determinism = true;
    // Scales Monte Carlo replica counts down for smoke runs. Fixed tolerance
    // bands widen by 1/sqrt(scale) and every affected row is annotated; the
    // advertised tolerances only hold at scale 1.
    double replica_scale = 1.0;
};

struct Measure {
    std::string name;
    double value = 0.0;
    std::string unit;
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool required = true;
    bool pass = false;
    std::vector<Measure> measures;
    std::vector<std::string> notes;
};

struct CatalogOutput {
    CatalogOptions options;
    std::vector<CriterionResult> criteria; // ids 1..8 in order
    bool all_required_pass = false;
    // Relative path -> file bytes, ready for atomic_write_file. Contains the
    // JSON report, the criteria table, and per-family sample tables. No
    // clocks anywhere: identical seeds give identical bytes.
    std::map<std::string, std::string> files;
};

// One row of the suite, ids 1..7 (8 is the double-run comparison and only
// exists in run_catalog). Exposed so tests can exercise rows individually.
CriterionResult run_criterion(int id, const CatalogOptions& opt);

CatalogOutput run_catalog(const CatalogOptions& opt);

} // namespace ctlab
