#pragma once

#include <vector>

#include <Eigen/Dense>

#include "ctlab/graph.hpp"
#include "ctlab/resistance.hpp"

namespace ctlab {

// Expected hitting times of the discrete-time walk with p(x,y) = w_xy/mu_x.
struct HittingProfile {
    Eigen::MatrixXd h;  // h(x,y) = E^x(steps to reach y); diagonal zero
    double t_hit = 0.0; // max over ordered pairs
    int witness_x = 0;
    int witness_y = 0;
};

struct HittingOptions {
    int dense_cap = 2000;
    // When set, every target solve is cross-checked against the commute
    // identity h(x,y) + h(y,x) = volume * R(x,y) using this metric.
    const ResistanceMetric* commute_check = nullptr;
    double commute_tol = 1e-8; // relative
};

// Solves, per target y, the linear system (I - P_{-y}) h = 1 by dense LU
// with one iterative-refinement pass.
HittingProfile hitting_times(const WeightedGraph& g, const HittingOptions& opt = {});

// Exact expected cover times by state-space dynamic programming over
// (current vertex, visited set), masks processed in descending popcount and
// the within-mask coupling solved directly.
struct CoverExact {
    std::vector<double> per_start;  // E^x(cover) for each start x
    double t_cov = 0.0;             // max over starts
    int witness_start = 0;
};

CoverExact exact_cover_time(const WeightedGraph& g, int state_cap = 14);

// Upper bound t_hit * (ln n + 1); natural log.
double matthews_upper(double t_hit, int vertex_count);

// t_hit <= t_cov <= 2 * t_hit * ln n. The upper inequality degenerates at
// n = 2 (ln 2 < 1), so there the result is reported but not asserted.
struct SandwichResult {
    bool pass = false;
    bool asserted = false;      // false at n <= 2: margins are informational
    double lower_margin = 0.0;  // t_cov - t_hit
    double upper_margin = 0.0;  // 2 t_hit ln n - t_cov
};

SandwichResult sandwich_check(double t_cov, double t_hit, int vertex_count, double slack = 1e-9);

} // namespace ctlab
