#pragma once

#include <cstdint>
#include <vector>

#include "ctlab/resistance.hpp"

namespace ctlab {

// Dyadic scale sequence l_k = diam/2^k, truncated to 0 once it drops below
// the smallest positive pairwise resistance. scales.front() = diam,
// scales.back() = 0.
struct ScaleSequence {
    double diam = 0.0;
    std::vector<double> scales;

    int k0() const { return (int)scales.size() - 1; }
};

ScaleSequence dyadic_scales(const ResistanceMetric& m);

enum class NetMode { exact, greedy };
enum class NetKind { packing, covering };

struct NetResult {
    NetKind kind = NetKind::packing;
    NetMode mode = NetMode::exact;
    double radius = 0.0;
    int count = 0;
    std::vector<int> centers;

    // Greedy packing certifies a lower bound on the packing number; greedy
    // covering an upper bound on the covering number. Exact results are both.
    bool exact() const { return mode == NetMode::exact; }
};

struct NetOptions {
    int exact_cap = 60;                   // vertex budget for the exact solvers
    std::uint64_t node_budget = 50000000; // branch-and-bound node cap
};

// Max number of pairwise-disjoint closed r-balls (exact) or the size of the
// deterministic greedily built maximal packing (lower bound).
NetResult packing_number(const ResistanceMetric& m, double r, NetMode mode,
                         const NetOptions& opt = {});

// Min number of closed r-balls covering V (exact) or the size of the
// standard greedy cover (upper bound).
NetResult covering_number(const ResistanceMetric& m, double r, NetMode mode,
                          const NetOptions& opt = {});

// Sum over k = 1..k0 of sqrt(l_{k-1} * ln n_cov(l_k)); the final term uses
// n_cov(0) = |V| directly. Natural log. Zero for a single-point space.
double chaining_functional(const ResistanceMetric& m, const ScaleSequence& s, NetMode mode,
                           const NetOptions& opt = {});

// (min over distinct center pairs of sqrt(R)) * sqrt(ln #centers).
double sudakov_functional(const ResistanceMetric& m, const std::vector<int>& centers);

} // namespace ctlab
