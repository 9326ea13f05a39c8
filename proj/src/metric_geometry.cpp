#include "ctlab/metric_geometry.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace ctlab {

ScaleSequence dyadic_scales(const ResistanceMetric& m) {
    ScaleSequence s;
    if (m.vertex_count() < 2) {
        s.scales = {0.0};
        return s;
    }
    auto d = m.diameter();
    s.diam = d.value;
    if (s.diam <= 0.0) {
        s.scales = {0.0};
        return s;
    }
    double min_r = m.min_positive();
    double l = s.diam;
    s.scales.push_back(l);
    while (true) {
        l *= 0.5;
        if (l < min_r) {
            s.scales.push_back(0.0);
            break;
        }
        s.scales.push_back(l);
    }
    return s;
}

namespace {

// Ball bitmasks over <= 64 vertices for the exact solvers.
std::vector<std::uint64_t> ball_masks(const ResistanceMetric& m, double r) {
    int n = m.vertex_count();
    std::vector<std::uint64_t> b(n, 0);
    for (int v = 0; v < n; ++v)
        for (int u : m.ball(v, r)) b[v] |= 1ull << u;
    return b;
}

struct PackingSearch {
    // Candidates carry deduplicated ball masks; conflicts are precomputed.
    std::vector<std::uint64_t> conflict; // conflict[i]: candidate bits incompatible with i
    int count = 0;
    int best = 0;
    std::uint64_t best_set = 0;
    std::uint64_t nodes = 0, node_budget = 0;

    void dfs(std::uint64_t avail, int chosen, std::uint64_t set) {
        require(++nodes <= node_budget, ErrorCode::BudgetExceeded,
                "exact packing search exceeded its node budget");
        if (chosen > best) {
            best = chosen;
            best_set = set;
        }
        while (avail) {
            if (chosen + std::popcount(avail) <= best) return;
            int i = std::countr_zero(avail);
            avail &= avail - 1;
            dfs(avail & ~conflict[i], chosen + 1, set | (1ull << i));
        }
    }
};

struct CoverSearch {
    std::vector<std::uint64_t> sets;  // deduplicated ball masks
    std::uint64_t universe = 0;
    int best = 0;
    std::uint64_t best_pick = 0;
    int max_set_size = 1;
    std::uint64_t nodes = 0, node_budget = 0;

    void dfs(std::uint64_t uncovered, int chosen, std::uint64_t pick) {
        require(++nodes <= node_budget, ErrorCode::BudgetExceeded,
                "exact covering search exceeded its node budget");
        if (uncovered == 0) {
            if (chosen < best) {
                best = chosen;
                best_pick = pick;
            }
            return;
        }
        int need = (std::popcount(uncovered) + max_set_size - 1) / max_set_size;
        if (chosen + need >= best) return;
        // branch on the uncovered element with the fewest covering sets
        int elem = -1, fewest = 1 << 30;
        std::uint64_t rem = uncovered;
        while (rem) {
            int e = std::countr_zero(rem);
            rem &= rem - 1;
            int cnt = 0;
            for (std::size_t i = 0; i < sets.size(); ++i)
                if (sets[i] & (1ull << e)) ++cnt;
            if (cnt < fewest) {
                fewest = cnt;
                elem = e;
            }
        }
        for (std::size_t i = 0; i < sets.size(); ++i)
            if (sets[i] & (1ull << elem))
                dfs(uncovered & ~sets[i], chosen + 1, pick | (1ull << i));
    }
};

} // namespace

NetResult packing_number(const ResistanceMetric& m, double r, NetMode mode, const NetOptions& opt) {
    require(r >= 0.0, ErrorCode::InvalidParameters, "radius must be >= 0");
    int n = m.vertex_count();
    NetResult res;
    res.kind = NetKind::packing;
    res.mode = mode;
    res.radius = r;
    if (n == 1) {
        res.count = 1;
        res.centers = {0};
        return res;
    }

    if (mode == NetMode::greedy) {
        // maximal packing in ascending vertex order; certified lower bound
        std::vector<std::uint64_t> taken((n + 63) / 64, 0);
        for (int v = 0; v < n; ++v) {
            std::vector<int> ball = m.ball(v, r);
            bool free = true;
            for (int u : ball)
                if (taken[u / 64] & (1ull << (u % 64))) {
                    free = false;
                    break;
                }
            if (free) {
                for (int u : ball) taken[u / 64] |= 1ull << (u % 64);
                res.centers.push_back(v);
            }
        }
        res.count = (int)res.centers.size();
        return res;
    }

    require(n <= opt.exact_cap && n <= 64, ErrorCode::BudgetExceeded,
            "exact packing needs vertex count <= " + std::to_string(std::min(opt.exact_cap, 64)));
    std::vector<std::uint64_t> balls = ball_masks(m, r);
    // one candidate per distinct ball, smallest center id representative
    std::vector<int> rep;
    std::vector<std::uint64_t> cand;
    for (int v = 0; v < n; ++v) {
        bool dup = false;
        for (std::uint64_t c : cand)
            if (c == balls[v]) {
                dup = true;
                break;
            }
        if (!dup) {
            cand.push_back(balls[v]);
            rep.push_back(v);
        }
    }
    PackingSearch ps;
    ps.count = (int)cand.size();
    ps.node_budget = opt.node_budget;
    ps.conflict.assign(cand.size(), 0);
    for (std::size_t i = 0; i < cand.size(); ++i)
        for (std::size_t j = 0; j < cand.size(); ++j)
            if (i != j && (cand[i] & cand[j])) ps.conflict[i] |= 1ull << j;
    std::uint64_t all = cand.size() == 64 ? ~0ull : ((1ull << cand.size()) - 1);
    ps.dfs(all, 0, 0);
    res.count = ps.best;
    for (std::size_t i = 0; i < cand.size(); ++i)
        if (ps.best_set & (1ull << i)) res.centers.push_back(rep[i]);
    std::sort(res.centers.begin(), res.centers.end());
    return res;
}

NetResult covering_number(const ResistanceMetric& m, double r, NetMode mode, const NetOptions& opt) {
    require(r >= 0.0, ErrorCode::InvalidParameters, "radius must be >= 0");
    int n = m.vertex_count();
    NetResult res;
    res.kind = NetKind::covering;
    res.mode = mode;
    res.radius = r;
    if (n == 1) {
        res.count = 1;
        res.centers = {0};
        return res;
    }

    if (mode == NetMode::greedy) {
        std::vector<char> covered(n, 0);
        int left = n;
        while (left > 0) {
            int best_v = -1, best_gain = -1;
            for (int v = 0; v < n; ++v) {
                int gain = 0;
                for (int u : m.ball(v, r))
                    if (!covered[u]) ++gain;
                if (gain > best_gain) {
                    best_gain = gain;
                    best_v = v;
                }
            }
            require(best_gain > 0, ErrorCode::NumericalFailure, "greedy cover stalled");
            for (int u : m.ball(best_v, r))
                if (!covered[u]) {
                    covered[u] = 1;
                    --left;
                }
            res.centers.push_back(best_v);
        }
        res.count = (int)res.centers.size();
        return res;
    }

    require(n <= opt.exact_cap && n <= 64, ErrorCode::BudgetExceeded,
            "exact covering needs vertex count <= " + std::to_string(std::min(opt.exact_cap, 64)));
    std::vector<std::uint64_t> balls = ball_masks(m, r);
    std::vector<int> rep;
    std::vector<std::uint64_t> sets;
    for (int v = 0; v < n; ++v) {
        bool dom = false;
        for (std::uint64_t s : sets)
            if (s == balls[v]) {
                dom = true;
                break;
            }
        if (!dom) {
            sets.push_back(balls[v]);
            rep.push_back(v);
        }
    }
    CoverSearch cs;
    cs.sets = sets;
    cs.universe = n == 64 ? ~0ull : ((1ull << n) - 1);
    cs.node_budget = opt.node_budget;
    cs.best = n + 1;
    for (std::uint64_t s : sets) cs.max_set_size = std::max(cs.max_set_size, std::popcount(s));
    // greedy warm start tightens the bound
    {
        std::uint64_t uncovered = cs.universe;
        int picks = 0;
        while (uncovered) {
            int gain_best = -1;
            std::uint64_t pick_mask = 0;
            for (std::uint64_t s : sets) {
                int gain = std::popcount(s & uncovered);
                if (gain > gain_best) {
                    gain_best = gain;
                    pick_mask = s;
                }
            }
            uncovered &= ~pick_mask;
            ++picks;
        }
        cs.best = picks + 1;
    }
    cs.dfs(cs.universe, 0, 0);
    require(cs.best <= n, ErrorCode::NumericalFailure, "cover search found no cover");
    res.count = cs.best;
    for (std::size_t i = 0; i < sets.size(); ++i)
        if (cs.best_pick & (1ull << i)) res.centers.push_back(rep[i]);
    std::sort(res.centers.begin(), res.centers.end());
    return res;
}

double chaining_functional(const ResistanceMetric& m, const ScaleSequence& s, NetMode mode,
                           const NetOptions& opt) {
    int n = m.vertex_count();
    if (n < 2 || s.k0() < 1) return 0.0;
    double total = 0.0;
    for (int k = 1; k <= s.k0(); ++k) {
        double prev = s.scales[k - 1];
        double lk = s.scales[k];
        double count = (lk == 0.0) ? (double)n : (double)covering_number(m, lk, mode, opt).count;
        total += std::sqrt(prev * std::log(count));
    }
    return total;
}

double sudakov_functional(const ResistanceMetric& m, const std::vector<int>& centers) {
    require(centers.size() >= 2, ErrorCode::TooFewCenters,
            "need at least two centers, got " + std::to_string(centers.size()));
    for (std::size_t i = 0; i < centers.size(); ++i) {
        m.graph().check_vertex(centers[i], "center");
        for (std::size_t j = i + 1; j < centers.size(); ++j)
            require(centers[i] != centers[j], ErrorCode::InvalidParameters,
                    "duplicate center " + std::to_string(centers[i]));
    }
    double min_sqrt = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < centers.size(); ++i)
        for (std::size_t j = i + 1; j < centers.size(); ++j)
            min_sqrt = std::min(min_sqrt, std::sqrt(m(centers[i], centers[j])));
    return min_sqrt * std::sqrt(std::log((double)centers.size()));
}

} // namespace ctlab
