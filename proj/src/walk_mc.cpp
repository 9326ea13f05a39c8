#include "ctlab/walk_mc.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "ctlab/parallel.hpp"
#include "ctlab/summary.hpp"

namespace ctlab {

WalkTable::WalkTable(const WeightedGraph& g) {
    n_ = g.vertex_count();
    m_ = g.edge_count();
    tree_ = g.is_tree();
    offset_.assign((std::size_t)n_ + 1, 0);
    std::size_t arcs = 0;
    for (int v = 0; v < n_; ++v) {
        offset_[(std::size_t)v] = arcs;
        arcs += (std::size_t)g.degree(v);
    }
    offset_[(std::size_t)n_] = arcs;
    nbr_.resize(arcs);
    uniform_.assign((std::size_t)n_, 1);
    cell_.resize(arcs);
    std::vector<double> scaled;
    std::vector<int> small, large;
    for (int v = 0; v < n_; ++v) {
        auto nb = g.neighbors(v);
        auto wt = g.neighbor_weights(v);
        std::size_t base = offset_[(std::size_t)v];
        int deg = (int)nb.size();
        for (int i = 0; i < deg; ++i) nbr_[base + (std::size_t)i] = nb[(std::size_t)i];
        bool flat = true;
        for (int i = 1; i < deg; ++i)
            if (wt[(std::size_t)i] != wt[0]) flat = false;
        if (flat) continue;
        uniform_[(std::size_t)v] = 0;
        // Vose alias construction over the outgoing probabilities
        double total = 0.0;
        for (int i = 0; i < deg; ++i) total += wt[(std::size_t)i];
        scaled.assign((std::size_t)deg, 0.0);
        small.clear();
        large.clear();
        for (int i = 0; i < deg; ++i) {
            scaled[(std::size_t)i] = wt[(std::size_t)i] * deg / total;
            (scaled[(std::size_t)i] < 1.0 ? small : large).push_back(i);
        }
        while (!small.empty() && !large.empty()) {
            int s = small.back();
            small.pop_back();
            int l = large.back();
            large.pop_back();
            cell_[base + (std::size_t)s] = {scaled[(std::size_t)s],
                                            nb[(std::size_t)l]};
            scaled[(std::size_t)l] -= 1.0 - scaled[(std::size_t)s];
            (scaled[(std::size_t)l] < 1.0 ? small : large).push_back(l);
        }
        for (int i : small) cell_[base + (std::size_t)i] = {1.0, nb[(std::size_t)i]};
        for (int i : large) cell_[base + (std::size_t)i] = {1.0, nb[(std::size_t)i]};
    }
}

int WalkTable::hop_eccentricity(int start) const {
    std::vector<int> dist((std::size_t)n_, -1);
    std::queue<int> q;
    dist[(std::size_t)start] = 0;
    q.push(start);
    int ecc = 0;
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        ecc = std::max(ecc, dist[(std::size_t)v]);
        for (std::size_t a = offset_[(std::size_t)v]; a < offset_[(std::size_t)v + 1]; ++a) {
            int u = nbr_[a];
            if (dist[(std::size_t)u] < 0) {
                dist[(std::size_t)u] = dist[(std::size_t)v] + 1;
                q.push(u);
            }
        }
    }
    return ecc;
}

namespace {

std::uint64_t run_cover(const WalkTable& t, int start, Rng& rng,
                        std::uint64_t cap, std::uint64_t floor_steps) {
    int n = t.vertex_count();
    if (n == 1) return 0;
    std::vector<std::uint64_t> visited(((std::size_t)n + 63) / 64, 0);
    visited[(std::size_t)start >> 6] |= 1ULL << (start & 63);
    int remaining = n - 1;
    std::uint64_t steps = 0;
    int cur = start;
    while (remaining > 0) {
        require(steps < cap, ErrorCode::StepBudgetExceeded,
                "cover walk exceeded " + std::to_string(cap) + " steps");
        cur = t.step(cur, rng);
        ++steps;
        std::uint64_t bit = 1ULL << (cur & 63);
        if (!(visited[(std::size_t)cur >> 6] & bit)) {
            visited[(std::size_t)cur >> 6] |= bit;
            --remaining;
        }
    }
    require(steps >= floor_steps, ErrorCode::NumericalFailure,
            "tree cover run shorter than the 2m - ecc floor");
    return steps;
}

void check_start(const WalkTable& t, int v, const char* what) {
    require(v >= 0 && v < t.vertex_count(), ErrorCode::InvalidVertex,
            std::string(what) + " id " + std::to_string(v) + " outside [0," +
                std::to_string(t.vertex_count()) + ")");
}

} // namespace

std::uint64_t simulate_cover_once(const WalkTable& t, int start, Rng& rng,
                                  const WalkOptions& opt) {
    check_start(t, start, "start vertex");
    std::uint64_t floor_steps =
        t.tree() ? 2 * t.edge_count() - (std::uint64_t)t.hop_eccentricity(start)
                 : 0;
    return run_cover(t, start, rng, opt.step_cap, floor_steps);
}

std::uint64_t simulate_cover_once(const WeightedGraph& g, int start, Rng& rng,
                                  const WalkOptions& opt) {
    return simulate_cover_once(WalkTable(g), start, rng, opt);
}

std::uint64_t simulate_hitting_once(const WalkTable& t, int x, int y, Rng& rng,
                                    const WalkOptions& opt) {
    check_start(t, x, "source vertex");
    check_start(t, y, "target vertex");
    require(x != y, ErrorCode::InvalidParameters,
            "hitting time needs distinct source and target");
    std::uint64_t steps = 0;
    int cur = x;
    while (cur != y) {
        require(steps < opt.step_cap, ErrorCode::StepBudgetExceeded,
                "hitting walk exceeded " + std::to_string(opt.step_cap) +
                    " steps");
        cur = t.step(cur, rng);
        ++steps;
    }
    return steps;
}

CoverEstimate estimate_cover_time(const WeightedGraph& g,
                                  const StartPolicy& policy, int replicas,
                                  std::uint64_t seed, const WalkOptions& opt) {
    require(replicas >= 2, ErrorCode::InvalidParameters,
            "need at least 2 replicas for a standard error");
    require(!policy.starts.empty(), ErrorCode::InvalidParameters,
            "start policy has no vertices");
    std::vector<int> starts;
    for (int v : policy.starts) {
        g.check_vertex(v, "start vertex");
        if (std::find(starts.begin(), starts.end(), v) == starts.end())
            starts.push_back(v);
    }
    if (policy.kind == StartPolicyKind::fixed)
        require(starts.size() == 1, ErrorCode::InvalidParameters,
                "fixed start policy takes exactly one vertex");

    WalkTable table(g);
    CoverEstimate est;
    est.replicas = replicas;
    est.policy = policy.kind;
    est.starts = starts;
    est.seed = seed;
    std::vector<double> samples((std::size_t)replicas);
    for (int s : starts) {
        std::uint64_t floor_steps =
            table.tree()
                ? 2 * table.edge_count() - (std::uint64_t)table.hop_eccentricity(s)
                : 0;
        parallel_for(replicas, opt.threads, [&](int r) {
            Rng rng(mix_seed(seed, {(std::uint64_t)s, (std::uint64_t)r}));
            samples[(std::size_t)r] = (double)run_cover(table, s, rng,
                                                        opt.step_cap, floor_steps);
        });
        MeanSe ms = mean_and_se(samples);
        est.per_start_means.push_back(ms.mean);
        est.per_start_ses.push_back(ms.se);
        if (est.start_used < 0 || ms.mean > est.mean) {
            est.mean = ms.mean;
            est.se = ms.se;
            est.start_used = s;
        }
    }
    return est;
}

CoverEstimate estimate_hitting(const WeightedGraph& g, int x, int y,
                               int replicas, std::uint64_t seed,
                               const WalkOptions& opt) {
    require(replicas >= 2, ErrorCode::InvalidParameters,
            "need at least 2 replicas for a standard error");
    g.check_vertex(x, "source vertex");
    g.check_vertex(y, "target vertex");
    require(x != y, ErrorCode::InvalidParameters,
            "hitting time needs distinct source and target");
    WalkTable table(g);
    std::vector<double> samples((std::size_t)replicas);
    parallel_for(replicas, opt.threads, [&](int r) {
        Rng rng(mix_seed(seed, {(std::uint64_t)x, (std::uint64_t)y,
                                (std::uint64_t)r}));
        samples[(std::size_t)r] =
            (double)simulate_hitting_once(table, x, y, rng, opt);
    });
    CoverEstimate est;
    est.replicas = replicas;
    est.policy = StartPolicyKind::fixed;
    est.starts = {x};
    est.start_used = x;
    est.seed = seed;
    MeanSe ms = mean_and_se(samples);
    est.mean = ms.mean;
    est.se = ms.se;
    est.per_start_means = {est.mean};
    est.per_start_ses = {est.se};
    return est;
}

std::vector<int> heuristic_start_set(const WeightedGraph& g,
                                     std::vector<int> extra) {
    std::vector<int> out;
    auto push = [&](int v) {
        g.check_vertex(v, "candidate start");
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    };
    for (int v : extra) push(v);
    auto [a, b] = bfs_double_sweep(g);
    push(a);
    push(b);
    int best = 0;
    for (int v = 1; v < g.vertex_count(); ++v)
        if (g.degree(v) > g.degree(best)) best = v;
    push(best);
    return out;
}

} // namespace ctlab
