#pragma once

#include <cstdint>
#include <vector>

#include "ctlab/graph.hpp"
#include "ctlab/rng.hpp"

namespace ctlab {

struct WalkOptions {
    std::uint64_t step_cap = 10'000'000'000ULL; // per simulated run
    int threads = 1;                            // replica-level parallelism
};

// Precomputed transition sampler for the walk with p(x,y) = w(x,y)/mu_x.
// Vertices whose incident weights are all identical take one uniform draw
// per step; the rest use Vose alias tables (two draws per step).
class WalkTable {
  public:
    explicit WalkTable(const WeightedGraph& g);

    int vertex_count() const { return n_; }
    std::uint64_t edge_count() const { return m_; }
    bool tree() const { return tree_; }

    int step(int v, Rng& rng) const {
        std::size_t base = offset_[v];
        std::size_t deg = offset_[v + 1] - base;
        std::size_t i = (std::size_t)rng.below((std::uint64_t)deg);
        if (uniform_[v]) return nbr_[base + i];
        const AliasCell& c = cell_[base + i];
        return rng.real01() < c.prob ? nbr_[base + i] : c.alias;
    }

    // Eccentricity of start in the hop metric (edge counts, not weights).
    int hop_eccentricity(int start) const;

  private:
    struct AliasCell {
        double prob = 1.0;
        int alias = 0;
    };

    int n_ = 0;
    std::uint64_t m_ = 0;
    bool tree_ = false;
    std::vector<std::size_t> offset_;
    std::vector<int> nbr_;
    std::vector<std::uint8_t> uniform_;
    std::vector<AliasCell> cell_;
};

enum class StartPolicyKind { fixed, worst_of_set };

struct StartPolicy {
    StartPolicyKind kind = StartPolicyKind::fixed;
    std::vector<int> starts;

    static StartPolicy fixed_start(int v) { return {StartPolicyKind::fixed, {v}}; }
    static StartPolicy worst_of_set(std::vector<int> vs) {
        return {StartPolicyKind::worst_of_set, std::move(vs)};
    }
};

struct CoverEstimate {
    double mean = 0.0;
    double se = 0.0; // sample std / sqrt(replicas)
    int replicas = 0;
    StartPolicyKind policy = StartPolicyKind::fixed;
    std::vector<int> starts;               // deduplicated candidate list
    int start_used = -1;                   // argmax start under worst_of_set
    std::vector<double> per_start_means;   // aligned with starts
    std::vector<double> per_start_ses;
    std::uint64_t seed = 0;
};

// One walk from start until every vertex has been visited; returns the step
// count. On trees the count is checked against the 2m - ecc(start) floor:
// every edge off the start-to-end path must be crossed at least twice.
std::uint64_t simulate_cover_once(const WalkTable& t, int start, Rng& rng,
                                  const WalkOptions& opt = {});
std::uint64_t simulate_cover_once(const WeightedGraph& g, int start, Rng& rng,
                                  const WalkOptions& opt = {});

// One walk from x until it first reaches y.
std::uint64_t simulate_hitting_once(const WalkTable& t, int x, int y, Rng& rng,
                                    const WalkOptions& opt = {});

// Replica r of start s draws from the substream mix_seed(seed, {s, r}), so
// the result is a pure function of (graph, policy, replicas, seed) no matter
// how replicas are scheduled; sums are reduced in replica order. Under
// worst_of_set the reported mean/se belong to the start with the largest
// mean (ties: earliest in the list). That max under-estimates the true
// worst-start cover time whenever the candidate set misses the argmax.
CoverEstimate estimate_cover_time(const WeightedGraph& g,
                                  const StartPolicy& policy, int replicas,
                                  std::uint64_t seed,
                                  const WalkOptions& opt = {});

// Mean first-passage time from x to y; same shape as a cover estimate with
// starts = {x}. Substream of replica r is mix_seed(seed, {x, y, r}).
CoverEstimate estimate_hitting(const WeightedGraph& g, int x, int y,
                               int replicas, std::uint64_t seed,
                               const WalkOptions& opt = {});

// Candidate starts for worst_of_set: caller-supplied extras (e.g. resistance
// diameter endpoints), the BFS double-sweep pair, and a max-degree vertex,
// deduplicated in that order.
std::vector<int> heuristic_start_set(const WeightedGraph& g,
                                     std::vector<int> extra = {});

} // namespace ctlab
