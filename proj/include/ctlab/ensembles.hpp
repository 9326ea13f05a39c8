#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ctlab/graph.hpp"
#include "ctlab/rng.hpp"

namespace ctlab {

enum class OffspringKind { poisson, geometric, binomial, explicit_table, power_tail };

// Offspring law of a branching process, held as a probability table truncated
// so the dropped tail mass is below 1e-12. The generating function and the
// survival recursion use closed forms where the law has one.
class OffspringSpec {
  public:
    static OffspringSpec poisson(double mean);
    // P(k) = p (1-p)^k for k >= 0, mean (1-p)/p
    static OffspringSpec geometric(double p);
    static OffspringSpec binomial(int n, double p);
    static OffspringSpec explicit_table(std::vector<double> probs);
    // Critical law with P(k) proportional to k^{-(1+alpha)} for 2 <= k <=
    // cutoff, P(1) = 1/2, and P(0) chosen so that the mean is exactly 1.
    // Lies in the domain of attraction of an alpha-stable law as cutoff grows.
    static OffspringSpec power_tail(double alpha, int cutoff);

    OffspringKind kind() const { return kind_; }
    double mean() const { return mean_; }
    double tail_alpha() const { return alpha_; }  // 0 unless power_tail
    const std::vector<double>& pmf() const { return pmf_; }

    // E s^Z for s in [0,1]
    double pgf(double s) const;
    // 1 - pgf(1 - p) evaluated without cancellation; one step of the
    // survival recursion
    double survival_step(double p) const;

    int sample(Rng& rng) const;
    // k with probability k P(k) / mean; never 0
    int sample_size_biased(Rng& rng) const;

  private:
    OffspringSpec() = default;
    void finish();

    OffspringKind kind_ = OffspringKind::explicit_table;
    double mean_ = 0.0;
    double alpha_ = 0.0;
    double param_p_ = 0.0; // rate / success probability by kind
    int param_n_ = 0;      // binomial trial count
    std::vector<double> pmf_;
    std::vector<double> cum_;
    std::vector<double> size_cum_;
};

// P(Z_N > 0) for the critical process, by iterating p_k = 1 - f(1 - p_{k-1})
// from p_0 = 1. Throws NotCritical unless |mean - 1| <= 1e-9.
double survival_probability(const OffspringSpec& spec, int levels);

struct GwOptions {
    int resample_cap = 1'000'000;       // rejection attempts for Z_N > 0
    std::int64_t max_vertices = 20'000'000; // guards runaway supercritical growth
};

// First N generations of the tree, conditioned on generation N being
// nonempty by rejection. Root is vertex 0, ids in creation order, unit
// weights. Requires mean > 1.
WeightedGraph gen_supercritical_gw(const OffspringSpec& spec, int levels,
                                   std::uint64_t seed, const GwOptions& opt = {});

// First N generations of the critical tree conditioned to survive forever:
// a spine of length N whose vertices draw offspring from the size-biased
// law, one uniform child continuing the spine, the rest rooting plain
// critical trees truncated at total depth N. Root is vertex 0.
WeightedGraph gen_kesten_iic(const OffspringSpec& spec, int levels,
                             std::uint64_t seed, const GwOptions& opt = {});

// Largest connected component of G(N, p), unit weights, vertices relabeled
// densely in increasing original id (ties between equal-size components go
// to the one containing the smallest original id). Throws EmptyGraph when no
// edge survives.
WeightedGraph gen_er(int n, double p, std::uint64_t seed);

// Largest open cluster of bond percolation on the box [-N, N]^d, unit
// weights. Flat-array indexing limits d to 2..4.
WeightedGraph gen_percolation_box(int dim, int radius, double p,
                                  std::uint64_t seed);

// Trace of an N-step simple random walk on Z^d, d >= 5: vertices are the
// distinct visited points in first-visit order, edges the traversed steps.
WeightedGraph gen_rw_range(int dim, int steps, std::uint64_t seed);

// Level-N gasket: 3^N upward triangles, (3^{N+1}+3)/2 vertices, 3^{N+1}
// edges with i.i.d. uniform weights on [weight_lo, weight_hi] drawn in a
// fixed construction order. Vertices 0, 1, 2 are the extreme corners.
WeightedGraph gen_sierpinski(int level, double weight_lo, double weight_hi,
                             std::uint64_t seed);

// K_n with pendant leaves hanging from vertices 0..pendants-1; requires
// 2 <= pendants <= n. Deterministic.
WeightedGraph gen_barbell(int n, int pendants);

WeightedGraph gen_cycle(int n);
WeightedGraph gen_complete(int n);

enum class Family {
    gw_supercritical,
    iic_kesten,
    er,
    percolation_box,
    rw_range,
    sierpinski,
    barbell,
    cycle,
    complete,
};

// How the edge probability of G(N, p) scales with N. Generation itself only
// sees the resulting p; the regime is carried into reports.
enum class ErRegime { supercritical_c_over_n, supercritical_f_over_n, critical };

struct FamilySpec {
    Family family = Family::cycle;
    std::optional<OffspringSpec> offspring; // gw_supercritical, iic_kesten
    ErRegime regime = ErRegime::critical;   // er
    double er_c = 2.0;                      // er regime I: p = c/N
    double perc_p = 0.5;                    // percolation_box
    int dim = 2;                            // percolation_box (2..4), rw_range (>= 5)
    double weight_lo = 1.0;                 // sierpinski
    double weight_hi = 1.0;
    int pendants = 0;                       // barbell; 0 means pendants = N
};

// c/N, (log N)^2/N, or 1/N by regime, clamped to at most 1. The middle
// choice is a default for the slowly-growing-degree regime; it is a knob,
// not a canonical value, and reports record it.
double er_probability(const FamilySpec& spec, int n);

// Dispatch on spec.family with size parameter N. Each stochastic family
// mixes the seed with its own stream tag, so different families given the
// same seed do not share draws.
WeightedGraph generate(const FamilySpec& spec, int n, std::uint64_t seed);

const char* family_name(Family f);
Family family_from_name(const std::string& name);

} // namespace ctlab
