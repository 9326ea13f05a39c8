#include "ctlab/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <unordered_map>

#include "ctlab/summary.hpp"

namespace ctlab {

namespace {

constexpr double kTailTol = 1e-12;

std::vector<double> cumulative(const std::vector<double>& w) {
    std::vector<double> cum(w.size());
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        s += w[i];
        cum[i] = s;
    }
    return cum;
}

int sample_from_cum(const std::vector<double>& cum, Rng& rng) {
    double u = rng.real01() * cum.back();
    auto it = std::upper_bound(cum.begin(), cum.end(), u);
    if (it == cum.end()) --it;
    return (int)(it - cum.begin());
}

} // namespace

void OffspringSpec::finish() {
    std::vector<double> weighted(pmf_.size());
    for (std::size_t k = 0; k < pmf_.size(); ++k) weighted[k] = (double)k * pmf_[k];
    mean_ = kahan_sum(weighted);
    cum_ = cumulative(pmf_);
    size_cum_ = cumulative(weighted);
}

OffspringSpec OffspringSpec::poisson(double mean) {
    require(std::isfinite(mean) && mean > 0.0, ErrorCode::InvalidParameters,
            "poisson offspring needs a positive finite mean");
    OffspringSpec s;
    s.kind_ = OffspringKind::poisson;
    s.param_p_ = mean;
    double pk = std::exp(-mean);
    double cum = 0.0;
    for (int k = 0;; ++k) {
        s.pmf_.push_back(pk);
        cum += pk;
        if (cum >= 1.0 - kTailTol && (double)k >= mean) break;
        require(k < 200000, ErrorCode::InvalidParameters,
                "poisson offspring mean too large to tabulate");
        pk *= mean / (k + 1);
    }
    s.finish();
    return s;
}

OffspringSpec OffspringSpec::geometric(double p) {
    require(std::isfinite(p) && p > 0.0 && p < 1.0, ErrorCode::InvalidParameters,
            "geometric offspring needs p in (0,1)");
    OffspringSpec s;
    s.kind_ = OffspringKind::geometric;
    s.param_p_ = p;
    double pk = p;
    double cum = 0.0;
    for (int k = 0;; ++k) {
        s.pmf_.push_back(pk);
        cum += pk;
        if (cum >= 1.0 - kTailTol) break;
        require(k < 2000000, ErrorCode::InvalidParameters,
                "geometric offspring p too small to tabulate");
        pk *= 1.0 - p;
    }
    s.finish();
    return s;
}

OffspringSpec OffspringSpec::binomial(int n, double p) {
    require(n >= 1, ErrorCode::InvalidParameters,
            "binomial offspring needs at least one trial");
    require(std::isfinite(p) && p > 0.0 && p < 1.0, ErrorCode::InvalidParameters,
            "binomial offspring needs p in (0,1)");
    OffspringSpec s;
    s.kind_ = OffspringKind::binomial;
    s.param_p_ = p;
    s.param_n_ = n;
    s.pmf_.resize((std::size_t)n + 1);
    double pk = std::pow(1.0 - p, n);
    for (int k = 0; k <= n; ++k) {
        s.pmf_[(std::size_t)k] = pk;
        pk *= (double)(n - k) / (k + 1) * (p / (1.0 - p));
    }
    s.finish();
    return s;
}

OffspringSpec OffspringSpec::explicit_table(std::vector<double> probs) {
    require(!probs.empty(), ErrorCode::InvalidParameters,
            "explicit offspring table is empty");
    double sum = 0.0;
    for (double q : probs) {
        require(std::isfinite(q) && q >= 0.0 && q <= 1.0,
                ErrorCode::InvalidParameters,
                "explicit offspring probabilities must lie in [0,1]");
        sum += q;
    }
    require(std::abs(sum - 1.0) <= kTailTol, ErrorCode::InvalidParameters,
            "explicit offspring probabilities must sum to 1");
    while (probs.size() > 1 && probs.back() == 0.0) probs.pop_back();
    OffspringSpec s;
    s.kind_ = OffspringKind::explicit_table;
    s.pmf_ = std::move(probs);
    s.finish();
    return s;
}

OffspringSpec OffspringSpec::power_tail(double alpha, int cutoff) {
    require(std::isfinite(alpha) && alpha > 1.0 && alpha <= 2.0,
            ErrorCode::InvalidParameters, "tail exponent must lie in (1,2]");
    require(cutoff >= 2 && cutoff <= 1000000, ErrorCode::InvalidParameters,
            "power tail cutoff must lie in [2, 1e6]");
    // Unnormalized tail u_k = k^{-(1+alpha)} for k in [2, cutoff]; fixing
    // P(1) = 1/2 and scaling the tail so its mean contribution is 1/2 makes
    // the law critical by construction; P(0) absorbs the leftover mass.
    std::vector<double> u((std::size_t)cutoff + 1, 0.0);
    std::vector<double> mass_terms, mean_terms;
    for (int k = 2; k <= cutoff; ++k) {
        double t = std::pow((double)k, -(1.0 + alpha));
        u[(std::size_t)k] = t;
        mass_terms.push_back(t);
        mean_terms.push_back((double)k * t);
    }
    double s0 = kahan_sum(mass_terms);
    double s1 = kahan_sum(mean_terms);
    double scale = 0.5 / s1;
    OffspringSpec s;
    s.kind_ = OffspringKind::power_tail;
    s.alpha_ = alpha;
    s.pmf_.assign((std::size_t)cutoff + 1, 0.0);
    for (int k = 2; k <= cutoff; ++k) s.pmf_[(std::size_t)k] = scale * u[(std::size_t)k];
    s.pmf_[1] = 0.5;
    s.pmf_[0] = scale * (s1 - s0);
    s.finish();
    return s;
}

double OffspringSpec::pgf(double s) const {
    switch (kind_) {
    case OffspringKind::poisson:
        return std::exp(param_p_ * (s - 1.0));
    case OffspringKind::geometric:
        return param_p_ / (1.0 - (1.0 - param_p_) * s);
    case OffspringKind::binomial:
        return std::pow(1.0 - param_p_ + param_p_ * s, param_n_);
    case OffspringKind::explicit_table:
    case OffspringKind::power_tail: {
        double acc = 0.0;
        for (std::size_t k = pmf_.size(); k-- > 0;) acc = acc * s + pmf_[k];
        return acc;
    }
    }
    fail(ErrorCode::InvalidParameters, "unreachable offspring kind");
}

double OffspringSpec::survival_step(double p) const {
    switch (kind_) {
    case OffspringKind::poisson:
        return -std::expm1(-param_p_ * p);
    case OffspringKind::geometric: {
        double q = 1.0 - param_p_;
        return q * p / (param_p_ + q * p);
    }
    case OffspringKind::binomial:
        return -std::expm1(param_n_ * std::log1p(-param_p_ * p));
    case OffspringKind::explicit_table:
    case OffspringKind::power_tail: {
        double lg = std::log1p(-p);
        std::vector<double> terms;
        terms.reserve(pmf_.size());
        for (std::size_t k = 1; k < pmf_.size(); ++k)
            if (pmf_[k] > 0.0)
                terms.push_back(pmf_[k] * -std::expm1((double)k * lg));
        return kahan_sum(terms);
    }
    }
    fail(ErrorCode::InvalidParameters, "unreachable offspring kind");
}

int OffspringSpec::sample(Rng& rng) const { return sample_from_cum(cum_, rng); }

int OffspringSpec::sample_size_biased(Rng& rng) const {
    return sample_from_cum(size_cum_, rng);
}

namespace {

void check_critical(const OffspringSpec& spec) {
    require(std::abs(spec.mean() - 1.0) <= 1e-9, ErrorCode::NotCritical,
            "offspring mean " + format_double(spec.mean()) + " is not 1");
}

} // namespace

double survival_probability(const OffspringSpec& spec, int levels) {
    check_critical(spec);
    require(levels >= 0, ErrorCode::InvalidParameters,
            "survival level must be non-negative");
    double p = 1.0;
    for (int k = 0; k < levels; ++k) p = spec.survival_step(p);
    return p;
}

namespace {

struct TreeBuilder {
    std::vector<Edge> edges;
    int next_id = 1;

    int child_of(int parent, std::int64_t cap) {
        require(next_id < cap, ErrorCode::BudgetExceeded,
                "branching tree grew beyond the vertex budget");
        int id = next_id++;
        edges.push_back({parent, id, 1.0});
        return id;
    }
};

} // namespace

WeightedGraph gen_supercritical_gw(const OffspringSpec& spec, int levels,
                                   std::uint64_t seed, const GwOptions& opt) {
    require(spec.mean() > 1.0, ErrorCode::InvalidParameters,
            "supercritical branching needs offspring mean > 1");
    require(levels >= 1, ErrorCode::InvalidParameters,
            "level count must be at least 1");
    Rng rng(mix_seed(seed, {1}));
    for (int attempt = 0; attempt < opt.resample_cap; ++attempt) {
        TreeBuilder tb;
        std::vector<int> frontier{0};
        std::vector<int> next;
        for (int depth = 0; depth < levels; ++depth) {
            next.clear();
            for (int v : frontier) {
                int k = spec.sample(rng);
                for (int c = 0; c < k; ++c)
                    next.push_back(tb.child_of(v, opt.max_vertices));
            }
            frontier.swap(next);
            if (frontier.empty()) break;
        }
        if (!frontier.empty()) return WeightedGraph::build(tb.next_id, tb.edges);
    }
    fail(ErrorCode::RejectionBudgetExceeded,
         "no surviving tree in " + std::to_string(opt.resample_cap) +
             " attempts");
}

WeightedGraph gen_kesten_iic(const OffspringSpec& spec, int levels,
                             std::uint64_t seed, const GwOptions& opt) {
    check_critical(spec);
    require(levels >= 1, ErrorCode::InvalidParameters,
            "level count must be at least 1");
    Rng rng(mix_seed(seed, {2}));
    TreeBuilder tb;
    int spine = 0;
    for (int depth = 0; depth < levels; ++depth) {
        int k = spec.sample_size_biased(rng);
        int chosen = (int)rng.below((std::uint64_t)k);
        int next_spine = -1;
        for (int c = 0; c < k; ++c) {
            int child = tb.child_of(spine, opt.max_vertices);
            if (c == chosen) {
                next_spine = child;
            } else {
                // plain critical subtree truncated at total depth `levels`
                std::vector<std::pair<int, int>> stack{{child, depth + 1}};
                while (!stack.empty()) {
                    auto [v, d] = stack.back();
                    stack.pop_back();
                    if (d >= levels) continue;
                    int kk = spec.sample(rng);
                    for (int j = 0; j < kk; ++j)
                        stack.push_back({tb.child_of(v, opt.max_vertices), d + 1});
                }
            }
        }
        spine = next_spine;
    }
    return WeightedGraph::build(tb.next_id, tb.edges);
}

namespace {

struct UnionFind {
    std::vector<int> parent, size;

    explicit UnionFind(int n) : parent(n), size((std::size_t)n, 1) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x) {
        while (parent[(std::size_t)x] != x) {
            parent[(std::size_t)x] = parent[(std::size_t)parent[(std::size_t)x]];
            x = parent[(std::size_t)x];
        }
        return x;
    }
    void join(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (size[(std::size_t)a] < size[(std::size_t)b]) std::swap(a, b);
        parent[(std::size_t)b] = a;
        size[(std::size_t)a] += size[(std::size_t)b];
    }
};

// Largest component among edge endpoints; ties go to the component holding
// the smallest vertex id. Returns the dense relabeling of its vertices in
// increasing id order, or throws EmptyGraph when there are no edges.
WeightedGraph largest_component(int n, const std::vector<std::pair<int, int>>& kept) {
    require(!kept.empty(), ErrorCode::EmptyGraph, "no edges survived");
    UnionFind uf(n);
    for (auto [a, b] : kept) uf.join(a, b);
    std::vector<int> min_id((std::size_t)n, -1);
    for (int v = 0; v < n; ++v) {
        int r = uf.find(v);
        if (min_id[(std::size_t)r] < 0) min_id[(std::size_t)r] = v;
    }
    int best = -1;
    for (int v = 0; v < n; ++v) {
        int r = uf.find(v);
        if (uf.size[(std::size_t)r] < 2) continue;
        if (best < 0 || uf.size[(std::size_t)r] > uf.size[(std::size_t)best] ||
            (uf.size[(std::size_t)r] == uf.size[(std::size_t)best] &&
             min_id[(std::size_t)r] < min_id[(std::size_t)best]))
            best = r;
    }
    require(best >= 0, ErrorCode::EmptyGraph, "no component with an edge");
    std::vector<int> label((std::size_t)n, -1);
    int count = 0;
    for (int v = 0; v < n; ++v)
        if (uf.find(v) == best) label[(std::size_t)v] = count++;
    std::vector<Edge> edges;
    for (auto [a, b] : kept)
        if (label[(std::size_t)a] >= 0)
            edges.push_back({label[(std::size_t)a], label[(std::size_t)b], 1.0});
    return WeightedGraph::build(count, edges);
}

} // namespace

WeightedGraph gen_er(int n, double p, std::uint64_t seed) {
    require(n >= 2, ErrorCode::InvalidParameters, "G(N,p) needs N >= 2");
    require(std::isfinite(p) && p >= 0.0 && p <= 1.0,
            ErrorCode::InvalidParameters, "edge probability outside [0,1]");
    Rng rng(mix_seed(seed, {3}));
    std::vector<std::pair<int, int>> kept;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.bernoulli(p)) kept.push_back({i, j});
    return largest_component(n, kept);
}

WeightedGraph gen_percolation_box(int dim, int radius, double p,
                                  std::uint64_t seed) {
    require(dim >= 2 && dim <= 4, ErrorCode::InvalidParameters,
            "box percolation supports dimensions 2..4");
    require(radius >= 1, ErrorCode::InvalidParameters,
            "box radius must be at least 1");
    require(std::isfinite(p) && p >= 0.0 && p <= 1.0,
            ErrorCode::InvalidParameters, "edge probability outside [0,1]");
    std::int64_t side = 2 * (std::int64_t)radius + 1;
    std::int64_t cells = 1;
    for (int a = 0; a < dim; ++a) {
        cells *= side;
        require(cells <= 30'000'000, ErrorCode::InvalidParameters,
                "box too large for flat indexing");
    }
    int n = (int)cells;
    std::int64_t stride[4] = {1, side, side * side, side * side * side};
    Rng rng(mix_seed(seed, {4}));
    std::vector<std::pair<int, int>> kept;
    std::vector<std::int64_t> coord((std::size_t)dim, 0);
    for (int idx = 0; idx < n; ++idx) {
        for (int a = 0; a < dim; ++a)
            if (coord[(std::size_t)a] + 1 < side && rng.bernoulli(p))
                kept.push_back({idx, idx + (int)stride[a]});
        for (int a = 0; a < dim; ++a) {
            if (++coord[(std::size_t)a] < side) break;
            coord[(std::size_t)a] = 0;
        }
    }
    return largest_component(n, kept);
}

WeightedGraph gen_rw_range(int dim, int steps, std::uint64_t seed) {
    require(dim >= 5, ErrorCode::InvalidParameters,
            "walk range construction is for dimension >= 5");
    require(steps >= 1, ErrorCode::InvalidParameters,
            "walk needs at least one step");
    Rng rng(mix_seed(seed, {5}));
    std::vector<std::int64_t> points; // n * dim coordinates, first-visit order
    std::unordered_map<std::uint64_t, std::vector<int>> index;
    auto hash_of = [dim](const std::int64_t* c) {
        std::uint64_t h = 0x6b79d0c1a7f253b1ULL;
        for (int a = 0; a < dim; ++a) h = splitmix64(h ^ (std::uint64_t)c[a]);
        return h;
    };
    auto id_of = [&](const std::int64_t* c) {
        std::vector<int>& bucket = index[hash_of(c)];
        for (int id : bucket)
            if (std::memcmp(points.data() + (std::size_t)id * (std::size_t)dim, c,
                            sizeof(std::int64_t) * (std::size_t)dim) == 0)
                return id;
        int id = (int)(points.size() / (std::size_t)dim);
        points.insert(points.end(), c, c + dim);
        bucket.push_back(id);
        return id;
    };
    std::vector<std::int64_t> pos((std::size_t)dim, 0);
    int cur = id_of(pos.data());
    std::vector<std::pair<int, int>> arcs;
    for (int s = 0; s < steps; ++s) {
        std::uint64_t r = rng.below(2 * (std::uint64_t)dim);
        int axis = (int)(r >> 1);
        pos[(std::size_t)axis] += (r & 1) ? 1 : -1;
        int nxt = id_of(pos.data());
        arcs.push_back({std::min(cur, nxt), std::max(cur, nxt)});
        cur = nxt;
    }
    std::sort(arcs.begin(), arcs.end());
    arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
    std::vector<Edge> edges;
    edges.reserve(arcs.size());
    for (auto [a, b] : arcs) edges.push_back({a, b, 1.0});
    return WeightedGraph::build((int)(points.size() / (std::size_t)dim), edges);
}

WeightedGraph gen_sierpinski(int level, double weight_lo, double weight_hi,
                             std::uint64_t seed) {
    require(level >= 0 && level <= 12, ErrorCode::InvalidParameters,
            "gasket level must lie in [0, 12]");
    require(std::isfinite(weight_lo) && std::isfinite(weight_hi) &&
                weight_lo > 0.0 && weight_lo <= weight_hi,
            ErrorCode::InvalidParameters,
            "weight bounds need 0 < lo <= hi < inf");
    Rng rng(mix_seed(seed, {6}));
    std::int64_t span = 1LL << level;
    std::unordered_map<std::uint64_t, int> ids;
    auto id_of = [&](std::int64_t x, std::int64_t y) {
        std::uint64_t key = ((std::uint64_t)(std::uint32_t)x << 32) |
                            (std::uint64_t)(std::uint32_t)y;
        auto [it, fresh] = ids.insert({key, (int)ids.size()});
        (void)fresh;
        return it->second;
    };
    // register the extreme corners first so they get ids 0, 1, 2
    id_of(0, 0);
    id_of(span, 0);
    id_of(0, span);
    std::vector<Edge> edges;
    struct Tri {
        std::int64_t ax, ay, bx, by, cx, cy;
        int depth;
    };
    std::vector<Tri> stack{{0, 0, span, 0, 0, span, 0}};
    while (!stack.empty()) {
        Tri t = stack.back();
        stack.pop_back();
        if (t.depth == level) {
            int a = id_of(t.ax, t.ay);
            int b = id_of(t.bx, t.by);
            int c = id_of(t.cx, t.cy);
            edges.push_back({a, b, rng.uniform(weight_lo, weight_hi)});
            edges.push_back({a, c, rng.uniform(weight_lo, weight_hi)});
            edges.push_back({b, c, rng.uniform(weight_lo, weight_hi)});
            continue;
        }
        std::int64_t abx = (t.ax + t.bx) / 2, aby = (t.ay + t.by) / 2;
        std::int64_t acx = (t.ax + t.cx) / 2, acy = (t.ay + t.cy) / 2;
        std::int64_t bcx = (t.bx + t.cx) / 2, bcy = (t.by + t.cy) / 2;
        // LIFO stack: push corner-C child first so the corner-A child is
        // subdivided first, keeping vertex and weight order depth-first
        stack.push_back({acx, acy, bcx, bcy, t.cx, t.cy, t.depth + 1});
        stack.push_back({abx, aby, t.bx, t.by, bcx, bcy, t.depth + 1});
        stack.push_back({t.ax, t.ay, abx, aby, acx, acy, t.depth + 1});
    }
    return WeightedGraph::build((int)ids.size(), edges);
}

WeightedGraph gen_barbell(int n, int pendants) {
    require(n >= 2, ErrorCode::InvalidParameters,
            "complete core needs at least 2 vertices");
    require(pendants >= 2 && pendants <= n, ErrorCode::InvalidParameters,
            "pendant count must lie in [2, N]");
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) edges.push_back({i, j, 1.0});
    for (int i = 0; i < pendants; ++i) edges.push_back({i, n + i, 1.0});
    return WeightedGraph::build(n + pendants, edges);
}

WeightedGraph gen_cycle(int n) {
    require(n >= 3, ErrorCode::InvalidParameters, "cycle needs at least 3 vertices");
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, 1.0});
    return WeightedGraph::build(n, edges);
}

WeightedGraph gen_complete(int n) {
    require(n >= 2, ErrorCode::InvalidParameters,
            "complete graph needs at least 2 vertices");
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) edges.push_back({i, j, 1.0});
    return WeightedGraph::build(n, edges);
}

double er_probability(const FamilySpec& spec, int n) {
    require(n >= 2, ErrorCode::InvalidParameters, "G(N,p) needs N >= 2");
    double p = 0.0;
    switch (spec.regime) {
    case ErRegime::supercritical_c_over_n:
        p = spec.er_c / n;
        break;
    case ErRegime::supercritical_f_over_n: {
        double f = std::pow(std::log((double)n), 2.0);
        p = f / n;
        break;
    }
    case ErRegime::critical:
        p = 1.0 / n;
        break;
    }
    return std::min(p, 1.0);
}

WeightedGraph generate(const FamilySpec& spec, int n, std::uint64_t seed) {
    switch (spec.family) {
    case Family::gw_supercritical:
        require(spec.offspring.has_value(), ErrorCode::InvalidParameters,
                "branching family needs an offspring law");
        return gen_supercritical_gw(*spec.offspring, n, seed);
    case Family::iic_kesten:
        require(spec.offspring.has_value(), ErrorCode::InvalidParameters,
                "branching family needs an offspring law");
        return gen_kesten_iic(*spec.offspring, n, seed);
    case Family::er:
        return gen_er(n, er_probability(spec, n), seed);
    case Family::percolation_box:
        return gen_percolation_box(spec.dim, n, spec.perc_p, seed);
    case Family::rw_range:
        return gen_rw_range(spec.dim, n, seed);
    case Family::sierpinski:
        return gen_sierpinski(n, spec.weight_lo, spec.weight_hi, seed);
    case Family::barbell:
        return gen_barbell(n, spec.pendants > 0 ? spec.pendants : n);
    case Family::cycle:
        return gen_cycle(n);
    case Family::complete:
        return gen_complete(n);
    }
    fail(ErrorCode::InvalidParameters, "unknown family");
}

const char* family_name(Family f) {
    switch (f) {
    case Family::gw_supercritical: return "gw_supercritical";
    case Family::iic_kesten: return "iic_kesten";
    case Family::er: return "er";
    case Family::percolation_box: return "percolation_box";
    case Family::rw_range: return "rw_range";
    case Family::sierpinski: return "sierpinski";
    case Family::barbell: return "barbell";
    case Family::cycle: return "cycle";
    case Family::complete: return "complete";
    }
    return "unknown";
}

Family family_from_name(const std::string& name) {
    for (Family f : {Family::gw_supercritical, Family::iic_kesten, Family::er,
                     Family::percolation_box, Family::rw_range,
                     Family::sierpinski, Family::barbell, Family::cycle,
                     Family::complete})
        if (name == family_name(f)) return f;
    fail(ErrorCode::InvalidParameters, "unknown family name: " + name);
}

} // namespace ctlab
