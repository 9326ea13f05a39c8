#include "ctlab/chain_exact.hpp"

#include <bit>
#include <cmath>

namespace ctlab {

HittingProfile hitting_times(const WeightedGraph& g, const HittingOptions& opt) {
    int n = g.vertex_count();
    require(n <= opt.dense_cap, ErrorCode::BudgetExceeded,
            "hitting solve needs vertex count <= " + std::to_string(opt.dense_cap) + ", got " +
                std::to_string(n));
    HittingProfile prof;
    prof.h = Eigen::MatrixXd::Zero(n, n);
    if (n == 1) return prof;

    Eigen::MatrixXd a(n - 1, n - 1);
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(n - 1);
    for (int y = 0; y < n; ++y) {
        // row/col y deleted; index map skips y
        a.setZero();
        for (int v = 0; v < n; ++v) {
            if (v == y) continue;
            int vi = v < y ? v : v - 1;
            a(vi, vi) = 1.0;
            auto nbrs = g.neighbors(v);
            auto ws = g.neighbor_weights(v);
            for (std::size_t k = 0; k < nbrs.size(); ++k) {
                int u = nbrs[k];
                if (u == y) continue;
                int ui = u < y ? u : u - 1;
                a(vi, ui) -= ws[k] / g.strength(v);
            }
        }
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
        Eigen::VectorXd h = lu.solve(ones);
        h += lu.solve(ones - a * h);  // one refinement pass
        for (int v = 0; v < n; ++v) {
            if (v == y) continue;
            double val = h(v < y ? v : v - 1);
            require(std::isfinite(val) && val >= 0.0, ErrorCode::NumericalFailure,
                    "hitting solve produced a non-finite or negative time");
            prof.h(v, y) = val;
        }
    }

    if (opt.commute_check) {
        const ResistanceMetric& m = *opt.commute_check;
        double vol = g.volume();
        for (int x = 0; x < n; ++x)
            for (int y = x + 1; y < n; ++y) {
                double commute = prof.h(x, y) + prof.h(y, x);
                double target = vol * m(x, y);
                require(std::abs(commute - target) <= opt.commute_tol * std::max(1.0, target),
                        ErrorCode::NumericalFailure,
                        "commute identity violated at pair (" + std::to_string(x) + "," +
                            std::to_string(y) + ")");
            }
    }

    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            if (prof.h(x, y) > prof.t_hit) {
                prof.t_hit = prof.h(x, y);
                prof.witness_x = x;
                prof.witness_y = y;
            }
    return prof;
}

CoverExact exact_cover_time(const WeightedGraph& g, int state_cap) {
    int n = g.vertex_count();
    require(state_cap >= 1 && state_cap <= 20, ErrorCode::InvalidParameters,
            "state cap must be in [1,20]");
    require(n <= state_cap, ErrorCode::BudgetExceeded,
            "exact cover time needs vertex count <= " + std::to_string(state_cap) + ", got " +
                std::to_string(n));
    CoverExact out;
    if (n == 1) {
        out.per_start = {0.0};
        return out;
    }

    std::uint32_t full = (1u << n) - 1;
    std::vector<double> e((std::size_t)n << n, 0.0);
    auto at = [&](int v, std::uint32_t s) -> double& { return e[((std::size_t)s * n) + v]; };

    std::vector<std::vector<std::uint32_t>> by_pop(n + 1);
    for (std::uint32_t s = 1; s <= full; ++s) by_pop[std::popcount(s)].push_back(s);

    std::vector<int> members;
    Eigen::MatrixXd a;
    Eigen::VectorXd b;
    for (int pc = n - 1; pc >= 1; --pc) {
        for (std::uint32_t s : by_pop[pc]) {
            members.clear();
            for (int v = 0; v < n; ++v)
                if (s & (1u << v)) members.push_back(v);
            int k = (int)members.size();
            // E[v,S] = 1 + sum_{u in S} p(v,u) E[u,S] + sum_{u notin S} p(v,u) E[u,S+u]
            a.setZero(k, k);
            b.resize(k);
            for (int i = 0; i < k; ++i) {
                int v = members[i];
                a(i, i) = 1.0;
                double rhs = 1.0;
                auto nbrs = g.neighbors(v);
                auto ws = g.neighbor_weights(v);
                for (std::size_t t = 0; t < nbrs.size(); ++t) {
                    int u = nbrs[t];
                    double p = ws[t] / g.strength(v);
                    if (s & (1u << u)) {
                        int j = 0;
                        while (members[j] != u) ++j;
                        a(i, j) -= p;
                    } else {
                        rhs += p * at(u, s | (1u << u));
                    }
                }
                b(i) = rhs;
            }
            Eigen::VectorXd sol = (k == 1) ? Eigen::VectorXd::Constant(1, b(0) / a(0, 0))
                                           : Eigen::VectorXd(a.partialPivLu().solve(b));
            for (int i = 0; i < k; ++i) at(members[i], s) = sol(i);
        }
    }

    out.per_start.resize(n);
    for (int v = 0; v < n; ++v) {
        out.per_start[v] = at(v, 1u << v);
        if (out.per_start[v] > out.t_cov) {
            out.t_cov = out.per_start[v];
            out.witness_start = v;
        }
    }
    return out;
}

double matthews_upper(double t_hit, int vertex_count) {
    require(vertex_count >= 1, ErrorCode::InvalidParameters, "vertex count must be >= 1");
    return t_hit * (std::log((double)vertex_count) + 1.0);
}

SandwichResult sandwich_check(double t_cov, double t_hit, int vertex_count, double slack) {
    require(vertex_count >= 1, ErrorCode::InvalidParameters, "vertex count must be >= 1");
    SandwichResult r;
    double logn = std::log((double)vertex_count);
    r.lower_margin = t_cov - t_hit;
    r.upper_margin = 2.0 * t_hit * logn - t_cov;
    r.asserted = vertex_count >= 3;
    r.pass = r.lower_margin >= -slack && (!r.asserted || r.upper_margin >= -slack);
    return r;
}

} // namespace ctlab
