#include "ctlab/resistance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ctlab {

namespace {

Eigen::MatrixXd laplacian(const WeightedGraph& g) {
    int n = g.vertex_count();
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
    for (const Edge& e : g.edges()) {
        l(e.u, e.u) += e.w;
        l(e.v, e.v) += e.w;
        l(e.u, e.v) -= e.w;
        l(e.v, e.u) -= e.w;
    }
    return l;
}

} // namespace

ResistanceMetric ResistanceMetric::dense(const WeightedGraph& g, const ResistanceOptions& opt) {
    int n = g.vertex_count();
    require(n <= opt.dense_cap, ErrorCode::BudgetExceeded,
            "dense resistance table needs vertex count <= " + std::to_string(opt.dense_cap) +
                ", got " + std::to_string(n) + "; use per-pair mode");
    ResistanceMetric m;
    m.g_ = g;
    m.opt_ = opt;
    if (n == 1) {
        m.table_ = Eigen::MatrixXd::Zero(1, 1);
        return m;
    }

    // L + J/n is SPD for a connected graph and shares L's pseudoinverse up to
    // a rank-one term that cancels in resistance differences.
    Eigen::MatrixXd a = laplacian(g);
    a.array() += 1.0 / n;
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    require(llt.info() == Eigen::Success, ErrorCode::NumericalFailure,
            "Cholesky factorization of the deflated Laplacian failed");
    Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(n, n));

    // Residual spot check on a handful of columns.
    double scale = a.cwiseAbs().maxCoeff();
    for (int j : {0, n / 2, n - 1}) {
        Eigen::VectorXd r = a * inv.col(j) - Eigen::VectorXd::Unit(n, j);
        require(r.cwiseAbs().maxCoeff() <= opt.residual_tol * std::max(1.0, scale),
                ErrorCode::NumericalFailure, "resistance solve residual above tolerance");
    }

    m.table_.resize(n, n);
    for (int i = 0; i < n; ++i) {
        m.table_(i, i) = 0.0;
        for (int j = i + 1; j < n; ++j) {
            double r = std::max(0.0, inv(i, i) + inv(j, j) - inv(i, j) - inv(j, i));
            m.table_(i, j) = r;
            m.table_(j, i) = r;
        }
    }
    return m;
}

ResistanceMetric ResistanceMetric::per_pair(const WeightedGraph& g, const ResistanceOptions& opt) {
    ResistanceMetric m;
    m.g_ = g;
    m.opt_ = opt;
    m.cache_.assign(g.vertex_count(), {});
    return m;
}

const Eigen::MatrixXd& ResistanceMetric::table() const {
    require(has_table(), ErrorCode::InvalidParameters, "metric has no dense table");
    return table_;
}

namespace {

// CG on the Laplacian grounded at gnd with Jacobi preconditioning.
// Solves L_{-gnd} phi = e_src and returns phi[src] = R(src, gnd).
double grounded_solve(const WeightedGraph& g, int src, int gnd, const ResistanceOptions& opt) {
    int n = g.vertex_count();
    std::vector<double> x(n, 0.0), r(n, 0.0), z(n, 0.0), p(n, 0.0), ap(n, 0.0);
    r[src] = 1.0;
    auto precond = [&](const std::vector<double>& in, std::vector<double>& out) {
        for (int v = 0; v < n; ++v) out[v] = (v == gnd) ? 0.0 : in[v] / g.strength(v);
    };
    precond(r, z);
    p = z;
    double rz = r[src] * z[src];
    for (int iter = 0; iter < opt.cg_max_iter; ++iter) {
        for (int v = 0; v < n; ++v) {
            if (v == gnd) {
                ap[v] = 0.0;
                continue;
            }
            double s = g.strength(v) * p[v];
            auto nbrs = g.neighbors(v);
            auto ws = g.neighbor_weights(v);
            for (std::size_t k = 0; k < nbrs.size(); ++k)
                if (nbrs[k] != gnd) s -= ws[k] * p[nbrs[k]];
            ap[v] = s;
        }
        double pap = 0.0;
        for (int v = 0; v < n; ++v) pap += p[v] * ap[v];
        require(pap > 0.0, ErrorCode::NumericalFailure, "grounded Laplacian lost definiteness");
        double alpha = rz / pap;
        double rmax = 0.0;
        for (int v = 0; v < n; ++v) {
            x[v] += alpha * p[v];
            r[v] -= alpha * ap[v];
            rmax = std::max(rmax, std::abs(r[v]));
        }
        if (rmax <= opt.cg_tol) return x[src];
        precond(r, z);
        double rz_next = 0.0;
        for (int v = 0; v < n; ++v) rz_next += r[v] * z[v];
        double beta = rz_next / rz;
        rz = rz_next;
        for (int v = 0; v < n; ++v) p[v] = z[v] + beta * p[v];
    }
    fail(ErrorCode::NumericalFailure, "per-pair resistance CG did not converge");
}

} // namespace

double ResistanceMetric::resistance(int x, int y) const {
    g_.check_vertex(x, "vertex");
    g_.check_vertex(y, "vertex");
    if (x == y) return 0.0;
    if (has_table()) return table_(x, y);
    int a = std::min(x, y), b = std::max(x, y);
    if (!cache_[a].empty() && !std::isnan(cache_[a][b])) return cache_[a][b];
    double r = grounded_solve(g_, a, b, opt_);
    if (cache_[a].empty())
        cache_[a].assign(g_.vertex_count(), std::numeric_limits<double>::quiet_NaN());
    cache_[a][b] = r;
    return r;
}

ResistanceMetric::Diameter ResistanceMetric::diameter() const {
    const Eigen::MatrixXd& t = table();
    Diameter d;
    int n = g_.vertex_count();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (t(i, j) > d.value) d = {t(i, j), i, j};
    return d;
}

double ResistanceMetric::min_positive() const {
    const Eigen::MatrixXd& t = table();
    int n = g_.vertex_count();
    require(n >= 2, ErrorCode::InvalidParameters, "need at least two vertices");
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (t(i, j) > 0.0) best = std::min(best, t(i, j));
    require(std::isfinite(best), ErrorCode::NumericalFailure, "no positive pairwise resistance");
    return best;
}

std::vector<int> ResistanceMetric::ball(int x, double r) const {
    g_.check_vertex(x, "center");
    require(r >= 0.0, ErrorCode::InvalidParameters, "radius must be >= 0");
    const Eigen::MatrixXd& t = table();
    std::vector<int> members;
    for (int y = 0; y < g_.vertex_count(); ++y)
        if (t(x, y) <= r + opt_.ball_tol) members.push_back(y);
    return members;
}

GreenKernel green_kernel(const ResistanceMetric& m, int root) {
    m.graph().check_vertex(root, "root");
    const Eigen::MatrixXd& t = m.table();
    int n = m.vertex_count();
    GreenKernel k;
    k.root = root;
    k.c.resize(n, n);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            k.c(x, y) = 0.5 * (t(root, x) + t(root, y) - t(x, y));
    for (int x = 0; x < n; ++x) {
        k.c(root, x) = 0.0;
        k.c(x, root) = 0.0;
        require(k.c(x, x) >= -1e-9, ErrorCode::NumericalFailure,
                "green kernel diagonal went negative");
    }
    return k;
}

double nash_williams_bound(const WeightedGraph& g, int x, int y,
                           const std::vector<std::vector<std::size_t>>& cutsets) {
    g.check_vertex(x, "vertex");
    g.check_vertex(y, "vertex");
    require(x != y, ErrorCode::InvalidParameters, "need distinct endpoints");

    std::vector<int> owner(g.edge_count(), -1);
    for (std::size_t k = 0; k < cutsets.size(); ++k) {
        require(!cutsets[k].empty(), ErrorCode::NotACutset, "cutset " + std::to_string(k) + " is empty");
        for (std::size_t ei : cutsets[k]) {
            require(ei < g.edge_count(), ErrorCode::InvalidParameters,
                    "edge index " + std::to_string(ei) + " out of range");
            require(owner[ei] < 0, ErrorCode::OverlappingCutsets,
                    "edge " + std::to_string(ei) + " appears in cutsets " +
                        std::to_string(owner[ei]) + " and " + std::to_string(k));
            owner[ei] = (int)k;
        }
    }

    // Each cutset must disconnect x from y once its edges are removed.
    for (std::size_t k = 0; k < cutsets.size(); ++k) {
        std::vector<char> removed(g.edge_count(), 0);
        for (std::size_t ei : cutsets[k]) removed[ei] = 1;
        std::vector<char> seen(g.vertex_count(), 0);
        std::vector<int> queue{x};
        seen[x] = 1;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            int v = queue[head];
            for (std::size_t ei = 0; ei < g.edge_count(); ++ei) {
                if (removed[ei]) continue;
                const Edge& e = g.edges()[ei];
                int other = -1;
                if (e.u == v) other = e.v;
                else if (e.v == v) other = e.u;
                if (other >= 0 && !seen[other]) {
                    seen[other] = 1;
                    queue.push_back(other);
                }
            }
        }
        require(!seen[y], ErrorCode::NotACutset,
                "cutset " + std::to_string(k) + " does not separate the endpoints");
    }

    double bound = 0.0;
    for (const auto& cs : cutsets) {
        double w = 0.0;
        for (std::size_t ei : cs) w += g.edges()[ei].w;
        bound += 1.0 / w;
    }
    return bound;
}

std::vector<double> tree_resistance_from(const WeightedGraph& g, int src) {
    require(g.is_tree(), ErrorCode::InvalidParameters, "graph is not a tree");
    g.check_vertex(src, "source");
    int n = g.vertex_count();
    std::vector<double> dist(n, -1.0);
    std::vector<int> queue{src};
    dist[src] = 0.0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        int v = queue[head];
        auto nbrs = g.neighbors(v);
        auto ws = g.neighbor_weights(v);
        for (std::size_t k = 0; k < nbrs.size(); ++k) {
            if (dist[nbrs[k]] < 0.0) {
                dist[nbrs[k]] = dist[v] + 1.0 / ws[k];
                queue.push_back(nbrs[k]);
            }
        }
    }
    return dist;
}

ResistanceMetric::Diameter tree_resistance_diameter(const WeightedGraph& g) {
    std::vector<double> d0 = tree_resistance_from(g, 0);
    int a = 0;
    for (int v = 0; v < g.vertex_count(); ++v)
        if (d0[v] > d0[a]) a = v;
    std::vector<double> da = tree_resistance_from(g, a);
    int b = a;
    for (int v = 0; v < g.vertex_count(); ++v)
        if (da[v] > da[b]) b = v;
    return {da[b], std::min(a, b), std::max(a, b)};
}

} // namespace ctlab
