#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "ctlab/graph.hpp"

namespace ctlab {

struct ResistanceOptions {
    int dense_cap = 4000;      // max vertex count for the full-table solve
    double residual_tol = 1e-9;
    double cg_tol = 1e-10;
    int cg_max_iter = 200000;
    // Closed-ball membership slack: radii computed by independent arithmetic
    // can sit exactly on a ball boundary, so R <= r is tested with this much
    // absolute headroom.
    double ball_tol = 1e-9;
};

// Effective resistance metric. Dense mode holds the full pairwise table
// (from one SPD factorization of the deflated Laplacian); per-pair mode
// answers single queries with a conjugate-gradient solve on the grounded
// Laplacian and caches results.
class ResistanceMetric {
  public:
    static ResistanceMetric dense(const WeightedGraph& g, const ResistanceOptions& opt = {});
    static ResistanceMetric per_pair(const WeightedGraph& g, const ResistanceOptions& opt = {});

    double resistance(int x, int y) const;
    double operator()(int x, int y) const { return resistance(x, y); }

    int vertex_count() const { return g_.vertex_count(); }
    const WeightedGraph& graph() const { return g_; }
    bool has_table() const { return table_.size() > 0; }
    const Eigen::MatrixXd& table() const;

    struct Diameter {
        double value = 0.0;
        int x = 0;
        int y = 0;
    };
    // Max over all pairs with a witness pair. Needs the dense table.
    Diameter diameter() const;

    // Smallest strictly positive pairwise resistance. Needs the dense table
    // and at least two vertices.
    double min_positive() const;

    // Closed ball {y : R(x,y) <= r}, ascending vertex ids. Needs the table.
    std::vector<int> ball(int x, double r) const;

  private:
    ResistanceMetric() = default;

    WeightedGraph g_ = WeightedGraph::trivial();  // owned copy; metrics outlive callers' temporaries
    ResistanceOptions opt_;
    Eigen::MatrixXd table_;  // empty in per-pair mode
    mutable std::vector<std::vector<double>> cache_;  // per-pair mode, keyed [x][y], NaN = unknown
};

// Green kernel rooted at a vertex: C(x,y) = (R(root,x)+R(root,y)-R(x,y))/2.
// Row and column of the root are identically zero.
struct GreenKernel {
    int root = 0;
    Eigen::MatrixXd c;  // n x n

    double operator()(int x, int y) const { return c(x, y); }
};

GreenKernel green_kernel(const ResistanceMetric& m, int root);

// Lower bound on R(x,y) from pairwise-disjoint edge cutsets, each separating
// x from y: sum over cutsets of the reciprocal total weight. Cutsets are
// given as indices into g.edges(). Exact on a tree when the cutsets are the
// single path edges.
double nash_williams_bound(const WeightedGraph& g, int x, int y,
                           const std::vector<std::vector<std::size_t>>& cutsets);

// Tree fast paths: on a tree the resistance metric is the path sum of 1/w.
std::vector<double> tree_resistance_from(const WeightedGraph& g, int src);
ResistanceMetric::Diameter tree_resistance_diameter(const WeightedGraph& g);

} // namespace ctlab
