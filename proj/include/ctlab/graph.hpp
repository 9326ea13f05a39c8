#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ctlab/errors.hpp"

namespace ctlab {

struct Edge {
    int u = 0;
    int v = 0;
    double w = 1.0;
};

// Connected weighted multigraph-free graph, immutable after construction.
// Edge weights are conductances; vertex strength mu_x is the sum of incident
// weights and volume() = sum_x mu_x (twice the total edge weight).
class WeightedGraph {
  public:
    // Validates and normalizes: ids in [0,n), no self loops, no duplicate
    // pairs, strictly positive weights, connected. Edges are stored sorted by
    // (min,max) endpoint pair.
    static WeightedGraph build(int n, std::vector<Edge> edges);

    // Single vertex, no edges. Degenerate but connected; volume 0.
    static WeightedGraph trivial();

    int vertex_count() const { return n_; }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<Edge>& edges() const { return edges_; }

    double volume() const { return volume_; }
    double strength(int v) const { return strength_[v]; }

    std::span<const int> neighbors(int v) const {
        return {adj_.data() + offset_[v], adj_.data() + offset_[v + 1]};
    }
    std::span<const double> neighbor_weights(int v) const {
        return {adj_w_.data() + offset_[v], adj_w_.data() + offset_[v + 1]};
    }
    int degree(int v) const { return (int)(offset_[v + 1] - offset_[v]); }

    bool is_tree() const { return edges_.size() + 1 == (std::size_t)n_; }

    // Structural equality up to edge ordering (weights compared exactly).
    bool same_graph(const WeightedGraph& other) const;

    void check_vertex(int v, const char* what) const {
        require(v >= 0 && v < n_, ErrorCode::InvalidVertex,
                std::string(what) + " id " + std::to_string(v) + " outside [0," +
                    std::to_string(n_) + ")");
    }

  private:
    WeightedGraph() = default;

    int n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::size_t> offset_;
    std::vector<int> adj_;
    std::vector<double> adj_w_;
    std::vector<double> strength_;
    double volume_ = 0.0;
};

// Hop metric. BFS; distance is edge count, ignoring weights.
std::vector<int> bfs_distances(const WeightedGraph& g, int src);
int graph_distance(const WeightedGraph& g, int x, int y);

// Pseudo-diameter endpoints from a BFS double sweep started at vertex 0.
std::pair<int, int> bfs_double_sweep(const WeightedGraph& g);

// Edge-list text format. Line 1: "n m". Then m lines "u v w" with 0-based
// ids and shortest round-trip decimal weights, LF line endings, edges in
// sorted (u,v) order.
std::string format_graph(const WeightedGraph& g);
WeightedGraph parse_graph(const std::string& text);
void write_graph(const WeightedGraph& g, const std::string& path);
WeightedGraph read_graph(const std::string& path);

// Shortest decimal string that parses back to exactly x.
std::string format_double(double x);

} // namespace ctlab
