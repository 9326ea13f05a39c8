#include "ctlab/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace ctlab {

WeightedGraph WeightedGraph::build(int n, std::vector<Edge> edges) {
    require(n >= 1, ErrorCode::InvalidParameters, "vertex count must be >= 1");
    require(!edges.empty(), ErrorCode::EmptyGraph, "edge list is empty");

    for (Edge& e : edges) {
        require(e.u >= 0 && e.u < n, ErrorCode::InvalidVertex,
                "edge endpoint " + std::to_string(e.u) + " outside [0," + std::to_string(n) + ")");
        require(e.v >= 0 && e.v < n, ErrorCode::InvalidVertex,
                "edge endpoint " + std::to_string(e.v) + " outside [0," + std::to_string(n) + ")");
        require(e.u != e.v, ErrorCode::SelfLoop, "self loop at vertex " + std::to_string(e.u));
        require(e.w > 0.0 && std::isfinite(e.w), ErrorCode::NonPositiveWeight,
                "weight " + std::to_string(e.w) + " on edge (" + std::to_string(e.u) + "," +
                    std::to_string(e.v) + ")");
        if (e.u > e.v) std::swap(e.u, e.v);
    }
    std::sort(edges.begin(), edges.end(),
              [](const Edge& a, const Edge& b) { return std::pair(a.u, a.v) < std::pair(b.u, b.v); });
    for (std::size_t i = 1; i < edges.size(); ++i) {
        require(edges[i - 1].u != edges[i].u || edges[i - 1].v != edges[i].v,
                ErrorCode::DuplicateEdge,
                "duplicate edge (" + std::to_string(edges[i].u) + "," + std::to_string(edges[i].v) + ")");
    }

    WeightedGraph g;
    g.n_ = n;
    g.edges_ = std::move(edges);

    std::vector<int> deg(n, 0);
    for (const Edge& e : g.edges_) {
        ++deg[e.u];
        ++deg[e.v];
    }
    g.offset_.assign(n + 1, 0);
    for (int v = 0; v < n; ++v) g.offset_[v + 1] = g.offset_[v] + deg[v];
    g.adj_.resize(g.offset_[n]);
    g.adj_w_.resize(g.offset_[n]);
    std::vector<std::size_t> cursor(g.offset_.begin(), g.offset_.end() - 1);
    for (const Edge& e : g.edges_) {
        g.adj_[cursor[e.u]] = e.v;
        g.adj_w_[cursor[e.u]++] = e.w;
        g.adj_[cursor[e.v]] = e.u;
        g.adj_w_[cursor[e.v]++] = e.w;
    }

    g.strength_.assign(n, 0.0);
    for (const Edge& e : g.edges_) {
        g.strength_[e.u] += e.w;
        g.strength_[e.v] += e.w;
    }
    g.volume_ = 0.0;
    for (double s : g.strength_) g.volume_ += s;

    std::vector<int> dist = bfs_distances(g, 0);
    for (int v = 0; v < n; ++v)
        require(dist[v] >= 0, ErrorCode::DisconnectedGraph,
                "vertex " + std::to_string(v) + " unreachable from 0");
    return g;
}

WeightedGraph WeightedGraph::trivial() {
    WeightedGraph g;
    g.n_ = 1;
    g.offset_.assign(2, 0);
    g.strength_.assign(1, 0.0);
    g.volume_ = 0.0;
    return g;
}

bool WeightedGraph::same_graph(const WeightedGraph& other) const {
    if (n_ != other.n_ || edges_.size() != other.edges_.size()) return false;
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        const Edge& a = edges_[i];
        const Edge& b = other.edges_[i];
        if (a.u != b.u || a.v != b.v || a.w != b.w) return false;
    }
    return true;
}

std::vector<int> bfs_distances(const WeightedGraph& g, int src) {
    g.check_vertex(src, "bfs source");
    std::vector<int> dist(g.vertex_count(), -1);
    std::vector<int> queue;
    queue.reserve(g.vertex_count());
    dist[src] = 0;
    queue.push_back(src);
    for (std::size_t head = 0; head < queue.size(); ++head) {
        int v = queue[head];
        for (int u : g.neighbors(v)) {
            if (dist[u] < 0) {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    return dist;
}

int graph_distance(const WeightedGraph& g, int x, int y) {
    g.check_vertex(x, "vertex");
    g.check_vertex(y, "vertex");
    if (x == y) return 0;
    std::vector<int> dist = bfs_distances(g, x);
    return dist[y];
}

std::pair<int, int> bfs_double_sweep(const WeightedGraph& g) {
    std::vector<int> d0 = bfs_distances(g, 0);
    int a = 0;
    for (int v = 0; v < g.vertex_count(); ++v)
        if (d0[v] > d0[a]) a = v;
    std::vector<int> da = bfs_distances(g, a);
    int b = a;
    for (int v = 0; v < g.vertex_count(); ++v)
        if (da[v] > da[b]) b = v;
    return {a, b};
}

std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

std::string format_graph(const WeightedGraph& g) {
    std::string out;
    out += std::to_string(g.vertex_count());
    out += ' ';
    out += std::to_string(g.edge_count());
    out += '\n';
    for (const Edge& e : g.edges()) {
        out += std::to_string(e.u);
        out += ' ';
        out += std::to_string(e.v);
        out += ' ';
        out += format_double(e.w);
        out += '\n';
    }
    return out;
}

namespace {

// Whitespace-separated tokens of one line; empty vector for blank lines.
std::vector<std::string> split_tokens(const std::string& line) {
    std::vector<std::string> toks;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        if (j > i) toks.emplace_back(line.substr(i, j - i));
        i = j;
    }
    return toks;
}

long parse_int(const std::string& tok, const char* what) {
    long value = 0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    require(res.ec == std::errc() && res.ptr == tok.data() + tok.size(), ErrorCode::MalformedFile,
            std::string("bad ") + what + " token '" + tok + "'");
    return value;
}

double parse_weight(const std::string& tok) {
    double value = 0.0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    require(res.ec == std::errc() && res.ptr == tok.data() + tok.size(), ErrorCode::MalformedFile,
            "bad weight token '" + tok + "'");
    return value;
}

} // namespace

WeightedGraph parse_graph(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), ErrorCode::MalformedFile, "missing header line");
    std::vector<std::string> head = split_tokens(line);
    require(head.size() == 2, ErrorCode::MalformedFile, "header must be 'n m'");
    long n = parse_int(head[0], "vertex count");
    long m = parse_int(head[1], "edge count");
    require(n >= 1 && m >= 0, ErrorCode::MalformedFile, "header counts out of range");

    std::vector<Edge> edges;
    edges.reserve((std::size_t)m);
    while (std::getline(in, line)) {
        std::vector<std::string> toks = split_tokens(line);
        if (toks.empty()) continue;
        require(toks.size() == 3, ErrorCode::MalformedFile, "edge line must be 'u v w'");
        Edge e;
        e.u = (int)parse_int(toks[0], "vertex id");
        e.v = (int)parse_int(toks[1], "vertex id");
        e.w = parse_weight(toks[2]);
        edges.push_back(e);
    }
    require((long)edges.size() == m, ErrorCode::MalformedFile,
            "edge count mismatch: header says " + std::to_string(m) + ", file has " +
                std::to_string(edges.size()));
    if (m == 0) {
        require(n == 1, ErrorCode::MalformedFile, "no edges is only valid for a single vertex");
        return WeightedGraph::trivial();
    }
    return WeightedGraph::build((int)n, std::move(edges));
}

void write_graph(const WeightedGraph& g, const std::string& path) {
    std::string text = format_graph(g);
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        require(out.good(), ErrorCode::IoFailure, "cannot open " + tmp + " for writing");
        out.write(text.data(), (std::streamsize)text.size());
        require(out.good(), ErrorCode::IoFailure, "short write to " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    require(!ec, ErrorCode::IoFailure, "rename " + tmp + " -> " + path + " failed: " + ec.message());
}

WeightedGraph read_graph(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), ErrorCode::IoFailure, "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    require(!in.bad(), ErrorCode::IoFailure, "read failure on " + path);
    return parse_graph(buf.str());
}

} // namespace ctlab
