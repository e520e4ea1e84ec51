#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace localsim {

struct Edge {
    int u, v;  // always u < v
    bool operator==(const Edge&) const = default;
};

// Finite simple graph with optional edge orientation and optional proper
// edge coloring. Immutable after construction; neighbor lists are sorted,
// so iteration order is deterministic everywhere.
class Graph {
  public:
    Graph() = default;

    int n() const { return (int)adj_.size(); }
    int m() const { return (int)edges_.size(); }
    int degree(int u) const { return (int)adj_[u].size(); }
    int max_degree() const { return max_degree_; }

    const std::vector<int>& neighbors(int u) const { return adj_[u]; }
    const std::vector<int>& incident_edges(int u) const { return adj_eid_[u]; }
    const std::vector<Edge>& edges() const { return edges_; }

    bool has_edge(int u, int v) const { return edge_id(u, v) >= 0; }
    int edge_id(int u, int v) const;  // -1 if absent

    bool oriented() const { return !forward_.empty(); }
    bool edge_colored() const { return !ecolor_.empty(); }

    // true: oriented from edges()[e].u to edges()[e].v
    bool edge_forward(int e) const { return forward_[e] != 0; }
    int edge_color(int e) const { return ecolor_[e]; }

    // head of edge e (where the arrow points)
    int edge_head(int e) const { return forward_[e] ? edges_[e].v : edges_[e].u; }
    int edge_tail(int e) const { return forward_[e] ? edges_[e].u : edges_[e].v; }

    // successor/predecessor along the orientation; -1 if none.
    // Meaningful on oriented paths and cycles (out/in degree <= 1).
    int successor(int u) const;
    int predecessor(int u) const;

    std::vector<int> bfs_distances(int src, int cap = -1) const;

  private:
    friend class GraphBuilder;
    std::vector<std::vector<int>> adj_;
    std::vector<std::vector<int>> adj_eid_;  // adj_eid_[u][i] = edge id of (u, adj_[u][i])
    std::vector<Edge> edges_;                // sorted by (u, v)
    std::vector<uint8_t> forward_;           // empty if unoriented
    std::vector<int> ecolor_;                // empty if uncolored
    int max_degree_ = 0;
};

class GraphBuilder {
  public:
    explicit GraphBuilder(int n);
    // plain undirected edge
    GraphBuilder& add_edge(int u, int v);
    // oriented edge from -> to (whole graph becomes oriented)
    GraphBuilder& add_oriented_edge(int from, int to);
    // colored (undirected) edge; colors must form a proper edge coloring
    GraphBuilder& add_colored_edge(int u, int v, int color);
    Graph build();

  private:
    int n_;
    bool oriented_ = false, colored_ = false;
    struct Raw {
        int u, v;
        bool fwd;
        int color;
    };
    std::vector<Raw> raw_;
};

// ---- generators ------------------------------------------------------

Graph make_cycle(int n);  // oriented i -> i+1 (mod n); n >= 3
Graph make_path(int n);   // oriented i -> i+1; n >= 1
// root has delta children, every other internal node delta-1 children,
// `layers` levels below the root; edges properly delta-colored
Graph make_branching_tree(int delta, int layers);
Graph make_random_regular(int n, int delta, uint64_t seed);
// n nodes, up to m random edges, max degree bounded by delta
Graph make_random_bounded_degree(int n, int delta, int m, uint64_t seed);

struct GenParams {
    int n = 0;
    int delta = 0;
    int layers = 0;
    int m = 0;
};
Graph generate(const std::string& family, const GenParams& p, uint64_t seed);

// ---- derived graphs --------------------------------------------------

// same node set; u~v iff 1 <= dist_g(u,v) <= r
Graph power_graph(const Graph& g, int r);

// induced subgraph on `keep` (indices into g); out_map[i] = original node
Graph induced_subgraph(const Graph& g, const std::vector<int>& keep);

// ---- text format -----------------------------------------------------
// line 1: "n m [directed] [edgecolored]"; then m lines "u v [color]"
// (0-based endpoints; for directed graphs the line is "from to").
std::string write_graph(const Graph& g);
Graph read_graph(const std::string& text);

}  // namespace localsim
