// Test-only independent oracles: brute force reimplementations kept apart
// from the library code paths they check.
#pragma once

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "localsim/graph.hpp"

namespace oracle {

using localsim::Edge;
using localsim::Graph;
using localsim::GraphBuilder;

// all-pairs distances by per-node BFS over an adjacency list built here
inline std::vector<std::vector<int>> all_pairs_distances(const Graph& g) {
    int n = g.n();
    std::vector<std::vector<int>> d(n, std::vector<int>(n, -1));
    for (int s = 0; s < n; ++s) {
        std::vector<int> q{s};
        d[s][s] = 0;
        for (size_t at = 0; at < q.size(); ++at) {
            int u = q[at];
            for (int v : g.neighbors(u))
                if (d[s][v] < 0) {
                    d[s][v] = d[s][u] + 1;
                    q.push_back(v);
                }
        }
    }
    return d;
}

// nodes within distance r of u
inline std::set<int> ball_nodes(const Graph& g, int u, int r) {
    auto d = all_pairs_distances(g);
    std::set<int> out;
    for (int v = 0; v < g.n(); ++v)
        if (d[u][v] >= 0 && d[u][v] <= r) out.insert(v);
    return out;
}

// the defining sentence of maximal independent set, straight off adjacency
inline bool mis_sentence(const Graph& g, const std::vector<int64_t>& sel) {
    for (int u = 0; u < g.n(); ++u) {
        bool any = false;
        for (int v : g.neighbors(u)) {
            if (sel[u] == 1 && sel[v] == 1) return false;
            any = any || sel[v] == 1;
        }
        if (sel[u] == 0 && !any) return false;
    }
    return true;
}

inline bool coloring_sentence(const Graph& g, const std::vector<int64_t>& col) {
    for (const Edge& e : g.edges())
        if (col[e.u] == col[e.v]) return false;
    return true;
}

// per-node validity of the sentences (for violation-set comparisons)
inline bool mis_ok_at(const Graph& g, const std::vector<int64_t>& sel, int u) {
    bool any = false;
    for (int v : g.neighbors(u)) {
        if (sel[u] == 1 && sel[v] == 1) return false;
        any = any || sel[v] == 1;
    }
    return sel[u] == 1 || any;
}

inline bool coloring_ok_at(const Graph& g, const std::vector<int64_t>& col, int u) {
    for (int v : g.neighbors(u))
        if (col[u] == col[v]) return false;
    return true;
}

// uniform random simple graph on n nodes with edge probability ~p
inline Graph random_graph(int n, double p, uint64_t seed) {
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + 12345);
    std::bernoulli_distribution coin(p);
    GraphBuilder b(n);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (coin(rng)) b.add_edge(u, v);
    return b.build();
}

// every labeled graph on n nodes (n small), as edge masks
inline std::vector<Graph> all_graphs(int n) {
    std::vector<std::pair<int, int>> pairs;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) pairs.push_back({u, v});
    std::vector<Graph> out;
    for (uint64_t mask = 0; mask < (1ULL << pairs.size()); ++mask) {
        GraphBuilder b(n);
        for (size_t i = 0; i < pairs.size(); ++i)
            if ((mask >> i) & 1) b.add_edge(pairs[i].first, pairs[i].second);
        out.push_back(b.build());
    }
    return out;
}

}  // namespace oracle
