#include "localsim/graph.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "localsim/util.hpp"

namespace localsim {

int Graph::edge_id(int u, int v) const {
    if (u == v) return -1;
    const auto& a = adj_[u];
    auto it = std::lower_bound(a.begin(), a.end(), v);
    if (it == a.end() || *it != v) return -1;
    return adj_eid_[u][it - a.begin()];
}

int Graph::successor(int u) const {
    if (!oriented()) throw std::logic_error("successor: graph is not oriented");
    for (int e : adj_eid_[u])
        if (edge_tail(e) == u) return edge_head(e);
    return -1;
}

int Graph::predecessor(int u) const {
    if (!oriented()) throw std::logic_error("predecessor: graph is not oriented");
    for (int e : adj_eid_[u])
        if (edge_head(e) == u) return edge_tail(e);
    return -1;
}

std::vector<int> Graph::bfs_distances(int src, int cap) const {
    std::vector<int> dist(n(), -1);
    std::deque<int> q;
    dist[src] = 0;
    q.push_back(src);
    while (!q.empty()) {
        int u = q.front();
        q.pop_front();
        if (cap >= 0 && dist[u] >= cap) continue;
        for (int v : adj_[u])
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                q.push_back(v);
            }
    }
    return dist;
}

GraphBuilder::GraphBuilder(int n) : n_(n) {
    if (n < 0) throw std::invalid_argument("negative node count");
}

GraphBuilder& GraphBuilder::add_edge(int u, int v) {
    raw_.push_back({u, v, true, -1});
    return *this;
}

GraphBuilder& GraphBuilder::add_oriented_edge(int from, int to) {
    oriented_ = true;
    raw_.push_back({from, to, true, -1});
    return *this;
}

GraphBuilder& GraphBuilder::add_colored_edge(int u, int v, int color) {
    colored_ = true;
    raw_.push_back({u, v, true, color});
    return *this;
}

Graph GraphBuilder::build() {
    Graph g;
    g.adj_.assign(n_, {});
    g.adj_eid_.assign(n_, {});

    struct Norm {
        int u, v;
        bool fwd;
        int color;
    };
    std::vector<Norm> norm;
    norm.reserve(raw_.size());
    for (const Raw& r : raw_) {
        if (r.u < 0 || r.u >= n_ || r.v < 0 || r.v >= n_)
            throw std::invalid_argument("edge endpoint out of range");
        if (r.u == r.v) throw std::invalid_argument("self loop");
        int a = std::min(r.u, r.v), b = std::max(r.u, r.v);
        norm.push_back({a, b, r.u == a, r.color});
    }
    std::sort(norm.begin(), norm.end(), [](const Norm& x, const Norm& y) {
        return std::pair(x.u, x.v) < std::pair(y.u, y.v);
    });
    for (size_t i = 1; i < norm.size(); ++i)
        if (norm[i].u == norm[i - 1].u && norm[i].v == norm[i - 1].v)
            throw std::invalid_argument("multi edge");

    for (const Norm& e : norm) {
        int id = (int)g.edges_.size();
        g.edges_.push_back({e.u, e.v});
        if (oriented_) g.forward_.push_back(e.fwd ? 1 : 0);
        if (colored_) {
            if (e.color < 0) throw std::invalid_argument("missing edge color");
            g.ecolor_.push_back(e.color);
        }
        g.adj_[e.u].push_back(e.v);
        g.adj_eid_[e.u].push_back(id);
        g.adj_[e.v].push_back(e.u);
        g.adj_eid_[e.v].push_back(id);
    }
    for (int u = 0; u < n_; ++u) {
        // co-sort neighbor list and edge ids
        std::vector<int> idx(g.adj_[u].size());
        for (size_t i = 0; i < idx.size(); ++i) idx[i] = (int)i;
        std::sort(idx.begin(), idx.end(),
                  [&](int a, int b) { return g.adj_[u][a] < g.adj_[u][b]; });
        std::vector<int> a2(idx.size());
        std::vector<int> e2(idx.size());
        for (size_t i = 0; i < idx.size(); ++i) {
            a2[i] = g.adj_[u][idx[i]];
            e2[i] = g.adj_eid_[u][idx[i]];
        }
        g.adj_[u] = std::move(a2);
        g.adj_eid_[u] = std::move(e2);
        g.max_degree_ = std::max(g.max_degree_, (int)g.adj_[u].size());
    }
    if (colored_) {
        for (int u = 0; u < n_; ++u) {
            std::set<int> seen;
            for (int e : g.adj_eid_[u])
                if (!seen.insert(g.ecolor_[e]).second)
                    throw std::invalid_argument("edge coloring not proper");
        }
    }
    return g;
}

Graph make_cycle(int n) {
    if (n < 3) throw std::invalid_argument("cycle needs n >= 3");
    GraphBuilder b(n);
    for (int i = 0; i < n; ++i) b.add_oriented_edge(i, (i + 1) % n);
    return b.build();
}

Graph make_path(int n) {
    if (n < 1) throw std::invalid_argument("path needs n >= 1");
    GraphBuilder b(n);
    for (int i = 0; i + 1 < n; ++i) b.add_oriented_edge(i, i + 1);
    return b.build();
}

Graph make_branching_tree(int delta, int layers) {
    if (delta < 2) throw std::invalid_argument("branching tree needs delta >= 2");
    if (layers < 0) throw std::invalid_argument("negative layer count");
    // grow level by level; node 0 is the root
    std::vector<std::pair<int, int>> frontier;  // (node, parent edge color), root color = 0 sentinel
    struct Pending {
        int u, v, color;
    };
    std::vector<Pending> edges;
    int next = 1;
    frontier.push_back({0, 0});
    for (int layer = 0; layer < layers; ++layer) {
        std::vector<std::pair<int, int>> nf;
        for (auto [u, pcol] : frontier) {
            int children = (u == 0) ? delta : delta - 1;
            int color = 1;
            for (int c = 0; c < children; ++c) {
                while (color == pcol) ++color;
                edges.push_back({u, next, color});
                nf.push_back({next, color});
                ++next;
                ++color;
            }
        }
        frontier = std::move(nf);
    }
    GraphBuilder b(next);
    for (const Pending& e : edges) b.add_colored_edge(e.u, e.v, e.color);
    return b.build();
}

Graph make_random_regular(int n, int delta, uint64_t seed) {
    if (n <= delta) throw std::invalid_argument("random regular needs n > delta");
    if ((int64_t)n * delta % 2 != 0) throw std::invalid_argument("n*delta must be even");
    std::mt19937_64 rng(splitmix64(seed ^ 0x5eedULL));
    // configuration model with whole-matching restarts on collisions
    for (int attempt = 0; attempt < 1000; ++attempt) {
        std::vector<int> points(n * delta);
        for (int i = 0; i < n * delta; ++i) points[i] = i / delta;
        std::shuffle(points.begin(), points.end(), rng);
        std::set<std::pair<int, int>> used;
        bool ok = true;
        for (size_t i = 0; i < points.size(); i += 2) {
            int u = points[i], v = points[i + 1];
            if (u == v) {
                ok = false;
                break;
            }
            if (!used.insert({std::min(u, v), std::max(u, v)}).second) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        GraphBuilder b(n);
        for (const auto& [u, v] : used) b.add_edge(u, v);
        return b.build();
    }
    throw std::runtime_error("random regular generation did not converge");
}

Graph make_random_bounded_degree(int n, int delta, int m, uint64_t seed) {
    if (n < 1 || delta < 0 || m < 0) throw std::invalid_argument("bad parameters");
    std::mt19937_64 rng(splitmix64(seed ^ 0xb0dedULL));
    std::uniform_int_distribution<int> pick(0, n - 1);
    std::set<std::pair<int, int>> used;
    std::vector<int> deg(n, 0);
    int added = 0, stall = 0;
    while (added < m && stall < 50 * (m + 1)) {
        int u = pick(rng), v = pick(rng);
        if (u == v || deg[u] >= delta || deg[v] >= delta) {
            ++stall;
            continue;
        }
        auto key = std::pair(std::min(u, v), std::max(u, v));
        if (!used.insert(key).second) {
            ++stall;
            continue;
        }
        ++deg[u];
        ++deg[v];
        ++added;
        stall = 0;
    }
    GraphBuilder b(n);
    for (const auto& [u, v] : used) b.add_edge(u, v);
    return b.build();
}

Graph generate(const std::string& family, const GenParams& p, uint64_t seed) {
    if (family == "cycle") return make_cycle(p.n);
    if (family == "path") return make_path(p.n);
    if (family == "branching_tree") return make_branching_tree(p.delta, p.layers);
    if (family == "random_regular") return make_random_regular(p.n, p.delta, seed);
    if (family == "random_bounded_degree")
        return make_random_bounded_degree(p.n, p.delta, p.m, seed);
    throw std::invalid_argument("unknown graph family: " + family);
}

Graph power_graph(const Graph& g, int r) {
    if (r < 1) throw std::invalid_argument("power_graph needs r >= 1");
    GraphBuilder b(g.n());
    for (int u = 0; u < g.n(); ++u) {
        auto dist = g.bfs_distances(u, r);
        for (int v = u + 1; v < g.n(); ++v)
            if (dist[v] >= 1 && dist[v] <= r) b.add_edge(u, v);
    }
    return b.build();
}

Graph induced_subgraph(const Graph& g, const std::vector<int>& keep) {
    std::vector<int> inv(g.n(), -1);
    for (size_t i = 0; i < keep.size(); ++i) inv[keep[i]] = (int)i;
    GraphBuilder b((int)keep.size());
    for (const Edge& e : g.edges())
        if (inv[e.u] >= 0 && inv[e.v] >= 0) b.add_edge(inv[e.u], inv[e.v]);
    return b.build();
}

std::string write_graph(const Graph& g) {
    std::ostringstream os;
    os << g.n() << ' ' << g.m();
    if (g.oriented()) os << " directed";
    if (g.edge_colored()) os << " edgecolored";
    os << '\n';
    for (int e = 0; e < g.m(); ++e) {
        int u = g.edges()[e].u, v = g.edges()[e].v;
        if (g.oriented() && !g.edge_forward(e)) std::swap(u, v);
        os << u << ' ' << v;
        if (g.edge_colored()) os << ' ' << g.edge_color(e);
        os << '\n';
    }
    return os.str();
}

Graph read_graph(const std::string& text) {
    std::istringstream is(text);
    std::string header;
    if (!std::getline(is, header)) throw std::invalid_argument("empty graph file");
    std::istringstream hs(header);
    int n, m;
    if (!(hs >> n >> m)) throw std::invalid_argument("bad graph header");
    bool directed = false, colored = false;
    std::string flag;
    while (hs >> flag) {
        if (flag == "directed")
            directed = true;
        else if (flag == "edgecolored")
            colored = true;
        else
            throw std::invalid_argument("unknown graph flag: " + flag);
    }
    GraphBuilder b(n);
    for (int i = 0; i < m; ++i) {
        int u, v;
        if (!(is >> u >> v)) throw std::invalid_argument("truncated edge list");
        if (colored) {
            int c;
            if (!(is >> c)) throw std::invalid_argument("missing edge color");
            b.add_colored_edge(u, v, c);
        } else if (directed) {
            b.add_oriented_edge(u, v);
        } else {
            b.add_edge(u, v);
        }
    }
    return b.build();
}

}  // namespace localsim
