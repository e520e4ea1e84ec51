#include "localsim/decomposition.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>

#include "json.hpp"
#include "localsim/util.hpp"

namespace localsim {

std::string NetworkDecomposition::to_json() const {
    nlohmann::json j;
    j["c"] = c;
    j["d"] = d;
    j["kind"] = weak ? "weak" : "strong";
    j["color"] = color;
    j["cluster"] = cluster;
    return j.dump();
}

NetworkDecomposition NetworkDecomposition::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    NetworkDecomposition nd;
    nd.c = j.at("c").get<int>();
    nd.d = j.at("d").get<int>();
    nd.weak = j.at("kind").get<std::string>() == "weak";
    nd.color = j.at("color").get<std::vector<int>>();
    nd.cluster = j.at("cluster").get<std::vector<int>>();
    return nd;
}

// ---- sequential ball carving ---------------------------------------------

NetworkDecomposition ball_carving_sequential(const Graph& g, CarveStats* stats) {
    int n = g.n();
    NetworkDecomposition nd;
    nd.color.assign(n, -1);
    nd.cluster.assign(n, -1);
    nd.weak = false;

    std::vector<char> pool(n, 1);  // nodes not yet clustered (any phase)
    int remaining = n;
    int next_cluster = 0;
    int phase = 0;
    while (remaining > 0) {
        // this phase works on the pool; carved and killed nodes leave it,
        // killed ones return in the next phase
        std::vector<char> active = pool;
        std::vector<char> killed_now(n, 0);
        int clustered_count = 0, killed_count = 0;
        for (int u = 0; u < n; ++u) {
            if (!active[u]) continue;
            // BFS layers inside the active set
            std::vector<int> dist(n, -1);
            std::vector<int> order;
            std::deque<int> q;
            dist[u] = 0;
            q.push_back(u);
            while (!q.empty()) {
                int x = q.front();
                q.pop_front();
                order.push_back(x);
                for (int y : g.neighbors(x))
                    if (active[y] && dist[y] < 0) {
                        dist[y] = dist[x] + 1;
                        q.push_back(y);
                    }
            }
            std::vector<int64_t> size_up_to(1, 0);  // cumulative count by radius
            for (int x : order) {
                while ((int)size_up_to.size() <= dist[x]) size_up_to.push_back(size_up_to.back());
                ++size_up_to.back();
            }
            int maxd = (int)size_up_to.size() - 1;
            int radius = maxd;  // whole component if doubling never stops
            for (int i = 0; i < maxd; ++i) {
                int64_t inner = size_up_to[i];
                int64_t outer = i + 1 <= maxd ? size_up_to[i + 1] : size_up_to[maxd];
                if (outer <= 2 * inner) {
                    radius = i;
                    break;
                }
            }
            int64_t in_ball = size_up_to[std::min(radius, maxd)];
            int64_t with_boundary =
                size_up_to[std::min(radius + 1, maxd)];
            if (with_boundary - in_ball > in_ball)
                throw std::logic_error("carve charging failed: boundary larger than ball");
            if (stats) stats->max_radius = std::max(stats->max_radius, radius);
            for (int x : order) {
                if (dist[x] <= radius) {
                    nd.color[x] = phase;
                    nd.cluster[x] = next_cluster;
                    active[x] = 0;
                    pool[x] = 0;
                    --remaining;
                    ++clustered_count;
                } else if (dist[x] == radius + 1) {
                    active[x] = 0;
                    killed_now[x] = 1;
                    ++killed_count;
                }
            }
            ++next_cluster;
        }
        if (stats) {
            stats->clustered_per_phase.push_back(clustered_count);
            stats->killed_per_phase.push_back(killed_count);
        }
        ++phase;
        if (phase > 2 * ceil_log2((uint64_t)std::max(n, 2)) + 4)
            throw std::logic_error("ball carving used too many phases");
    }
    nd.c = phase;
    if (stats) stats->phases = phase;
    // measure strong diameters
    int d = 0;
    std::map<int, std::vector<int>> members;
    for (int u = 0; u < n; ++u) members[nd.cluster[u]].push_back(u);
    for (auto& [cid, mem] : members) {
        std::set<int> inside(mem.begin(), mem.end());
        for (int s : mem) {
            std::map<int, int> dist;
            dist[s] = 0;
            std::deque<int> q{s};
            while (!q.empty()) {
                int x = q.front();
                q.pop_front();
                d = std::max(d, dist[x]);
                for (int y : g.neighbors(x))
                    if (inside.count(y) && !dist.count(y)) {
                        dist[y] = dist[x] + 1;
                        q.push_back(y);
                    }
            }
        }
    }
    nd.d = d;
    return nd;
}

// ---- deterministic distributed decomposition --------------------------------

PartialClustering distributed_carving(const Graph& g, const std::vector<uint64_t>& ids,
                                      int bits, DistDecompStats* stats) {
    int n = g.n();
    if ((int)ids.size() != n) throw std::invalid_argument("id count mismatch");
    int b = bits;
    int steps = 10 * b * std::max(1, ceil_log2((uint64_t)std::max(n, 2)));
    if (stats) {
        stats->bits = b;
        stats->steps_per_phase = steps;
    }

    std::vector<char> alive(n, 1);
    std::vector<int> cluster(n);  // cluster seed node; cluster id = ids[seed]
    for (int u = 0; u < n; ++u) cluster[u] = u;
    std::vector<int64_t> csize(n, 1);
    int deleted_total = 0;

    for (int phase = 1; phase <= b; ++phase) {
        auto active_cluster = [&](int seed) {
            // phase-th bit from the most significant of a b-bit identifier
            return ((ids[seed] >> (b - phase)) & 1) == 0;
        };
        std::map<int, int> growth_steps;
        int deleted_this_phase = 0;
        for (int step = 0; step < steps; ++step) {
            // proposals: vertex u of an inactive cluster adjacent to an
            // active cluster proposes to the adjacent active cluster of
            // minimum identifier
            std::map<int, std::vector<int>> proposals;  // seed -> proposers
            std::vector<char> proposes(n, 0);
            for (int u = 0; u < n; ++u) {
                if (!alive[u] || active_cluster(cluster[u])) continue;
                int best = -1;
                for (int v : g.neighbors(u)) {
                    if (!alive[v] || !active_cluster(cluster[v])) continue;
                    if (best < 0 || ids[cluster[v]] < ids[(size_t)best]) best = cluster[v];
                }
                if (best >= 0) {
                    proposals[best].push_back(u);
                    proposes[u] = 1;
                }
            }
            if (proposals.empty()) break;  // quiescent: remaining steps are no-ops
            for (auto& [seed, list] : proposals) {
                if ((int64_t)list.size() * 2 * b >= csize[seed]) {
                    for (int u : list) {
                        csize[cluster[u]] -= 1;
                        cluster[u] = seed;
                        csize[seed] += 1;
                    }
                    ++growth_steps[seed];
                } else {
                    for (int u : list) {
                        alive[u] = 0;
                        csize[cluster[u]] -= 1;
                        ++deleted_this_phase;
                    }
                }
            }
        }
        // the process must have quiesced: no inactive cluster vertex still
        // neighbors an active cluster
        for (int u = 0; u < n; ++u) {
            if (!alive[u] || active_cluster(cluster[u])) continue;
            for (int v : g.neighbors(u))
                if (alive[v] && active_cluster(cluster[v]))
                    throw std::logic_error("carving phase did not quiesce");
        }
        // prefix homogeneity: connected components of survivors agree on the
        // first `phase` bits
        {
            std::vector<int> comp(n, -1);
            int nc = 0;
            for (int u = 0; u < n; ++u) {
                if (!alive[u] || comp[u] >= 0) continue;
                std::deque<int> q{u};
                comp[u] = nc;
                while (!q.empty()) {
                    int x = q.front();
                    q.pop_front();
                    for (int y : g.neighbors(x))
                        if (alive[y] && comp[y] < 0) {
                            comp[y] = nc;
                            q.push_back(y);
                        }
                }
                ++nc;
            }
            std::vector<uint64_t> prefix(nc, (uint64_t)-1);
            for (int u = 0; u < n; ++u) {
                if (!alive[u]) continue;
                uint64_t p = ids[cluster[u]] >> (b - phase);
                if (prefix[comp[u]] == (uint64_t)-1)
                    prefix[comp[u]] = p;
                else if (prefix[comp[u]] != p)
                    throw std::logic_error("bit-prefix homogeneity violated");
            }
        }
        if (deleted_this_phase * 2 * (int64_t)b > n)
            throw std::logic_error("phase deleted more than n/(2b) nodes");
        deleted_total += deleted_this_phase;
        if (stats) {
            stats->deleted_per_phase.push_back(deleted_this_phase);
            for (auto& [seed, cnt] : growth_steps)
                stats->max_growth_steps = std::max(stats->max_growth_steps, cnt);
        }
    }
    (void)deleted_total;

    PartialClustering pc;
    pc.cluster.assign(n, -1);
    for (int u = 0; u < n; ++u)
        if (alive[u]) {
            pc.cluster[u] = cluster[u];
            ++pc.clustered_count;
        }
    return pc;
}

NetworkDecomposition distributed_decomposition(const Graph& g, const IdAssignment& ids,
                                               DistDecompStats* stats) {
    int n = g.n();
    int b = ceil_log2(ids.range_bound + 1);
    NetworkDecomposition nd;
    nd.color.assign(n, -1);
    nd.cluster.assign(n, -1);
    nd.weak = true;

    std::vector<int> live;
    for (int u = 0; u < n; ++u) live.push_back(u);
    int color = 0;
    int next_cluster = 0;
    while (!live.empty()) {
        Graph sub = induced_subgraph(g, live);
        std::vector<uint64_t> sub_ids(live.size());
        for (size_t i = 0; i < live.size(); ++i) sub_ids[i] = ids.ids[live[i]];
        PartialClustering pc = distributed_carving(sub, sub_ids, b, stats);
        if (stats) ++stats->carvings;
        if (2 * pc.clustered_count < (int)live.size())
            throw std::logic_error("carving clustered less than half");
        std::map<int, int> cluster_map;
        std::vector<int> next_live;
        for (size_t i = 0; i < live.size(); ++i) {
            if (pc.cluster[i] < 0) {
                next_live.push_back(live[i]);
                continue;
            }
            auto [it, fresh] = cluster_map.emplace(pc.cluster[i], next_cluster);
            if (fresh) ++next_cluster;
            nd.color[live[i]] = color;
            nd.cluster[live[i]] = it->second;
        }
        live = std::move(next_live);
        ++color;
        if (color > 2 * ceil_log2((uint64_t)std::max(n, 2)) + 4)
            throw std::logic_error("too many colors in distributed decomposition");
    }
    nd.c = color;
    // measure weak diameters
    int d = 0;
    std::map<int, std::vector<int>> members;
    for (int u = 0; u < n; ++u) members[nd.cluster[u]].push_back(u);
    for (auto& [cid, mem] : members) {
        std::set<int> inside(mem.begin(), mem.end());
        for (int s : mem) {
            auto dist = g.bfs_distances(s);
            for (int t : mem)
                if (dist[t] >= 0) d = std::max(d, dist[t]);
        }
    }
    nd.d = d;
    return nd;
}

// ---- MPX --------------------------------------------------------------------

PartialClustering mpx_clustering(const Graph& g, uint64_t seed, MpxStats* stats) {
    int n = g.n();
    int T = (int)(2 * ceil_log2((uint64_t)std::max(n, 2))) + 2;
    if (stats) stats->T = T;
    std::vector<int> head(n, 0);
    for (int u = 0; u < n; ++u) {
        uint64_t s = splitmix64(seed ^ splitmix64((uint64_t)u * 2 + 1));
        int h = 0;
        while (h < T && ((s >> h) & 1) == 1) ++h;  // geometric(1/2)
        if (h >= T && stats) ++stats->capped_headstarts;
        head[u] = std::min(h, T);
    }
    // delayed multi-source BFS; tie on (arrival, source id)
    std::vector<int> owner(n, -1), arrival(n, -1), depth(n, 0);
    using Entry = std::tuple<int, int, int>;  // (arrival, source, node)
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> pq;
    for (int u = 0; u < n; ++u) pq.push({T - head[u], u, u});
    while (!pq.empty()) {
        auto [a, s, u] = pq.top();
        pq.pop();
        if (owner[u] >= 0) continue;
        owner[u] = s;
        arrival[u] = a;
        for (int v : g.neighbors(u))
            if (owner[v] < 0) pq.push({a + 1, s, v});
    }
    for (int u = 0; u < n; ++u) depth[u] = arrival[u] - (T - head[owner[u]]);

    PartialClustering pc;
    pc.cluster.assign(n, -1);
    for (int u = 0; u < n; ++u) {
        bool interior = true;
        for (int v : g.neighbors(u)) interior = interior && owner[v] == owner[u];
        if (interior) {
            pc.cluster[u] = owner[u];
            ++pc.clustered_count;
            pc.max_diameter = std::max(pc.max_diameter, 2 * depth[u]);
        }
    }
    return pc;
}

NetworkDecomposition mpx_decomposition(const Graph& g, uint64_t seed) {
    int n = g.n();
    NetworkDecomposition nd;
    nd.color.assign(n, -1);
    nd.cluster.assign(n, -1);
    nd.weak = true;
    std::vector<int> live;
    for (int u = 0; u < n; ++u) live.push_back(u);
    int color = 0, next_cluster = 0, dmax = 0;
    while (!live.empty()) {
        Graph sub = induced_subgraph(g, live);
        PartialClustering pc = mpx_clustering(sub, splitmix64(seed + color));
        if (pc.clustered_count == 0) {
            // all nodes are boundary nodes; extremely unlikely on a residual
            // graph, but retry with a reseed instead of looping forever
            ++color;
            if (color > 30 * ceil_log2((uint64_t)std::max(n, 2)) + 30)
                throw std::runtime_error("mpx failed to make progress");
            continue;
        }
        dmax = std::max(dmax, pc.max_diameter);
        std::map<int, int> cmap;
        std::vector<int> next_live;
        for (size_t i = 0; i < live.size(); ++i) {
            if (pc.cluster[i] < 0) {
                next_live.push_back(live[i]);
                continue;
            }
            auto [it, fresh] = cmap.emplace(pc.cluster[i], next_cluster);
            if (fresh) ++next_cluster;
            nd.color[live[i]] = color;
            nd.cluster[live[i]] = it->second;
        }
        live = std::move(next_live);
        ++color;
    }
    nd.c = color;
    nd.d = dmax;
    return nd;
}

// ---- validation ---------------------------------------------------------------

CheckReport validate_decomposition(const Graph& g, const NetworkDecomposition& nd) {
    CheckReport rep;
    int n = g.n();
    if ((int)nd.color.size() != n || (int)nd.cluster.size() != n) {
        rep.valid = false;
        rep.violations.push_back({-1, "size mismatch"});
        return rep;
    }
    for (int u = 0; u < n; ++u)
        if (nd.color[u] < 0 || nd.color[u] >= nd.c || nd.cluster[u] < 0)
            rep.violations.push_back({u, "node without (color, cluster)"});
    for (const Edge& e : g.edges())
        if (nd.color[e.u] == nd.color[e.v] && nd.cluster[e.u] != nd.cluster[e.v])
            rep.violations.push_back({e.u, "same-color clusters are adjacent"});
    std::map<int, std::vector<int>> members;
    for (int u = 0; u < n; ++u) members[nd.cluster[u]].push_back(u);
    for (auto& [cid, mem] : members) {
        if (nd.weak) {
            for (int s : mem) {
                auto dist = g.bfs_distances(s);
                for (int t : mem) {
                    if (dist[t] < 0)
                        rep.violations.push_back({s, "cluster pair in different components"});
                    else if (dist[t] > nd.d)
                        rep.violations.push_back({s, "weak diameter exceeds bound"});
                }
            }
        } else {
            std::set<int> inside(mem.begin(), mem.end());
            for (int s : mem) {
                std::map<int, int> dist;
                dist[s] = 0;
                std::deque<int> q{s};
                int reached = 0;
                while (!q.empty()) {
                    int x = q.front();
                    q.pop_front();
                    ++reached;
                    if (dist[x] > nd.d)
                        rep.violations.push_back({s, "strong diameter exceeds bound"});
                    for (int y : g.neighbors(x))
                        if (inside.count(y) && !dist.count(y)) {
                            dist[y] = dist[x] + 1;
                            q.push_back(y);
                        }
                }
                if (reached != (int)mem.size())
                    rep.violations.push_back({s, "cluster is disconnected"});
            }
        }
    }
    rep.valid = rep.violations.empty();
    return rep;
}

CheckReport validate_partial(const Graph& g, const PartialClustering& pc) {
    CheckReport rep;
    for (const Edge& e : g.edges())
        if (pc.cluster[e.u] >= 0 && pc.cluster[e.v] >= 0 && pc.cluster[e.u] != pc.cluster[e.v])
            rep.violations.push_back({e.u, "clusters are adjacent"});
    rep.valid = rep.violations.empty();
    return rep;
}

}  // namespace localsim
