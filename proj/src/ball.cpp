#include "localsim/ball.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <stdexcept>

#include "localsim/util.hpp"

namespace localsim {

std::pair<int, int> Ball::edge_between(int i, int j) const {
    int a = std::min(i, j), b = std::max(i, j);
    for (const BallEdge& e : edges_)
        if (e.u == a && e.v == b) {
            int dir = e.dir;
            if (i != a) dir = -dir;
            return {dir, e.color};
        }
    throw std::out_of_range("no such edge in ball");
}

std::vector<int> Ball::nodes_at(int d) const {
    if (d < 0 || d > radius_)
        throw std::out_of_range("locality violation: queried distance beyond ball radius");
    std::vector<int> out;
    for (int i = 0; i < size(); ++i)
        if (dist_[i] == d) out.push_back(i);
    return out;
}

int Ball::successor(int i) const {
    for (int j : adj_.at(i))
        if (edge_between(i, j).first == 1) return j;
    return -1;
}

int Ball::predecessor(int i) const {
    for (int j : adj_.at(i))
        if (edge_between(i, j).first == -1) return j;
    return -1;
}

namespace {

uint64_t label_hash(const NodeLabel& l) {
    uint64_t h = 0x1abe1ULL;
    h = hash_combine(h, (uint64_t)(l.id + 1));
    h = hash_combine(h, (uint64_t)l.bit_count);
    int words = (l.bit_count + 63) / 64;
    for (int w = 0; w < words; ++w) {
        uint64_t word = l.bits[w];
        int used = std::min(64, l.bit_count - w * 64);
        if (used < 64) word &= ~((~0ULL) >> used);
        h = hash_combine(h, word);
    }
    h = hash_combine(h, (uint64_t)l.values.size());
    for (int64_t v : l.values) h = hash_combine(h, (uint64_t)v);
    return h;
}

void append_label(std::vector<uint64_t>& enc, const NodeLabel& l) {
    enc.push_back((uint64_t)(l.id + 1));
    enc.push_back((uint64_t)l.bit_count);
    int words = (l.bit_count + 63) / 64;
    for (int w = 0; w < words; ++w) {
        uint64_t word = l.bits[w];
        int used = std::min(64, l.bit_count - w * 64);
        if (used < 64) word &= ~((~0ULL) >> used);
        enc.push_back(word);
    }
    enc.push_back((uint64_t)l.values.size());
    for (int64_t v : l.values) enc.push_back((uint64_t)v);
}

struct Canonicalizer {
    const RawBall& raw;
    int k;
    std::vector<std::vector<std::pair<int, std::pair<int, int>>>> nbr;  // pos -> (nbr pos, (dir, color))
    int leaves_explored = 0;

    explicit Canonicalizer(const RawBall& r) : raw(r), k((int)r.keys.size()) {
        nbr.assign(k, {});
        for (const RawBall::RawEdge& e : raw.edges) {
            nbr[e.a].push_back({e.b, {e.dir, e.color}});
            nbr[e.b].push_back({e.a, {-e.dir, e.color}});
        }
    }

    std::vector<uint64_t> initial_colors() const {
        std::vector<uint64_t> c(k);
        for (int i = 0; i < k; ++i) {
            uint64_t h = 0xba11ULL;
            h = hash_combine(h, (uint64_t)raw.dist[i]);
            h = hash_combine(h, (uint64_t)raw.degree[i]);
            h = hash_combine(h, label_hash(raw.labels[i]));
            c[i] = h;
        }
        return c;
    }

    void refine(std::vector<uint64_t>& c) const {
        for (int round = 0; round < k; ++round) {
            size_t before = count_classes(c);
            std::vector<uint64_t> next(k);
            for (int i = 0; i < k; ++i) {
                std::vector<uint64_t> sig;
                sig.reserve(nbr[i].size());
                for (const auto& [j, attr] : nbr[i]) {
                    uint64_t h = c[j];
                    h = hash_combine(h, (uint64_t)(attr.first + 1));
                    h = hash_combine(h, (uint64_t)(attr.second + 2));
                    sig.push_back(h);
                }
                std::sort(sig.begin(), sig.end());
                uint64_t h = c[i];
                for (uint64_t s : sig) h = hash_combine(h, s);
                next[i] = h;
            }
            c = std::move(next);
            if (count_classes(c) == before) break;
        }
    }

    static size_t count_classes(const std::vector<uint64_t>& c) {
        std::vector<uint64_t> s(c);
        std::sort(s.begin(), s.end());
        return std::unique(s.begin(), s.end()) - s.begin();
    }

    // order positions by (dist, color); requires discrete coloring
    std::vector<int> order_of(const std::vector<uint64_t>& c) const {
        std::vector<int> ord(k);
        for (int i = 0; i < k; ++i) ord[i] = i;
        std::sort(ord.begin(), ord.end(), [&](int a, int b) {
            if (raw.dist[a] != raw.dist[b]) return raw.dist[a] < raw.dist[b];
            return c[a] < c[b];
        });
        return ord;
    }

    std::vector<uint64_t> encode(const std::vector<int>& ord) const {
        std::vector<int> rank(k);
        for (int i = 0; i < k; ++i) rank[ord[i]] = i;
        std::vector<uint64_t> enc;
        enc.push_back((uint64_t)k);
        enc.push_back((uint64_t)raw.radius);
        for (int i = 0; i < k; ++i) {
            int p = ord[i];
            enc.push_back((uint64_t)raw.dist[p]);
            enc.push_back((uint64_t)raw.degree[p]);
            append_label(enc, raw.labels[p]);
        }
        std::vector<std::array<int, 4>> es;
        for (const RawBall::RawEdge& e : raw.edges) {
            int a = rank[e.a], b = rank[e.b], dir = e.dir;
            if (a > b) {
                std::swap(a, b);
                dir = -dir;
            }
            es.push_back({a, b, dir, e.color});
        }
        std::sort(es.begin(), es.end());
        enc.push_back((uint64_t)es.size());
        for (const auto& e : es)
            for (int x : e) enc.push_back((uint64_t)(x + 2));
        return enc;
    }

    bool is_discrete(const std::vector<uint64_t>& c) const {
        return count_classes(c) == (size_t)k;
    }

    // individualize-refine search for the lexicographically least encoding
    void search(std::vector<uint64_t> c, std::vector<uint64_t>& best,
                std::vector<int>& best_ord) {
        refine(c);
        if (is_discrete(c)) {
            if (++leaves_explored > (1 << 16))
                throw std::runtime_error("ball canonicalization blow-up");
            auto ord = order_of(c);
            auto enc = encode(ord);
            if (best.empty() || enc < best) {
                best = std::move(enc);
                best_ord = std::move(ord);
            }
            return;
        }
        // first non-singleton class by (dist, color)
        std::map<std::pair<int, uint64_t>, std::vector<int>> classes;
        for (int i = 0; i < k; ++i) classes[{raw.dist[i], c[i]}].push_back(i);
        for (const auto& [key, members] : classes) {
            if (members.size() < 2) continue;
            // interchangeable twins: individualizing any member gives the
            // same canonical form, so one branch suffices
            bool twins = all_exact_twins(members);
            for (int m : members) {
                std::vector<uint64_t> c2(c);
                c2[m] = hash_combine(c2[m], 0xd15c0ULL);
                search(std::move(c2), best, best_ord);
                if (twins) break;
            }
            return;
        }
    }

    bool all_exact_twins(const std::vector<int>& members) const {
        auto profile = [&](int x, int skip) {
            std::vector<std::array<int, 3>> p;
            for (const auto& [y, attr] : nbr[x])
                if (y != skip) p.push_back({y, attr.first, attr.second});
            std::sort(p.begin(), p.end());
            return p;
        };
        for (size_t i = 0; i < members.size(); ++i)
            for (size_t j = i + 1; j < members.size(); ++j) {
                int a = members[i], b = members[j];
                for (const auto& [y, attr] : nbr[a])
                    if (y == b) return false;  // adjacent: not handled as twins
                if (profile(a, b) != profile(b, a)) return false;
                if (!(raw.labels[a] == raw.labels[b])) return false;
            }
        return true;
    }
};

}  // namespace

Ball canonicalize_ball(const RawBall& raw) {
    Canonicalizer cz(raw);
    std::vector<uint64_t> best;
    std::vector<int> ord;
    cz.search(cz.initial_colors(), best, ord);

    int k = (int)raw.keys.size();
    std::vector<int> rank(k);
    for (int i = 0; i < k; ++i) rank[ord[i]] = i;

    Ball b;
    b.radius_ = raw.radius;
    b.dist_.resize(k);
    b.degree_.resize(k);
    b.labels_.resize(k);
    b.orig_.resize(k);
    b.adj_.assign(k, {});
    for (int i = 0; i < k; ++i) {
        int p = ord[i];
        b.dist_[i] = raw.dist[p];
        b.degree_[i] = raw.degree[p];
        b.labels_[i] = raw.labels[p];
        b.orig_[i] = raw.keys[p];
    }
    for (const RawBall::RawEdge& e : raw.edges) {
        int a = rank[e.a], b2 = rank[e.b], dir = e.dir;
        if (a > b2) {
            std::swap(a, b2);
            dir = -dir;
        }
        b.edges_.push_back({a, b2, dir, e.color});
        b.adj_[a].push_back(b2);
        b.adj_[b2].push_back(a);
    }
    std::sort(b.edges_.begin(), b.edges_.end(), [](const BallEdge& x, const BallEdge& y) {
        return std::pair(x.u, x.v) < std::pair(y.u, y.v);
    });
    for (auto& a : b.adj_) std::sort(a.begin(), a.end());
    if (b.dist_[0] != 0) throw std::logic_error("center not first in canonical order");
    b.encoding_ = best;
    return b;
}

Ball extract_ball(const Graph& g, int center, int r, const Labeling& labels) {
    if (center < 0 || center >= g.n()) throw std::out_of_range("ball center out of range");
    if (r < 0) throw std::invalid_argument("negative radius");
    if (!labels.empty() && (int)labels.size() != g.n())
        throw std::invalid_argument("label map size mismatch");

    RawBall raw;
    raw.radius = r;
    std::vector<int> dist(g.n(), -1);
    std::vector<int> pos(g.n(), -1);
    std::deque<int> q;
    dist[center] = 0;
    q.push_back(center);
    std::vector<int> nodes;
    while (!q.empty()) {
        int u = q.front();
        q.pop_front();
        pos[u] = (int)nodes.size();
        nodes.push_back(u);
        if (dist[u] < r)
            for (int v : g.neighbors(u))
                if (dist[v] < 0) {
                    dist[v] = dist[u] + 1;
                    q.push_back(v);
                }
    }
    raw.center = 0;
    for (int u : nodes) {
        raw.keys.push_back(u);
        raw.dist.push_back(dist[u]);
        raw.degree.push_back(g.degree(u));
        raw.labels.push_back(labels.empty() ? NodeLabel{} : labels[u]);
    }
    for (int u : nodes)
        for (size_t i = 0; i < g.neighbors(u).size(); ++i) {
            int v = g.neighbors(u)[i];
            if (v < u || pos[v] < 0) continue;  // count each induced edge once
            int e = g.incident_edges(u)[i];
            int dir = 0;
            if (g.oriented()) dir = (g.edge_tail(e) == u) ? 1 : -1;
            int color = g.edge_colored() ? g.edge_color(e) : -1;
            raw.edges.push_back({pos[u], pos[v], dir, color});
        }
    return canonicalize_ball(raw);
}

}  // namespace localsim
