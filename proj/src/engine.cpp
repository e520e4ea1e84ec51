#include "localsim/engine.hpp"

#include <algorithm>
#include <cstring>
#include <deque>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "localsim/util.hpp"

namespace localsim {

nlohmann::json RunResult::to_json(const std::string& algorithm, int n) const {
    nlohmann::json j;
    j["n"] = n;
    j["algorithm"] = algorithm;
    j["rounds"] = rounds_used;
    j["labels"] = labels;
    j["valid"] = nullptr;
    j["seed"] = nullptr;
    for (auto& [k, v] : extra.items()) j[k] = v;
    return j;
}

uint64_t node_sort_key(const NodeLabel& l, int fallback_index) {
    if (l.id >= 0) return (uint64_t)l.id;
    if (l.bit_count >= 64 && !l.bits.empty()) return l.bits[0];
    return (uint64_t)fallback_index;
}

// ---- function mode ----------------------------------------------------

RunResult run_function_mode(const FunctionAlgorithm& alg, const Graph& g,
                            const Labeling& labels, int advertised_n,
                            const EngineOptions& opt) {
    int n = advertised_n > 0 ? advertised_n : g.n();
    int t = alg.radius(n);  // evaluated once per run
    RunResult r;
    r.labels.assign(g.n(), 0);
    r.rounds_used = t;
    r.locality_used = t;
    std::unordered_map<std::string, int64_t> cache;
    int64_t hits = 0;
    for (int u = 0; u < g.n(); ++u) {
        Ball b = extract_ball(g, u, t, labels);
        std::string key((const char*)b.encoding().data(),
                        b.encoding().size() * sizeof(uint64_t));
        auto it = cache.find(key);
        if (it != cache.end()) {
            ++hits;
            if (opt.audit_purity) {
                int64_t again = alg.evaluate(n, b);
                if (again != it->second)
                    throw std::logic_error("purity violation: same ball, different output");
            }
            r.labels[u] = it->second;
        } else {
            int64_t out = alg.evaluate(n, b);
            cache.emplace(std::move(key), out);
            r.labels[u] = out;
        }
    }
    r.extra["cache_hits"] = hits;
    return r;
}

// ---- message mode -----------------------------------------------------

RunResult run_message_mode(const MessageProtocol& p, const Graph& g, const Labeling& labels,
                           int advertised_n) {
    int n = advertised_n > 0 ? advertised_n : g.n();
    int t = p.rounds(n);
    RunResult r;
    r.rounds_used = t;
    r.locality_used = t;

    auto label_of = [&](int u) -> NodeLabel {
        return labels.empty() ? NodeLabel{} : labels[u];
    };

    // ports: neighbor positions sorted by node key
    std::vector<std::vector<int>> port_to(g.n());
    for (int u = 0; u < g.n(); ++u) {
        auto nb = g.neighbors(u);
        std::sort(nb.begin(), nb.end(), [&](int a, int b) {
            return node_sort_key(label_of(a), a) < node_sort_key(label_of(b), b);
        });
        for (size_t i = 1; i < nb.size(); ++i)
            if (node_sort_key(label_of(nb[i - 1]), nb[i - 1]) ==
                node_sort_key(label_of(nb[i]), nb[i]))
                throw std::runtime_error("duplicate port keys; attach ids or a tape");
        port_to[u] = std::move(nb);
    }

    std::vector<std::any> state(g.n());
    for (int u = 0; u < g.n(); ++u) {
        std::vector<PortAttr> ports;
        for (int v : port_to[u]) {
            int e = g.edge_id(u, v);
            int dir = 0;
            if (g.oriented()) dir = g.edge_tail(e) == u ? 1 : -1;
            ports.push_back({dir, g.edge_colored() ? g.edge_color(e) : -1});
        }
        state[u] = p.init(n, g.degree(u), label_of(u), ports);
    }

    // step 0 only emits; each later step first delivers the previous
    // emissions (one edge per round), so t rounds move information t hops
    std::vector<std::string> outgoing(g.n());
    for (int round = 0; round <= t; ++round) {
        int64_t count = 0, bytes = 0;
        std::vector<std::string> next_out(g.n());
        for (int u = 0; u < g.n(); ++u) {
            std::vector<std::string> inbox(g.degree(u));
            if (round > 0)
                for (int pt = 0; pt < g.degree(u); ++pt) {
                    const std::string& msg = outgoing[port_to[u][pt]];
                    if (!msg.empty()) {
                        ++count;
                        bytes += (int64_t)msg.size();
                    }
                    inbox[pt] = msg;
                }
            auto [st, out] = p.step(n, round, std::move(state[u]), inbox);
            state[u] = std::move(st);
            next_out[u] = std::move(out);
        }
        outgoing = std::move(next_out);
        if (round > 0) {
            r.messages_per_round.push_back(count);
            r.bytes_per_round.push_back(bytes);
        }
    }

    r.labels.resize(g.n());
    for (int u = 0; u < g.n(); ++u) r.labels[u] = p.finalize(state[u]);
    return r;
}

// ---- conversions ------------------------------------------------------

namespace {

void ser_u64(std::string& s, uint64_t v) { s.append((const char*)&v, 8); }
uint64_t de_u64(const std::string& s, size_t& at) {
    uint64_t v;
    std::memcpy(&v, s.data() + at, 8);
    at += 8;
    return v;
}

void ser_label(std::string& s, const NodeLabel& l) {
    ser_u64(s, (uint64_t)l.id);
    ser_u64(s, (uint64_t)l.bit_count);
    ser_u64(s, (uint64_t)l.bits.size());
    for (uint64_t w : l.bits) ser_u64(s, w);
    ser_u64(s, (uint64_t)l.values.size());
    for (int64_t v : l.values) ser_u64(s, (uint64_t)v);
}

NodeLabel de_label(const std::string& s, size_t& at) {
    NodeLabel l;
    l.id = (int64_t)de_u64(s, at);
    l.bit_count = (int)de_u64(s, at);
    l.bits.resize(de_u64(s, at));
    for (auto& w : l.bits) w = de_u64(s, at);
    l.values.resize(de_u64(s, at));
    for (auto& v : l.values) v = (int64_t)de_u64(s, at);
    return l;
}

// basics of one node as gossiped around
struct Basics {
    int64_t key = -1;
    int degree = 0;
    NodeLabel label;
};

void ser_basics(std::string& s, const Basics& b) {
    ser_u64(s, (uint64_t)b.key);
    ser_u64(s, (uint64_t)b.degree);
    ser_label(s, b.label);
}
Basics de_basics(const std::string& s, size_t& at) {
    Basics b;
    b.key = (int64_t)de_u64(s, at);
    b.degree = (int)de_u64(s, at);
    b.label = de_label(s, at);
    return b;
}

// complete fact: a node, its basics, and its incident edges with the
// neighbors' basics attached
struct Fact {
    Basics self;
    struct Nbr {
        Basics b;
        int dir;  // relative to self: +1 outgoing
        int color;
    };
    std::vector<Nbr> nbrs;
};

void ser_fact(std::string& s, const Fact& f) {
    ser_basics(s, f.self);
    ser_u64(s, f.nbrs.size());
    for (const auto& nb : f.nbrs) {
        ser_basics(s, nb.b);
        ser_u64(s, (uint64_t)(nb.dir + 1));
        ser_u64(s, (uint64_t)(nb.color + 2));
    }
}
Fact de_fact(const std::string& s, size_t& at) {
    Fact f;
    f.self = de_basics(s, at);
    f.nbrs.resize(de_u64(s, at));
    for (auto& nb : f.nbrs) {
        nb.b = de_basics(s, at);
        nb.dir = (int)de_u64(s, at) - 1;
        nb.color = (int)de_u64(s, at) - 2;
    }
    return f;
}

using Knowledge = std::map<int64_t, Fact>;

std::string ser_knowledge(const Knowledge& k) {
    std::string s;
    ser_u64(s, k.size());
    for (const auto& [key, f] : k) ser_fact(s, f);
    return s;
}
Knowledge de_knowledge(const std::string& s) {
    size_t at = 0;
    Knowledge k;
    uint64_t cnt = de_u64(s, at);
    for (uint64_t i = 0; i < cnt; ++i) {
        Fact f = de_fact(s, at);
        k.emplace(f.self.key, std::move(f));
    }
    return k;
}

int64_t gather_key(const NodeLabel& l) {
    if (l.id >= 0) return l.id;
    if (l.bit_count >= 64 && !l.bits.empty()) return (int64_t)(l.bits[0] >> 1);
    throw std::runtime_error("ball gathering needs unique ids or a random tape");
}

struct GatherState {
    int n = 0;
    Basics self;
    std::vector<PortAttr> ports;
    Fact fact;
    bool fact_done = false;
    Knowledge known;
};

// Generic gather: step 0 broadcasts basics; each node then assembles the
// fact describing itself and its incident edges; later steps gossip facts.
// Facts reach distance d after 1+d rounds, so radius(n)+1 rounds make the
// full induced ball (including edges between two boundary nodes) known at
// the center.
class GatherProtocol : public MessageProtocol {
  public:
    GatherProtocol(std::shared_ptr<const FunctionAlgorithm> alg) : alg_(std::move(alg)) {}

    std::string name() const override { return alg_->name() + "@msg"; }
    int rounds(int n) const override { return alg_->radius(n) + 1; }
    int bit_demand() const override { return alg_->bit_demand(); }

    std::any init(int n, int degree, const NodeLabel& label,
                  const std::vector<PortAttr>& ports) const override {
        GatherState st;
        st.n = n;
        st.self = {gather_key(label), degree, label};
        st.ports = ports;
        return st;
    }

    std::pair<std::any, std::string> step(int, int round, std::any state,
                                          const std::vector<std::string>& inbox) const override {
        GatherState st = std::any_cast<GatherState>(std::move(state));
        if (round == 0) {
            std::string msg;
            ser_basics(msg, st.self);
            return {std::move(st), std::move(msg)};
        }
        if (round == 1) {
            st.fact.self = st.self;
            for (size_t p = 0; p < inbox.size(); ++p) {
                if (inbox[p].empty()) continue;  // port beyond known attrs stays silent
                size_t at = 0;
                Basics b = de_basics(inbox[p], at);
                int dir = p < st.ports.size() ? st.ports[p].dir : 0;
                int color = p < st.ports.size() ? st.ports[p].color : -1;
                st.fact.nbrs.push_back({std::move(b), dir, color});
            }
            st.fact_done = true;
            st.known.emplace(st.fact.self.key, st.fact);
        } else {
            for (const std::string& m : inbox) {
                if (m.empty()) continue;
                for (auto& [key, fact] : de_knowledge(m)) st.known.emplace(key, fact);
            }
        }
        std::string out = ser_knowledge(st.known);
        return {std::move(st), std::move(out)};
    }

    int64_t finalize(const std::any& state) const override {
        const GatherState& st = std::any_cast<const GatherState&>(state);
        int t = alg_->radius(st.n);
        Ball b = assemble_ball(st, t);
        return alg_->evaluate(st.n, b);
    }

  private:
    std::shared_ptr<const FunctionAlgorithm> alg_;

    static Ball assemble_ball(const GatherState& st, int t) {
        // basics of every node mentioned anywhere
        std::map<int64_t, Basics> basics;
        basics[st.self.key] = st.self;
        for (const auto& [key, f] : st.known) {
            basics[key] = f.self;
            for (const auto& nb : f.nbrs) basics[nb.b.key] = nb.b;
        }
        // adjacency from facts
        std::map<int64_t, std::vector<int64_t>> adj;
        for (const auto& [key, f] : st.known)
            for (const auto& nb : f.nbrs) {
                adj[key].push_back(nb.b.key);
                adj[nb.b.key].push_back(key);
            }
        // BFS from center
        std::map<int64_t, int> dist;
        dist[st.self.key] = 0;
        std::deque<int64_t> q{st.self.key};
        while (!q.empty()) {
            int64_t u = q.front();
            q.pop_front();
            if (dist[u] >= t) continue;
            for (int64_t v : adj[u])
                if (!dist.count(v)) {
                    dist[v] = dist[u] + 1;
                    q.push_back(v);
                }
        }
        RawBall raw;
        raw.radius = t;
        std::map<int64_t, int> pos;
        // deterministic node listing: center first, then by (dist, key)
        std::vector<std::pair<std::pair<int, int64_t>, int64_t>> order;
        for (const auto& [key, d] : dist) order.push_back({{d, key}, key});
        std::sort(order.begin(), order.end());
        for (const auto& [dk, key] : order) {
            pos[key] = (int)raw.keys.size();
            raw.keys.push_back(key);
            raw.dist.push_back(dk.first);
            raw.degree.push_back(basics.at(key).degree);
            raw.labels.push_back(basics.at(key).label);
        }
        raw.center = 0;
        std::map<std::pair<int64_t, int64_t>, std::pair<int, int>> edges;
        for (const auto& [key, f] : st.known) {
            if (!dist.count(key)) continue;
            for (const auto& nb : f.nbrs) {
                if (!dist.count(nb.b.key)) continue;
                int64_t a = key, b2 = nb.b.key;
                int dir = nb.dir;
                if (a > b2) {
                    std::swap(a, b2);
                    dir = -dir;
                }
                auto [it, fresh] = edges.emplace(std::pair(a, b2), std::pair(dir, nb.color));
                if (!fresh && it->second != std::pair(dir, nb.color))
                    throw std::logic_error("inconsistent edge attributes in gather");
            }
        }
        for (const auto& [uv, attr] : edges)
            raw.edges.push_back({pos.at(uv.first), pos.at(uv.second), attr.first, attr.second});
        return canonicalize_ball(raw);
    }
};

// Simulating a protocol inside a ball: states of nodes at distance d are
// trustworthy up to round t - d, which is exactly enough for the center.
class ProtocolAsFunction : public FunctionAlgorithm {
  public:
    ProtocolAsFunction(std::shared_ptr<const MessageProtocol> p) : p_(std::move(p)) {}

    std::string name() const override { return p_->name() + "@fn"; }
    int radius(int n) const override { return p_->rounds(n); }
    int bit_demand() const override { return p_->bit_demand(); }

    int64_t evaluate(int n, const Ball& ball) const override {
        int t = p_->rounds(n);
        int k = ball.size();
        // ports inside the ball, sorted by node key
        std::vector<std::vector<int>> port_to(k);
        for (int i = 0; i < k; ++i) {
            auto nb = ball.neighbors(i);
            std::sort(nb.begin(), nb.end(), [&](int a, int b) {
                return node_sort_key(ball.label(a), a) < node_sort_key(ball.label(b), b);
            });
            port_to[i] = std::move(nb);
        }
        std::vector<std::any> state(k);
        for (int i = 0; i < k; ++i) {
            std::vector<PortAttr> ports;
            for (int j : port_to[i]) {
                auto [dir, color] = ball.edge_between(i, j);
                ports.push_back({dir, color});
            }
            state[i] = p_->init(n, ball.degree(i), ball.label(i), ports);
        }
        std::vector<std::string> outgoing(k);
        for (int round = 0; round <= t; ++round) {
            std::vector<std::string> next_out(k);
            for (int i = 0; i < k; ++i) {
                // pad the inbox to the true degree; boundary nodes simply
                // see silence on their outside ports
                std::vector<std::string> inbox((size_t)ball.degree(i));
                if (round > 0)
                    for (size_t pt = 0; pt < port_to[i].size(); ++pt)
                        inbox[pt] = outgoing[port_to[i][pt]];
                auto [st, out] = p_->step(n, round, std::move(state[i]), inbox);
                state[i] = std::move(st);
                next_out[i] = std::move(out);
            }
            outgoing = std::move(next_out);
        }
        return p_->finalize(state[0]);
    }

  private:
    std::shared_ptr<const MessageProtocol> p_;
};

}  // namespace

std::shared_ptr<MessageProtocol> protocol_from_function(
    std::shared_ptr<const FunctionAlgorithm> alg) {
    return std::make_shared<GatherProtocol>(std::move(alg));
}

std::shared_ptr<FunctionAlgorithm> function_from_protocol(
    std::shared_ptr<const MessageProtocol> p) {
    return std::make_shared<ProtocolAsFunction>(std::move(p));
}

// ---- sequential mode --------------------------------------------------

const SeqPair& SeqView::pair(int i) const {
    const SeqPair* p = pairs_.at(i);
    if (!p) throw std::logic_error("reading pair of an unprocessed node");
    return *p;
}

std::pair<int, int> SeqView::edge_attr(int i, int j) const {
    const auto& nb = adj_.at(i);
    for (size_t k = 0; k < nb.size(); ++k)
        if (nb[k] == j) return eattr_.at(i)[k];
    throw std::out_of_range("no such edge in view");
}

SeqView make_seq_view(const Graph& g, int center, int r, const Labeling& labels,
                      const std::vector<const SeqPair*>& pairs) {
    SeqView v;
    std::vector<int> dist(g.n(), -1);
    std::deque<int> q;
    dist[center] = 0;
    q.push_back(center);
    std::vector<int> nodes;
    while (!q.empty()) {
        int u = q.front();
        q.pop_front();
        nodes.push_back(u);
        if (dist[u] < r)
            for (int w : g.neighbors(u))
                if (dist[w] < 0) {
                    dist[w] = dist[u] + 1;
                    q.push_back(w);
                }
    }
    std::stable_sort(nodes.begin(), nodes.end(), [&](int a, int b) {
        if (dist[a] != dist[b]) return dist[a] < dist[b];
        return a < b;
    });
    std::vector<int> pos(g.n(), -1);
    for (size_t i = 0; i < nodes.size(); ++i) pos[nodes[i]] = (int)i;
    v.nodes_ = nodes;
    for (int u : nodes) {
        v.dist_.push_back(dist[u]);
        v.degree_.push_back(g.degree(u));
        v.labels_.push_back(labels.empty() ? NodeLabel{} : labels[u]);
        v.pairs_.push_back(pairs.empty() ? nullptr : pairs[u]);
    }
    v.adj_.assign(nodes.size(), {});
    v.eattr_.assign(nodes.size(), {});
    for (size_t i = 0; i < nodes.size(); ++i) {
        int u = nodes[i];
        for (size_t k = 0; k < g.neighbors(u).size(); ++k) {
            int w = g.neighbors(u)[k];
            if (pos[w] < 0) continue;
            int e = g.incident_edges(u)[k];
            int dir = 0;
            if (g.oriented()) dir = g.edge_tail(e) == u ? 1 : -1;
            int color = g.edge_colored() ? g.edge_color(e) : -1;
            v.adj_[i].push_back(pos[w]);
            v.eattr_[i].push_back({dir, color});
        }
    }
    return v;
}

SeqView assemble_seq_view(std::vector<int> handles, std::vector<int> dist,
                          std::vector<int> degree, std::vector<NodeLabel> labels,
                          std::vector<std::vector<int>> adj,
                          std::vector<std::vector<std::pair<int, int>>> eattr,
                          std::vector<const SeqPair*> pairs) {
    SeqView v;
    v.nodes_ = std::move(handles);
    v.dist_ = std::move(dist);
    v.degree_ = std::move(degree);
    v.labels_ = std::move(labels);
    v.adj_ = std::move(adj);
    v.eattr_ = std::move(eattr);
    v.pairs_ = std::move(pairs);
    return v;
}

static SeqRun run_sequential_impl(const SequentialAlgorithm& alg, const Graph& g,
                                  const std::function<int(const std::vector<char>&,
                                                          const std::vector<int64_t>&)>& pick,
                                  const Labeling& labels, int advertised_n) {
    int n = advertised_n > 0 ? advertised_n : g.n();
    int t = alg.locality(n);
    alg.on_run_begin(n);

    SeqRun run;
    run.pairs.resize(g.n());
    std::vector<const SeqPair*> ptrs(g.n(), nullptr);
    std::vector<char> processed(g.n(), 0);
    std::vector<int64_t> out(g.n(), 0);

    for (int step = 0; step < g.n(); ++step) {
        int u = pick(processed, out);
        if (u < 0 || u >= g.n() || processed[u])
            throw std::logic_error("order callback returned a bad node");
        SeqView view = make_seq_view(g, u, t, labels, ptrs);
        run.pairs[u] = alg.apply(n, view);
        ptrs[u] = &run.pairs[u];
        processed[u] = 1;
        out[u] = run.pairs[u].s;
        if (run.pairs[u].aux) ++run.max_aux_bytes;
        run.order.push_back(u);
    }
    run.result.labels = out;
    run.result.rounds_used = t;
    run.result.locality_used = t;
    run.result.extra["order"] = run.order;
    return run;
}

SeqRun run_sequential(const SequentialAlgorithm& alg, const Graph& g,
                      const std::vector<int>& order, const Labeling& labels,
                      int advertised_n) {
    if ((int)order.size() != g.n()) throw std::invalid_argument("order is not a permutation");
    std::vector<char> seen(g.n(), 0);
    for (int u : order) {
        if (u < 0 || u >= g.n() || seen[u])
            throw std::invalid_argument("order is not a permutation");
        seen[u] = 1;
    }
    size_t at = 0;
    return run_sequential_impl(
        alg, g,
        [&](const std::vector<char>&, const std::vector<int64_t>&) { return order[at++]; },
        labels, advertised_n);
}

SeqRun run_sequential_random(const SequentialAlgorithm& alg, const Graph& g, uint64_t seed,
                             const Labeling& labels, int advertised_n) {
    std::vector<int> order(g.n());
    for (int i = 0; i < g.n(); ++i) order[i] = i;
    std::mt19937_64 rng(splitmix64(seed ^ 0x04de4ULL));
    std::shuffle(order.begin(), order.end(), rng);
    return run_sequential(alg, g, order, labels, advertised_n);
}

SeqRun run_sequential_adversarial(const SequentialAlgorithm& alg, const Graph& g,
                                  const OrderCallback& pick, const Labeling& labels,
                                  int advertised_n) {
    return run_sequential_impl(alg, g, pick, labels, advertised_n);
}

}  // namespace localsim
