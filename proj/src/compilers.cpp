#include "localsim/compilers.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <stdexcept>

#include "localsim/util.hpp"

namespace localsim {

// ---- SLOCAL -> LOCAL --------------------------------------------------------

namespace {

struct ClusterOrder {
    // (color, min member) -> members ascending
    std::vector<std::pair<std::pair<int, int>, std::vector<int>>> groups;
};

ClusterOrder order_clusters(const NetworkDecomposition& nd, int n) {
    std::map<int, std::vector<int>> by_cluster;
    for (int u = 0; u < n; ++u) by_cluster[nd.cluster[u]].push_back(u);
    ClusterOrder co;
    for (auto& [cid, mem] : by_cluster) {
        std::sort(mem.begin(), mem.end());
        co.groups.push_back({{nd.color[mem.front()], mem.front()}, mem});
    }
    std::sort(co.groups.begin(), co.groups.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return co;
}

// max distance in g between members of one cluster (simulation accounting)
int cluster_spread(const Graph& g, const std::vector<int>& mem) {
    int d = 0;
    for (int s : mem) {
        auto dist = g.bfs_distances(s);
        for (int t : mem)
            if (dist[t] > d) d = dist[t];
    }
    return d;
}

CompiledRun simulate_by_clusters(const SequentialAlgorithm& seq, const Graph& g,
                                 const NetworkDecomposition& nd, const Labeling& labels,
                                 int t) {
    int n = g.n();
    CompiledRun out;
    std::vector<SeqPair> pairs(n);
    std::vector<const SeqPair*> ptrs(n, nullptr);
    ClusterOrder co = order_clusters(nd, n);
    seq.on_run_begin(n);
    std::map<int, int> color_rounds;  // color -> max cluster spread + t
    for (const auto& [key, mem] : co.groups) {
        int& cr = color_rounds[key.first];
        cr = std::max(cr, cluster_spread(g, mem) + t);
        for (int u : mem) {
            SeqView view = make_seq_view(g, u, t, labels, ptrs);
            // same-color clusters sit farther than t apart in g, so a
            // processed node in the view is from an earlier color or from
            // this very cluster
            for (int i = 0; i < view.size(); ++i) {
                if (!view.processed(i)) continue;
                int h = view.handle(i);
                if (nd.color[h] == nd.color[u] && nd.cluster[h] != nd.cluster[u])
                    throw std::logic_error("simulation read a same-color foreign cluster");
            }
            pairs[u] = seq.apply(n, view);
            ptrs[u] = &pairs[u];
            out.witness_order.push_back(u);
        }
    }
    for (auto& [c, r] : color_rounds) out.simulation_rounds += r;
    out.result.labels.resize(n);
    for (int u = 0; u < n; ++u) out.result.labels[u] = pairs[u].s;
    out.result.locality_used = t;
    return out;
}

}  // namespace

CompiledRun slocal_to_local_via_decomposition(const SequentialAlgorithm& seq, const Graph& g,
                                              const IdAssignment& ids,
                                              const Decomposer& decomposer,
                                              const Labeling& labels) {
    int n = g.n();
    int t = seq.locality(n);
    Graph gp = power_graph(g, std::max(t, 1));
    NetworkDecomposition nd = decomposer(gp, ids);
    CheckReport rep = validate_decomposition(gp, nd);
    if (!rep.valid) throw std::invalid_argument("decomposer produced an invalid decomposition");
    CompiledRun out = simulate_by_clusters(seq, g, nd, labels, t);
    out.result.rounds_used = out.decomposition_rounds + out.simulation_rounds;
    out.result.extra["colors"] = nd.c;
    out.result.extra["witness_order"] = out.witness_order;
    return out;
}

CompiledRun slocal_to_local_via_coloring(const SequentialAlgorithm& seq, const Graph& g,
                                         const IdAssignment& ids, const Labeling& labels) {
    int n = g.n();
    int t = seq.locality(n);
    LinialResult lr = distance_coloring(g, std::max(t, 1), ids);
    NetworkDecomposition nd;
    nd.color.resize(n);
    nd.cluster.resize(n);
    std::map<int64_t, int> dense;
    for (int u = 0; u < n; ++u) {
        auto [it, fresh] = dense.emplace(lr.colors[u], (int)dense.size());
        (void)fresh;
        nd.color[u] = it->second;
    }
    // re-index colors by ascending dense id; every node is its own cluster
    nd.c = (int)dense.size();
    for (int u = 0; u < n; ++u) nd.cluster[u] = u;
    nd.d = 0;
    nd.weak = false;
    CompiledRun out = simulate_by_clusters(seq, g, nd, labels, t);
    out.decomposition_rounds = lr.rounds * std::max(t, 1);
    out.result.rounds_used = out.decomposition_rounds + out.simulation_rounds;
    out.result.extra["colors"] = nd.c;
    out.result.extra["witness_order"] = out.witness_order;
    return out;
}

// ---- composition ------------------------------------------------------------

namespace {

struct CompAux {
    SeqPair a1_self;
    SeqPair a2_self;
    std::map<int, SeqPair> recorded;  // handle -> a1 pair simulated at this turn
};

const CompAux& comp_aux(const SeqPair& p) {
    return *std::any_cast<CompAux>(p.aux.get());
}

}  // namespace

ComposedSequential::ComposedSequential(std::shared_ptr<const SequentialAlgorithm> a1,
                                       std::shared_ptr<const SequentialAlgorithm> a2)
    : a1_(std::move(a1)), a2_(std::move(a2)) {}

std::string ComposedSequential::name() const {
    return a1_->name() + ">>" + a2_->name();
}

int ComposedSequential::locality(int n) const {
    // t1 + 2*t2 makes every already-simulated node inside a fresh
    // simulation's ball discoverable; within the 2*(t1+t2) bound
    return a1_->locality(n) + 2 * a2_->locality(n);
}

void ComposedSequential::on_run_begin(int n) const {
    (void)n;
    sigma1_.clear();
}

SeqPair ComposedSequential::apply(int n, const SeqView& view) const {
    int t1 = a1_->locality(n), t2 = a2_->locality(n);

    // collect every a1 simulation recorded at processed nodes in the view
    std::map<int, SeqPair> known;  // handle -> a1 pair
    for (int i = 0; i < view.size(); ++i) {
        if (!view.processed(i)) continue;
        const CompAux& aux = comp_aux(view.pair(i));
        for (const auto& [h, p] : aux.recorded) {
            auto [it, fresh] = known.emplace(h, p);
            if (!fresh && it->second.s != p.s)
                throw std::logic_error("conflicting recorded a1 simulations");
        }
    }

    auto view_bfs = [&](int src) {
        std::vector<int> dist(view.size(), -1);
        std::deque<int> q{src};
        dist[src] = 0;
        while (!q.empty()) {
            int x = q.front();
            q.pop_front();
            for (int y : view.neighbors(x))
                if (dist[y] < 0) {
                    dist[y] = dist[x] + 1;
                    q.push_back(y);
                }
        }
        return dist;
    };

    // builds the sub-view of radius rad around position center; labels may
    // carry a1 outputs on top, pairs come from `pairs` keyed by handle
    auto sub_view = [&](int center, int rad, const std::map<int, SeqPair>& pairs,
                        bool push_a1_outputs, std::vector<SeqPair>& storage) {
        auto dist = view_bfs(center);
        std::vector<int> mem;
        for (int i = 0; i < view.size(); ++i)
            if (dist[i] >= 0 && dist[i] <= rad) mem.push_back(i);
        std::sort(mem.begin(), mem.end(), [&](int a, int b) {
            if (dist[a] != dist[b]) return dist[a] < dist[b];
            return view.handle(a) < view.handle(b);
        });
        std::vector<int> inv(view.size(), -1);
        for (size_t i = 0; i < mem.size(); ++i) inv[mem[i]] = (int)i;
        std::vector<int> handles, d, deg;
        std::vector<NodeLabel> labels;
        std::vector<std::vector<int>> adj;
        std::vector<std::vector<std::pair<int, int>>> eattr;
        storage.clear();
        storage.reserve(mem.size());
        std::vector<int> pair_slot(mem.size(), -1);
        for (size_t i = 0; i < mem.size(); ++i) {
            int m = mem[i];
            int h = view.handle(m);
            handles.push_back(h);
            d.push_back(dist[m]);
            deg.push_back(view.degree(m));
            NodeLabel l = view.label(m);
            if (push_a1_outputs) {
                auto it = known.find(h);
                if (it == known.end()) throw std::logic_error("missing a1 output in a2 view");
                l.values.push_back(it->second.s);
            }
            labels.push_back(std::move(l));
            std::vector<int> na;
            std::vector<std::pair<int, int>> ea;
            for (int y : view.neighbors(m))
                if (inv[y] >= 0) {
                    na.push_back(inv[y]);
                    ea.push_back(view.edge_attr(m, y));
                }
            adj.push_back(std::move(na));
            eattr.push_back(std::move(ea));
            auto it = pairs.find(h);
            if (it != pairs.end()) {
                storage.push_back(it->second);
                pair_slot[i] = (int)storage.size() - 1;
            }
        }
        std::vector<const SeqPair*> vp(mem.size(), nullptr);
        for (size_t i = 0; i < mem.size(); ++i)
            if (pair_slot[i] >= 0) vp[i] = &storage[pair_slot[i]];
        return assemble_seq_view(std::move(handles), std::move(d), std::move(deg),
                                 std::move(labels), std::move(adj), std::move(eattr),
                                 std::move(vp));
    };

    // simulate a1 for the unsimulated nodes of B(u, t2), ascending handle
    CompAux aux;
    auto du = view_bfs(0);
    std::vector<int> targets;
    for (int i = 0; i < view.size(); ++i)
        if (du[i] <= t2) targets.push_back(i);
    std::sort(targets.begin(), targets.end(),
              [&](int a, int b) { return view.handle(a) < view.handle(b); });
    std::vector<SeqPair> scratch;
    for (int i : targets) {
        int h = view.handle(i);
        if (known.count(h)) continue;
        SeqView v1 = sub_view(i, t1, known, false, scratch);
        SeqPair p1 = a1_->apply(n, v1);
        known.emplace(h, p1);
        aux.recorded.emplace(h, p1);
        sigma1_.push_back(h);
    }
    aux.a1_self = known.at(view.handle(0));

    // a2 at the center: B(u, t2) labeled with a1 outputs on top; pairs are
    // the a2 pairs of composed-processed nodes
    std::map<int, SeqPair> a2_pairs;
    for (int i = 0; i < view.size(); ++i)
        if (view.processed(i)) {
            const CompAux& pa = comp_aux(view.pair(i));
            SeqPair p;
            p.s = view.pair(i).s;
            p.aux = pa.a2_self.aux;
            a2_pairs.emplace(view.handle(i), p);
        }
    std::vector<SeqPair> scratch2;
    SeqView v2 = sub_view(0, t2, a2_pairs, true, scratch2);
    SeqPair p2 = a2_->apply(n, v2);
    aux.a2_self = p2;

    SeqPair out;
    out.s = p2.s;
    out.aux = std::make_shared<std::any>(std::move(aux));
    return out;
}

std::shared_ptr<ComposedSequential> compose_sequential(
    std::shared_ptr<const SequentialAlgorithm> a1,
    std::shared_ptr<const SequentialAlgorithm> a2) {
    return std::make_shared<ComposedSequential>(std::move(a1), std::move(a2));
}

SeqRun run_sequential_with_inputs(const SequentialAlgorithm& alg, const Graph& g,
                                  const std::vector<int64_t>& inputs,
                                  const std::vector<int>& order, const Labeling& base) {
    Labeling l = base.empty() ? blank_labeling(g.n()) : base;
    push_values(l, inputs);
    return run_sequential(alg, g, order, l);
}

// ---- derandomization ----------------------------------------------------------

static std::vector<uint64_t> words_from_assignment(const BitAssignment& a, int n, int bits) {
    std::vector<uint64_t> w(n, 0);
    for (int v = 0; v < n; ++v)
        for (int j = 0; j < std::min(bits, a.fixed[v]); ++j)
            if (a.bit(v, j)) w[v] |= (uint64_t)1 << (63 - j);
    return w;
}

std::vector<int64_t> run_with_bits(const FunctionAlgorithm& alg, const Graph& g,
                                   const BitAssignment& bits, int advertised_n) {
    Labeling l = blank_labeling(g.n());
    int B = 0;
    for (int f : bits.fixed) B = std::max(B, f);
    for (int u = 0; u < g.n(); ++u) {
        l[u].bit_count = B;
        l[u].bits.assign((B + 63) / 64, 0);
        for (int j = 0; j < bits.fixed[u]; ++j)
            if (bits.bit(u, j)) l[u].bits[j / 64] |= (uint64_t)1 << (63 - j % 64);
    }
    return run_function_mode(alg, g, l, advertised_n).labels;
}

FailureOracle::FailureOracle(std::shared_ptr<const FunctionAlgorithm> alg,
                             const LocalProblemSpec& problem, const Graph& g, int bits_per_node)
    : alg_(std::move(alg)), problem_(&problem), g_(&g), bits_per_node_(bits_per_node) {
    radius_ = alg_->radius(g.n());
    bits_read_ = alg_->bit_demand();
    if (bits_read_ <= 0 || bits_read_ > bits_per_node_)
        throw std::invalid_argument("bit demand must be in [1, bits_per_node]");
    int horizon = radius_ + problem.radius();
    reads_.resize(g.n());
    check_nodes_.resize(g.n());
    dependents_.resize(g.n());
    for (int u = 0; u < g.n(); ++u) {
        auto dist = g.bfs_distances(u, horizon);
        for (int v = 0; v < g.n(); ++v) {
            if (dist[v] < 0 || dist[v] > horizon) continue;
            for (int j = 0; j < bits_read_; ++j) reads_[u].push_back({v, j});
            if (dist[v] <= problem.radius()) check_nodes_[u].push_back(v);
            dependents_[v].push_back(u);
        }
    }
}

bool FailureOracle::fails(int u, const std::vector<uint64_t>& words) const {
    if (fast_) return fast_(*g_, u, words);
    // generic path: run the algorithm inside B(u, r+t) and check at u
    Labeling l = blank_labeling(g_->n());
    for (int v = 0; v < g_->n(); ++v) {
        l[v].bit_count = bits_per_node_;
        l[v].bits = {words[v]};
    }
    std::vector<int64_t> out(g_->n(), 0);
    for (int v : check_nodes_[u]) {
        Ball b = extract_ball(*g_, v, radius_, l);
        out[v] = alg_->evaluate(g_->n(), b);
    }
    push_values(l, out);
    Ball b = extract_ball(*g_, u, problem_->radius(), l);
    return !problem_->allowed(b);
}

Dyadic FailureOracle::prob(int u, const BitAssignment& fixed) const {
    std::vector<std::pair<int, int>> free;
    for (const auto& [v, j] : reads_[u])
        if (j >= fixed.fixed[v]) free.push_back({v, j});
    if (free.size() > 26) throw std::runtime_error("failure oracle enumeration too large");
    std::vector<uint64_t> words = words_from_assignment(fixed, g_->n(), bits_per_node_);
    uint64_t count = 0;
    for (uint64_t m = 0; m < ((uint64_t)1 << free.size()); ++m) {
        std::vector<uint64_t> w = words;
        for (size_t i = 0; i < free.size(); ++i) {
            auto [v, j] = free[i];
            if ((m >> i) & 1)
                w[v] |= (uint64_t)1 << (63 - j);
            else
                w[v] &= ~((uint64_t)1 << (63 - j));
        }
        if (fails(u, w)) ++count;
    }
    return Dyadic(count, (int)free.size());
}

Dyadic FailureOracle::total(const BitAssignment& fixed) const {
    Dyadic sum;
    for (int u = 0; u < g_->n(); ++u) sum += prob(u, fixed);
    return sum;
}

DerandomizeResult derandomize_with_oracle(std::shared_ptr<const FunctionAlgorithm> alg,
                                          const LocalProblemSpec& problem, const Graph& g,
                                          const FailureOracle& oracle,
                                          const std::vector<int>& order) {
    int n = g.n();
    int B = oracle.bits_per_node();
    int br = oracle.bits_read();
    BitAssignment a;
    a.fixed.assign(n, 0);
    a.bits.assign(n, 0);

    // per-node conditional failure probabilities, updated incrementally
    std::vector<Dyadic> p(n);
    Dyadic total;
    for (int u = 0; u < n; ++u) {
        p[u] = oracle.prob(u, a);
        total += p[u];
    }
    DerandomizeResult res;
    res.expectation_trace.push_back(total);
    if (!(total < Dyadic::one()))
        throw std::runtime_error("initial failure expectation is not below 1: " +
                                 total.to_string());

    for (int u : order) {
        Dyadic best_total;
        uint64_t best_val = 0;
        bool have = false;
        for (uint64_t val = 0; val < ((uint64_t)1 << br); ++val) {
            BitAssignment trial = a;
            for (int j = 0; j < br; ++j) trial.set_bit(u, j, (int)((val >> (br - 1 - j)) & 1));
            for (int j = br; j < B; ++j) trial.set_bit(u, j, 0);
            Dyadic t = total;
            // recompute only the nodes that read u's bits
            // (subtract exactly; Dyadic has no subtraction, so resum)
            Dyadic fresh;
            std::vector<char> touched(n, 0);
            for (int w : oracle.dependents(u)) touched[w] = 1;
            for (int w = 0; w < n; ++w)
                fresh += touched[w] ? oracle.prob(w, trial) : p[w];
            (void)t;
            if (!have || fresh < best_total) {
                have = true;
                best_total = fresh;
                best_val = val;
            }
        }
        // fix the block (lexicographically smallest minimizer)
        for (int j = 0; j < br; ++j) a.set_bit(u, j, (int)((best_val >> (br - 1 - j)) & 1));
        for (int j = br; j < B; ++j) a.set_bit(u, j, 0);
        for (int w : oracle.dependents(u)) p[w] = oracle.prob(w, a);
        Dyadic new_total;
        for (int w = 0; w < n; ++w) new_total += p[w];
        if (res.expectation_trace.back() < new_total)
            throw std::logic_error("conditional expectation increased");
        res.expectation_trace.push_back(new_total);
        total = new_total;
    }
    if (!total.is_zero())
        throw std::logic_error("final expectation below 1 must be exactly 0");

    res.tape_bits = a;
    res.labels = run_with_bits(*alg, g, a);
    res.check = check_solution(problem, g, res.labels);
    return res;
}

DerandomizeResult derandomize(std::shared_ptr<const FunctionAlgorithm> alg,
                              const LocalProblemSpec& problem, const Graph& g,
                              int bits_per_node, const std::vector<int>& order) {
    FailureOracle oracle(alg, problem, g, bits_per_node);
    return derandomize_with_oracle(alg, problem, g, oracle, order);
}

// ---- slowdown ------------------------------------------------------------------

SlowedAlgorithm::SlowedAlgorithm(std::shared_ptr<const FunctionAlgorithm> alg,
                                 std::function<int(int)> size_map)
    : alg_(std::move(alg)), f_(std::move(size_map)) {}

std::string SlowedAlgorithm::name() const { return alg_->name() + "@slow"; }

int SlowedAlgorithm::radius(int n) const {
    int fn = f_(n);
    if (fn < n) throw std::invalid_argument("slowdown requires f(n) >= n");
    return alg_->radius(fn);
}

int64_t SlowedAlgorithm::evaluate(int n, const Ball& ball) const {
    return alg_->evaluate(f_(n), ball);
}

int SlowedAlgorithm::bit_demand() const { return alg_->bit_demand(); }

std::shared_ptr<FunctionAlgorithm> slowdown(std::shared_ptr<const FunctionAlgorithm> alg,
                                            std::function<int(int)> size_map) {
    return std::make_shared<SlowedAlgorithm>(std::move(alg), std::move(size_map));
}

// ---- speedup --------------------------------------------------------------------

bool speedup_condition(int delta, const SpeedupParams& p) {
    // delta^0 + ... + delta^(t0+r) <= n0
    unsigned __int128 sum = 0, pw = 1;
    for (int i = 0; i <= p.t0 + p.r; ++i) {
        sum += pw;
        if (sum > (unsigned __int128)p.n0) return false;
        pw *= (unsigned)std::max(delta, 1);
    }
    return sum <= (unsigned __int128)p.n0;
}

SpeedupRun speedup_constantize(const FunctionAlgorithm& alg, const SpeedupParams& p,
                               const Graph& g, const IdAssignment& ids) {
    if (!speedup_condition(g.max_degree(), p))
        throw std::invalid_argument("speedup volume condition violated; refusing");
    if (p.rho != 2 * (p.t0 + p.r)) throw std::invalid_argument("rho must equal 2*(t0+r)");
    LinialResult lr = distance_coloring(g, p.rho, ids);
    uint64_t limit = pow_checked((uint64_t)p.n0, p.exponent);
    if (lr.color_range > limit)
        throw std::invalid_argument("fake id range exceeds n0^C; refusing");
    Labeling l = blank_labeling(g.n());
    push_values(l, lr.colors);
    SpeedupRun run;
    run.result = run_function_mode(alg, g, l, p.n0);
    run.coloring_rounds = lr.rounds * p.rho;
    run.color_range = lr.color_range;
    run.result.rounds_used = run.coloring_rounds + p.t0;
    run.result.extra["coloring_rounds"] = run.coloring_rounds;
    run.result.extra["color_range"] = lr.color_range;
    return run;
}

SpeedupLll randomized_speedup_to_lll(std::shared_ptr<const FunctionAlgorithm> alg,
                                     const LocalProblemSpec& problem, const SpeedupParams& p,
                                     const Graph& g, int bits_per_node) {
    if (!speedup_condition(g.max_degree(), p))
        throw std::invalid_argument("speedup volume condition violated; refusing");
    FailureOracle oracle(alg, problem, g, bits_per_node);
    SpeedupLll out;
    int n = g.n();
    for (int v = 0; v < n; ++v) out.inst.variables.push_back({oracle.bits_read()});
    int horizon = 0;
    {
        unsigned __int128 cap = 0, pw = 1;
        for (int i = 0; i <= p.t0 + p.r; ++i) {
            cap += pw;
            pw *= (unsigned)std::max(g.max_degree(), 1);
        }
        horizon = (int)(uint64_t)cap;
    }
    for (int u = 0; u < n; ++u) {
        LLLInstance::Event ev;
        std::set<int> vars;
        for (const auto& [v, j] : oracle.read_sets()[u]) vars.insert(v);
        ev.vars.assign(vars.begin(), vars.end());
        ev.total_bits = (int)ev.vars.size() * oracle.bits_read();
        if (ev.total_bits > 24)
            throw std::invalid_argument("event enumeration infeasible (over 24 bits)");
        // enumerate all assignments of the event's bits
        for (uint64_t m = 0; m < ((uint64_t)1 << ev.total_bits); ++m) {
            std::vector<uint64_t> words(n, 0);
            int slot = 0;
            for (int v : ev.vars)
                for (int j = 0; j < oracle.bits_read(); ++j, ++slot)
                    if ((m >> slot) & 1) words[v] |= (uint64_t)1 << (63 - j);
            if (oracle.fails(u, words)) ev.violating.push_back(m);
        }
        out.inst.events.push_back(std::move(ev));
        out.event_node.push_back(u);
    }
    if (out.inst.delta_dep() > horizon)
        throw std::logic_error("dependency degree exceeds the volume bound");
    return out;
}

// ---- identifier-range reduction demo ------------------------------------------

RunResult run_with_reduced_ids(const FunctionAlgorithm& alg, const Graph& g,
                               const IdAssignment& huge_ids, int r) {
    int t = alg.radius(g.n());
    LinialResult lr = distance_coloring(g, 2 * (t + r), huge_ids);
    Labeling l = blank_labeling(g.n());
    for (int u = 0; u < g.n(); ++u) l[u].id = lr.colors[u] + 1;
    RunResult res = run_function_mode(alg, g, l);
    res.extra["reduced_range"] = lr.color_range;
    res.extra["reduction_rounds"] = lr.rounds;
    return res;
}

}  // namespace localsim
