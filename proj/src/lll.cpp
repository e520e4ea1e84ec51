#include "localsim/lll.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace localsim {

int LLLInstance::delta_rv() const {
    std::vector<int> deg(variables.size(), 0);
    for (const Event& e : events)
        for (int v : e.vars) ++deg[v];
    int m = 0;
    for (int d : deg) m = std::max(m, d);
    return m;
}

int LLLInstance::delta_be() const {
    size_t m = 0;
    for (const Event& e : events) m = std::max(m, e.vars.size());
    return (int)m;
}

int LLLInstance::delta_dep() const {
    std::vector<std::vector<int>> on_var(variables.size());
    for (size_t i = 0; i < events.size(); ++i)
        for (int v : events[i].vars) on_var[v].push_back((int)i);
    int m = 0;
    for (size_t i = 0; i < events.size(); ++i) {
        std::set<int> nbr;
        for (int v : events[i].vars)
            for (int j : on_var[v])
                if (j != (int)i) nbr.insert(j);
        m = std::max(m, (int)nbr.size());
    }
    return m;
}

std::string LLLInstance::to_json() const {
    nlohmann::json j;
    for (const Variable& v : variables) j["variables"].push_back({{"bits", v.bits}});
    j["events"] = nlohmann::json::array();
    for (const Event& e : events) {
        nlohmann::json je;
        je["vars"] = e.vars;
        if (e.is_conjunction()) {
            je["violating"] = "conjunction";
            je["required"] = std::vector<int>(e.conjunction.begin(), e.conjunction.end());
        } else {
            je["violating"] = e.violating;
        }
        j["events"].push_back(je);
    }
    return j.dump(2);
}

LLLInstance LLLInstance::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    LLLInstance inst;
    for (const auto& jv : j.at("variables"))
        inst.variables.push_back({jv.at("bits").get<int>()});
    for (const auto& je : j.at("events")) {
        Event e;
        e.vars = je.at("vars").get<std::vector<int>>();
        for (int v : e.vars) {
            if (v < 0 || v >= (int)inst.variables.size())
                throw std::invalid_argument("event references unknown variable");
            e.total_bits += inst.variables[v].bits;
        }
        if (je.at("violating").is_string()) {
            if (je.at("violating").get<std::string>() != "conjunction")
                throw std::invalid_argument("unknown violating kind");
            auto req = je.at("required").get<std::vector<int>>();
            e.conjunction.assign(req.begin(), req.end());
        } else {
            e.violating = je.at("violating").get<std::vector<uint64_t>>();
        }
        inst.events.push_back(std::move(e));
    }
    return inst;
}

BitAssignment BitAssignment::empty_for(const LLLInstance& inst) {
    BitAssignment a;
    a.fixed.assign(inst.variables.size(), 0);
    a.bits.assign(inst.variables.size(), 0);
    return a;
}

void BitAssignment::set_bit(int v, int j, int val) {
    if (j != fixed[v]) throw std::logic_error("bits must be fixed in order");
    if (val)
        bits[v] |= (uint64_t)1 << j;
    else
        bits[v] &= ~((uint64_t)1 << j);
    ++fixed[v];
}

bool BitAssignment::fully_fixed(const LLLInstance& inst) const {
    for (size_t v = 0; v < inst.variables.size(); ++v)
        if (fixed[v] < inst.variables[v].bits) return false;
    return true;
}

Dyadic event_cond_prob(const LLLInstance& inst, int event, const BitAssignment& a) {
    const LLLInstance::Event& e = inst.events[event];
    int free = 0;
    for (int v : e.vars) free += inst.variables[v].bits - a.fixed[v];
    if (e.is_conjunction()) {
        // one violating assignment; consistent with the prefix or not
        int slot = 0;
        for (size_t i = 0; i < e.vars.size(); ++i) {
            int v = e.vars[i];
            for (int j = 0; j < inst.variables[v].bits; ++j, ++slot)
                if (j < a.fixed[v] && a.bit(v, j) != (int)e.conjunction[slot])
                    return Dyadic::zero();
        }
        return Dyadic(1, free);
    }
    uint64_t count = 0;
    for (uint64_t mask : e.violating) {
        bool ok = true;
        int slot = 0;
        for (size_t i = 0; i < e.vars.size() && ok; ++i) {
            int v = e.vars[i];
            for (int j = 0; j < inst.variables[v].bits; ++j, ++slot)
                if (j < a.fixed[v] && a.bit(v, j) != (int)((mask >> slot) & 1)) {
                    ok = false;
                    break;
                }
        }
        if (ok) ++count;
    }
    return Dyadic(count, free);
}

Dyadic event_cond_prob_bruteforce(const LLLInstance& inst, int event, const BitAssignment& a) {
    const LLLInstance::Event& e = inst.events[event];
    // enumerate every completion of the free bits and count violations
    std::vector<std::pair<int, int>> free_slots;  // (var, bit)
    for (int v : e.vars)
        for (int j = a.fixed[v]; j < inst.variables[v].bits; ++j) free_slots.push_back({v, j});
    if (free_slots.size() > 24) throw std::invalid_argument("brute force oracle capped at 24 bits");
    uint64_t count = 0;
    for (uint64_t m = 0; m < ((uint64_t)1 << free_slots.size()); ++m) {
        // build the full packed assignment for this event
        uint64_t packed = 0;
        int slot = 0;
        size_t fs = 0;
        bool violated;
        for (size_t i = 0; i < e.vars.size(); ++i) {
            int v = e.vars[i];
            for (int j = 0; j < inst.variables[v].bits; ++j, ++slot) {
                int bit;
                if (j < a.fixed[v])
                    bit = a.bit(v, j);
                else {
                    // free slots appear in (var-order, bit-order); find index
                    bit = (int)((m >> fs) & 1);
                    ++fs;
                }
                packed |= (uint64_t)bit << slot;
            }
        }
        if (e.is_conjunction()) {
            uint64_t req = 0;
            for (size_t s = 0; s < e.conjunction.size(); ++s)
                req |= (uint64_t)e.conjunction[s] << s;
            violated = packed == req;
        } else {
            violated = std::find(e.violating.begin(), e.violating.end(), packed) !=
                       e.violating.end();
        }
        if (violated) ++count;
    }
    return Dyadic(count, (int)free_slots.size());
}

Graph dependency_graph(const LLLInstance& inst) {
    std::vector<std::vector<int>> on_var(inst.variables.size());
    for (size_t i = 0; i < inst.events.size(); ++i)
        for (int v : inst.events[i].vars) on_var[v].push_back((int)i);
    std::set<std::pair<int, int>> edges;
    for (const auto& evs : on_var)
        for (size_t a = 0; a < evs.size(); ++a)
            for (size_t b = a + 1; b < evs.size(); ++b)
                edges.insert({std::min(evs[a], evs[b]), std::max(evs[a], evs[b])});
    GraphBuilder gb((int)inst.events.size());
    for (auto& [u, v] : edges) gb.add_edge(u, v);
    return gb.build();
}

// ---- criteria ------------------------------------------------------------

static Dyadic max_prior(const LLLInstance& inst) {
    BitAssignment a = BitAssignment::empty_for(inst);
    Dyadic p;
    for (size_t i = 0; i < inst.events.size(); ++i) {
        Dyadic q = event_cond_prob(inst, (int)i, a);
        if (p < q) p = q;
    }
    return p;
}

CriterionReport check_criterion_tight(const LLLInstance& inst) {
    CriterionReport r;
    r.max_p = max_prior(inst);
    r.delta = dependency_graph(inst).max_degree();
    Dyadic lhs = r.max_p.times((uint64_t)r.delta + 1);
    // 0.3678794411 <= 1/e <= 0.3678794412
    int lo = lhs.cmp_fraction(3678794411ULL, 10000000000ULL);
    int hi = lhs.cmp_fraction(3678794412ULL, 10000000000ULL);
    if (lo <= 0)
        r.verdict = Criterion::holds;
    else if (hi > 0)
        r.verdict = Criterion::fails;
    else
        r.verdict = Criterion::indeterminate;
    r.detail = "p*(delta+1) = " + lhs.to_string();
    return r;
}

CriterionReport check_criterion_relaxed(const LLLInstance& inst, int C) {
    CriterionReport r;
    r.max_p = max_prior(inst);
    r.delta = dependency_graph(inst).max_degree();
    // p * delta^C <= 1, exactly
    unsigned __int128 dpow = 1;
    bool overflow = false;
    for (int i = 0; i < C; ++i) {
        dpow *= (unsigned)std::max(r.delta, 1);
        if (dpow > ((unsigned __int128)1 << 100)) {
            overflow = true;
            break;
        }
    }
    if (overflow) {
        r.verdict = r.max_p.is_zero() ? Criterion::holds : Criterion::fails;
    } else {
        Dyadic lhs;
        lhs.num = r.max_p.num * dpow;
        lhs.exp = r.max_p.exp;
        lhs.normalize();
        r.verdict = lhs <= Dyadic::one() ? Criterion::holds : Criterion::fails;
        r.detail = "p*delta^C = " + lhs.to_string();
    }
    return r;
}

// ---- Fischer-Ghaffari first phase -----------------------------------------

ShatterResult fg_first_phase(const LLLInstance& inst, const std::vector<int>& order,
                             const RandomTape& tape) {
    size_t nv = inst.variables.size();
    if (order.size() != nv) throw std::invalid_argument("order must cover all variables");
    std::vector<std::vector<int>> on_var(nv);
    for (size_t i = 0; i < inst.events.size(); ++i)
        for (int v : inst.events[i].vars) on_var[v].push_back((int)i);
    int delta = std::max(dependency_graph(inst).max_degree(), 1);

    ShatterResult res;
    res.assignment = BitAssignment::empty_for(inst);
    res.frozen.assign(nv, 0);
    TapeCursor cur(tape);

    // p > 1/(6*delta)  <=>  num * 6 * delta > 2^exp
    auto crosses = [&](const Dyadic& p) {
        Dyadic lhs = p.times(6 * (uint64_t)delta);
        return Dyadic::one() < lhs;
    };
    auto freeze_neighborhood = [&](int event) {
        for (int v : inst.events[event].vars) res.frozen[v] = 1;
    };

    for (int u : order) {
        if (res.frozen[u]) continue;
        // an event may already sit above the threshold when its variable
        // comes up; then the freeze fires before any bit of u is sampled
        for (int e : on_var[u])
            if (crosses(event_cond_prob(inst, e, res.assignment))) freeze_neighborhood(e);
        if (res.frozen[u]) continue;

        int nbits = inst.variables[u].bits;
        for (int j = res.assignment.fixed[u]; j < nbits; ++j) {
            std::vector<Dyadic> before;
            for (int e : on_var[u]) before.push_back(event_cond_prob(inst, e, res.assignment));
            res.assignment.set_bit(u, j, cur.take_bit(u));
            bool frozen_now = false;
            for (size_t k = 0; k < on_var[u].size(); ++k) {
                int e = on_var[u][k];
                Dyadic after = event_cond_prob(inst, e, res.assignment);
                // one revealed bit at most doubles the conditional probability
                Dyadic doubled = before[k].times(2);
                if (doubled < after)
                    throw std::logic_error("conditional probability more than doubled");
                if (crosses(after)) {
                    freeze_neighborhood(e);
                    frozen_now = true;
                }
            }
            if (frozen_now) break;
        }
    }

    // guarantee 1, checked exactly: every event ends at probability
    // <= 1/(3*delta). The one exception is a degenerate prior already above
    // the dangerous threshold, which froze untouched and kept its prior.
    BitAssignment nothing = BitAssignment::empty_for(inst);
    for (size_t e = 0; e < inst.events.size(); ++e) {
        Dyadic p = event_cond_prob(inst, (int)e, res.assignment);
        if (Dyadic::one() < p.times(3 * (uint64_t)delta) &&
            event_cond_prob(inst, (int)e, nothing) < p)
            throw std::logic_error("residual event above 1/(3*delta)");
        if (!p.is_zero()) res.residual_events.push_back((int)e);
    }

    // connected components of the residual dependency graph
    std::set<int> residual(res.residual_events.begin(), res.residual_events.end());
    std::vector<std::vector<int>> adj(inst.events.size());
    {
        Graph dep = dependency_graph(inst);
        for (int e : res.residual_events)
            for (int f : dep.neighbors(e))
                if (residual.count(f)) adj[e].push_back(f);
    }
    std::set<int> seen;
    for (int e : res.residual_events) {
        if (seen.count(e)) continue;
        std::vector<int> comp;
        std::deque<int> q{e};
        seen.insert(e);
        while (!q.empty()) {
            int x = q.front();
            q.pop_front();
            comp.push_back(x);
            for (int y : adj[x])
                if (!seen.count(y)) {
                    seen.insert(y);
                    q.push_back(y);
                }
        }
        res.max_component = std::max(res.max_component, (int)comp.size());
        res.components.push_back(std::move(comp));
    }
    return res;
}

// ---- residual finisher ------------------------------------------------------

void solve_residual(const LLLInstance& inst, const std::vector<int>& component,
                    BitAssignment& a, const RandomTape& tape) {
    if (component.empty()) return;
    std::vector<std::pair<int, int>> slots;  // (var, bit)
    std::set<int> vars;
    for (int e : component)
        for (int v : inst.events[e].vars) vars.insert(v);
    for (int v : vars)
        for (int j = a.fixed[v]; j < inst.variables[v].bits; ++j) slots.push_back({v, j});

    if ((int)slots.size() > kResidualSearchCapBits) {
        // restricted Moser-Tardos fallback: resample only component variables
        std::vector<int> vlist(vars.begin(), vars.end());
        TapeCursor cur(tape);
        int resamples = 0;
        auto sample_all = [&](BitAssignment& b) {
            for (int v : vlist)
                while (b.fixed[v] < inst.variables[v].bits)
                    b.set_bit(v, b.fixed[v], cur.take_bit(v));
        };
        BitAssignment trial = a;
        sample_all(trial);
        while (true) {
            int bad = -1;
            for (int e : component) {
                Dyadic p = event_cond_prob(inst, e, trial);
                if (!p.is_zero()) {
                    bad = e;
                    break;
                }
            }
            if (bad < 0) {
                a = trial;
                return;
            }
            // resample the bad event's free variables
            BitAssignment next = a;
            for (int v : vlist) {
                bool touched = false;
                for (int w : inst.events[bad].vars) touched = touched || w == v;
                int upto = inst.variables[v].bits;
                for (int j = a.fixed[v]; j < upto; ++j)
                    next.set_bit(v, j, touched ? cur.take_bit(v) : trial.bit(v, j));
            }
            trial = next;
            if (++resamples > 100000)
                throw std::runtime_error("residual Moser-Tardos did not converge");
        }
    }

    // exhaustive lexicographic search; prune as soon as a fully-fixed
    // event of the component is violated
    auto no_violated = [&]() {
        for (int e : component) {
            bool full = true;
            for (int v : inst.events[e].vars)
                full = full && a.fixed[v] == inst.variables[v].bits;
            if (full && !event_cond_prob(inst, e, a).is_zero()) return false;
        }
        return true;
    };
    std::function<bool(size_t)> dfs = [&](size_t depth) -> bool {
        if (depth == slots.size()) return true;
        auto [v, j] = slots[depth];
        for (int val = 0; val <= 1; ++val) {
            a.set_bit(v, j, val);
            if (no_violated() && dfs(depth + 1)) return true;
            --a.fixed[v];
        }
        return false;
    };
    if (!dfs(0)) throw std::logic_error("residual component has no valid assignment");
}

// ---- Moser-Tardos ------------------------------------------------------------

MtResult moser_tardos(const LLLInstance& inst, const RandomTape& tape, int max_resamples) {
    MtResult r;
    r.assignment = BitAssignment::empty_for(inst);
    TapeCursor cur(tape);
    for (size_t v = 0; v < inst.variables.size(); ++v)
        for (int j = 0; j < inst.variables[v].bits; ++j)
            r.assignment.set_bit((int)v, j, cur.take_bit((int)v));
    while (true) {
        int bad = -1;
        for (size_t e = 0; e < inst.events.size(); ++e)
            if (!event_cond_prob(inst, (int)e, r.assignment).is_zero()) {
                bad = (int)e;
                break;
            }
        if (bad < 0) return r;
        if (++r.resamples > max_resamples)
            throw std::runtime_error("moser-tardos resample budget exhausted");
        for (int v : inst.events[bad].vars) {
            r.assignment.fixed[v] = 0;
            r.assignment.bits[v] = 0;
            for (int j = 0; j < inst.variables[v].bits; ++j)
                r.assignment.set_bit(v, j, cur.take_bit(v));
        }
    }
}

// ---- sinkless orientation -----------------------------------------------------

SinklessInstance sinkless_to_lll(const Graph& g) {
    SinklessInstance s;
    int delta = g.max_degree();
    for (int e = 0; e < g.m(); ++e) s.inst.variables.push_back({1});
    for (int u = 0; u < g.n(); ++u) {
        if (g.degree(u) != delta) continue;
        LLLInstance::Event ev;
        for (int e : g.incident_edges(u)) {
            ev.vars.push_back(e);
            // bit 1 = oriented min->max; "points into u" is 1 iff u is max
            ev.conjunction.push_back(g.edges()[e].v == u ? 1 : 0);
        }
        ev.total_bits = (int)ev.vars.size();
        s.inst.events.push_back(std::move(ev));
        s.event_node.push_back(u);
    }
    return s;
}

std::vector<bool> SinklessInstance::decode(const Graph& g, const BitAssignment& a) const {
    std::vector<bool> fwd(g.m());
    for (int e = 0; e < g.m(); ++e) {
        if (a.fixed[e] < 1) throw std::logic_error("decode needs a full assignment");
        fwd[e] = a.bit(e, 0) == 1;
    }
    return fwd;
}

}  // namespace localsim
