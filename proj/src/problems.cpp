#include "localsim/problems.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "localsim/util.hpp"

namespace localsim {

int64_t ball_out(const Ball& b, int i) {
    const auto& vals = b.label(i).values;
    if (vals.empty()) throw std::logic_error("ball node has no output label");
    return vals.back();
}

CheckReport check_solution(const LocalProblemSpec& spec, const Graph& g,
                           const std::vector<int64_t>& out, const Labeling& input) {
    if ((int)out.size() != g.n()) throw std::invalid_argument("output label count mismatch");
    for (int u = 0; u < g.n(); ++u)
        if (!spec.label_allowed(out[u]))
            throw std::invalid_argument("label outside S_out at node " + std::to_string(u));

    Labeling l = input.empty() ? blank_labeling(g.n()) : input;
    push_values(l, out);

    CheckReport rep;
    std::vector<std::string> reasons(g.n());
    parallel_for(0, g.n(), [&](int u) {
        Ball b = extract_ball(g, u, spec.radius(), l);
        reasons[u] = spec.violation(b);
    });
    for (int u = 0; u < g.n(); ++u)
        if (!reasons[u].empty()) rep.violations.push_back({u, reasons[u]});
    rep.valid = rep.violations.empty();
    return rep;
}

// ---- builtins ----------------------------------------------------------

LocalProblemSpec proper_coloring(int k, int64_t base) {
    std::set<int64_t> s;
    for (int i = 0; i < k; ++i) s.insert(base + i);
    return LocalProblemSpec(
        "proper_coloring(" + std::to_string(k) + ")", 1, std::move(s), [](const Ball& b) {
            int64_t c = ball_out(b, 0);
            for (int j : b.neighbors(0))
                if (ball_out(b, j) == c) return std::string("neighbor has equal color");
            return std::string();
        });
}

LocalProblemSpec mis() {
    return LocalProblemSpec("mis", 1, {0, 1}, [](const Ball& b) {
        bool sel = ball_out(b, 0) == 1;
        bool nbr_sel = false;
        for (int j : b.neighbors(0)) nbr_sel = nbr_sel || ball_out(b, j) == 1;
        if (sel && nbr_sel) return std::string("selected node has a selected neighbor");
        if (!sel && !nbr_sel) return std::string("unselected node has no selected neighbor");
        return std::string();
    });
}

LocalProblemSpec sinkless_orientation(int delta) {
    // The port-mask labels reference each node's global port order, which a
    // radius-1 ball cannot reconstruct for the neighbors, so this checker
    // reads the decoded orientation through the graph instead.
    return LocalProblemSpec("sinkless_orientation(" + std::to_string(delta) + ")", 1, {},
                            [](const Ball&) -> std::string {
                                throw std::logic_error(
                                    "sinkless orientation is checked via check_sinkless()");
                            });
}

CheckReport check_sinkless(const Graph& g, const std::vector<int64_t>& labels, int delta) {
    std::vector<bool> fwd = decode_orientation(g, labels);
    CheckReport rep;
    for (int u = 0; u < g.n(); ++u) {
        if (g.degree(u) < delta) continue;  // not constrained
        if (!has_outgoing(g, u, fwd)) rep.violations.push_back({u, "node is a sink"});
    }
    rep.valid = rep.violations.empty();
    return rep;
}

LocalProblemSpec edge_grabbing() {
    return LocalProblemSpec("edge_grabbing", 1, {}, [](const Ball& b) {
        int64_t mine = ball_out(b, 0);
        bool incident = false;
        for (int j : b.neighbors(0)) {
            auto [dir, color] = b.edge_between(0, j);
            (void)dir;
            if (color == mine) incident = true;
        }
        if (!incident) return std::string("grabbed color is not an incident edge color");
        for (int j : b.neighbors(0)) {
            auto [dir, color] = b.edge_between(0, j);
            (void)dir;
            if (color == mine && ball_out(b, j) == mine)
                return std::string("both endpoints grab the shared edge");
        }
        return std::string();
    });
}

// ---- orientation encoding ----------------------------------------------

std::vector<int64_t> encode_orientation(const Graph& g, const std::vector<bool>& fwd) {
    if ((int)fwd.size() != g.m()) throw std::invalid_argument("orientation size mismatch");
    std::vector<int64_t> labels(g.n(), 0);
    for (int u = 0; u < g.n(); ++u) {
        if (g.degree(u) > 63) throw std::invalid_argument("degree too large for port mask");
        for (int p = 0; p < g.degree(u); ++p) {
            int v = g.neighbors(u)[p];
            if (u < v && fwd[g.incident_edges(u)[p]])
                labels[u] |= (int64_t)1 << p;
        }
    }
    return labels;
}

std::vector<bool> decode_orientation(const Graph& g, const std::vector<int64_t>& labels) {
    if ((int)labels.size() != g.n()) throw std::invalid_argument("label count mismatch");
    std::vector<bool> fwd(g.m());
    for (int u = 0; u < g.n(); ++u)
        for (int p = 0; p < g.degree(u); ++p) {
            int v = g.neighbors(u)[p];
            if (u < v) fwd[g.incident_edges(u)[p]] = (labels[u] >> p) & 1;
        }
    return fwd;
}

bool has_outgoing(const Graph& g, int u, const std::vector<bool>& fwd) {
    for (int p = 0; p < g.degree(u); ++p) {
        int e = g.incident_edges(u)[p];
        bool away = g.edges()[e].u == u ? fwd[e] : !fwd[e];
        if (away) return true;
    }
    return false;
}

// ---- table-driven LCL ---------------------------------------------------

LocalProblemSpec LclTable::to_spec() const {
    auto allowed = allowed_balls;
    std::set<int64_t> s(s_out.begin(), s_out.end());
    return LocalProblemSpec("lcl:" + name, r, std::move(s), [allowed](const Ball& b) {
        if (allowed.count(b.encoding())) return std::string();
        return std::string("ball not in allowed table");
    });
}

std::string LclTable::to_json() const {
    nlohmann::json j;
    j["name"] = name;
    j["S_in"] = s_in;
    j["S_out"] = s_out;
    j["r"] = r;
    j["delta"] = delta;
    std::vector<std::vector<uint64_t>> balls(allowed_balls.begin(), allowed_balls.end());
    j["allowed_balls"] = balls;
    return j.dump(2);
}

LclTable LclTable::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    LclTable t;
    t.name = j.at("name").get<std::string>();
    t.s_in = j.at("S_in").get<std::vector<int64_t>>();
    t.s_out = j.at("S_out").get<std::vector<int64_t>>();
    t.r = j.at("r").get<int>();
    t.delta = j.at("delta").get<int>();
    if (t.r > 2) throw std::invalid_argument("table-driven LCLs support r <= 2 only");
    for (const auto& b : j.at("allowed_balls"))
        t.allowed_balls.insert(b.get<std::vector<uint64_t>>());
    return t;
}

LclTable build_lcl_table(const std::string& name, const LocalProblemSpec& base, int delta,
                         std::vector<int64_t> s_out) {
    if (delta > 2 || base.radius() != 1)
        throw std::invalid_argument("table building supported for delta <= 2, r = 1");
    LclTable t;
    t.name = name;
    t.s_out = s_out;
    t.r = base.radius();
    t.delta = delta;

    // hosts covering every radius-1 ball type of a degree-<=2 graph
    std::vector<Graph> hosts;
    for (int n = 1; n <= 5; ++n) hosts.push_back(make_path(n) /* oriented is fine */);
    for (int n = 3; n <= 6; ++n) hosts.push_back(make_cycle(n));
    for (Graph& host0 : hosts) {
        // strip orientation by rebuilding as undirected
        GraphBuilder gb(host0.n());
        for (const Edge& e : host0.edges()) gb.add_edge(e.u, e.v);
        Graph host = gb.build();
        std::vector<int64_t> labels(host.n(), 0);
        // enumerate labelings over s_out
        std::vector<size_t> idx(host.n(), 0);
        while (true) {
            for (int i = 0; i < host.n(); ++i) labels[i] = s_out[idx[i]];
            Labeling l = blank_labeling(host.n());
            push_values(l, labels);
            for (int u = 0; u < host.n(); ++u) {
                Ball b = extract_ball(host, u, t.r, l);
                if (base.allowed(b)) t.allowed_balls.insert(b.encoding());
            }
            int carry = 0;
            while (carry < host.n() && ++idx[carry] == s_out.size()) idx[carry++] = 0;
            if (carry == host.n()) break;
        }
    }
    return t;
}

}  // namespace localsim
