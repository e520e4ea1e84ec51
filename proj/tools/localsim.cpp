// localsim: command-line front end for the LOCAL/SLOCAL simulation library.
// Subcommands: gen | run | check | bench | decompose | lll | roundelim
// Exit codes: 0 ok, 1 invalid result, 2 usage, 3 internal assertion.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "localsim/compilers.hpp"
#include "localsim/coloring.hpp"
#include "localsim/decomposition.hpp"
#include "localsim/engine.hpp"
#include "localsim/graph.hpp"
#include "localsim/labels.hpp"
#include "localsim/lll.hpp"
#include "localsim/problems.hpp"
#include "localsim/roundelim.hpp"
#include "localsim/util.hpp"

using namespace localsim;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

// master seed -> per-trial seed, by the documented counter construction
uint64_t trial_seed(uint64_t master, uint64_t index) { return splitmix64(master + index); }

Graph load_graph(const std::string& path) { return read_graph(slurp(path)); }

struct RunOutcome {
    RunResult result;
    bool valid = true;
    std::string metric_name = "metric";
    int64_t metric = 0;
    int max_component = 0;
};

// dispatch a registered algorithm by name
RunOutcome run_algorithm(const std::string& alg, const Graph& g, uint64_t seed) {
    RunOutcome out;
    if (alg == "linial") {
        IdAssignment ids = assign_ids(g, 3, seed);
        LinialResult lr = linial_color(g, ids);
        out.result.labels = lr.colors;
        out.result.rounds_used = lr.rounds;
        int64_t mx = 0;
        for (int64_t c : lr.colors) mx = std::max(mx, c);
        out.metric_name = "colors";
        out.metric = mx + 1;
        out.valid = check_solution(proper_coloring((int)lr.color_range, 0), g, lr.colors,
                                   labeling_from_ids(ids))
                        .valid;
    } else if (alg == "luby") {
        RandomTape tape(g.n(), 64 * luby_iteration_budget(g.n()), seed);
        LubyResult lr = luby_mis(g, tape);
        out.result.labels = lr.in_mis;
        out.result.rounds_used = lr.iterations;
        out.metric_name = "iterations";
        out.metric = lr.iterations;
        out.valid = check_solution(mis(), g, lr.in_mis).valid;
    } else if (alg == "cycle3color" || alg == "cycle3color_boundary") {
        RandomTape tape(g.n(), 8, seed);
        Cycle3Result cr = cycle_3color_randomized(
            g, tape,
            alg == "cycle3color" ? CycleRule::independent : CycleRule::rising_edge);
        out.result.labels = cr.colors;
        out.result.rounds_used = cr.rounds;
        out.metric_name = "max_run";
        out.metric = cr.max_run;
        out.valid = check_solution(proper_coloring(3), g, cr.colors).valid;
    } else if (alg == "cv3") {
        IdAssignment ids = assign_ids(g, 3, seed);
        auto fn = cv3_cycle_fn(ids.range_bound + 1, false);
        out.result = run_function_mode(*fn, g, labeling_from_ids(ids));
        out.metric_name = "colors";
        out.metric = 3;
        out.valid = check_solution(proper_coloring(3, 0), g, out.result.labels,
                                   labeling_from_ids(ids))
                        .valid;
    } else if (alg == "slocal:mis" || alg == "slocal:coloring") {
        auto a = alg == "slocal:mis" ? greedy_mis_slocal() : greedy_coloring_slocal();
        SeqRun sr = run_sequential_random(*a, g, seed, {});
        out.result = sr.result;
        out.valid = alg == "slocal:mis"
                        ? check_solution(mis(), g, sr.result.labels).valid
                        : check_solution(proper_coloring(g.max_degree() + 1), g,
                                         sr.result.labels)
                              .valid;
        out.metric_name = alg == "slocal:mis" ? "selected" : "colors";
        int64_t m = 0;
        for (int64_t v : sr.result.labels) m = alg == "slocal:mis" ? m + v : std::max(m, v);
        out.metric = m;
    } else if (alg == "compiled:mis" || alg == "compiled:coloring") {
        IdAssignment ids = assign_ids(g, 3, seed);
        auto a = alg == "compiled:mis" ? greedy_mis_slocal() : greedy_coloring_slocal();
        CompiledRun cr = slocal_to_local_via_coloring(*a, g, ids);
        out.result = cr.result;
        out.valid = alg == "compiled:mis"
                        ? check_solution(mis(), g, cr.result.labels).valid
                        : check_solution(proper_coloring(g.max_degree() + 1), g,
                                         cr.result.labels)
                              .valid;
        out.metric_name = "sim_rounds";
        out.metric = cr.simulation_rounds;
    } else if (alg == "ballcarve") {
        CarveStats st;
        NetworkDecomposition nd = ball_carving_sequential(g, &st);
        out.result.labels.assign(nd.cluster.begin(), nd.cluster.end());
        out.result.extra["decomposition"] = json::parse(nd.to_json());
        out.metric_name = "colors";
        out.metric = nd.c;
        out.valid = validate_decomposition(g, nd).valid;
    } else if (alg == "distdecomp") {
        IdAssignment ids = assign_ids(g, 3, seed);
        NetworkDecomposition nd = distributed_decomposition(g, ids);
        out.result.labels.assign(nd.cluster.begin(), nd.cluster.end());
        out.result.extra["decomposition"] = json::parse(nd.to_json());
        out.metric_name = "colors";
        out.metric = nd.c;
        out.valid = validate_decomposition(g, nd).valid;
    } else if (alg == "mpx") {
        NetworkDecomposition nd = mpx_decomposition(g, seed);
        out.result.labels.assign(nd.cluster.begin(), nd.cluster.end());
        out.result.extra["decomposition"] = json::parse(nd.to_json());
        out.metric_name = "colors";
        out.metric = nd.c;
        out.valid = validate_decomposition(g, nd).valid;
    } else if (alg == "lll:sinkless:fg" || alg == "lll:sinkless:mt") {
        SinklessInstance si = sinkless_to_lll(g);
        int nv = (int)si.inst.variables.size();
        BitAssignment a;
        if (alg == "lll:sinkless:mt") {
            RandomTape tape(nv, 64 * 64, seed);
            MtResult mt = moser_tardos(si.inst, tape, 10 * g.n());
            a = mt.assignment;
            out.metric_name = "resamples";
            out.metric = mt.resamples;
        } else {
            RandomTape tape(nv, 64, seed);
            std::vector<int> order(nv);
            for (int i = 0; i < nv; ++i) order[i] = i;
            ShatterResult sh = fg_first_phase(si.inst, order, tape);
            RandomTape tape2(nv, 4096, splitmix64(seed + 1));
            for (const auto& comp : sh.components) solve_residual(si.inst, comp, sh.assignment, tape2);
            a = sh.assignment;
            out.metric_name = "max_component";
            out.metric = sh.max_component;
            out.max_component = sh.max_component;
        }
        std::vector<bool> fwd = si.decode(g, a);
        out.result.labels = encode_orientation(g, fwd);
        out.valid = check_sinkless(g, out.result.labels, g.max_degree()).valid;
    } else {
        throw CLI::ValidationError("unknown algorithm: " + alg);
    }
    return out;
}

std::vector<int> parse_sizes(const std::string& spec) {
    // "16,64,256" or "2^4..2^16" (powers of two ladder)
    std::vector<int> out;
    auto dots = spec.find("..");
    if (dots != std::string::npos) {
        auto parse_pow = [](const std::string& s) {
            auto c = s.find('^');
            if (c == std::string::npos) return std::stoi(s);
            int base = std::stoi(s.substr(0, c)), e = std::stoi(s.substr(c + 1));
            int v = 1;
            while (e-- > 0) v *= base;
            return v;
        };
        int lo = parse_pow(spec.substr(0, dots)), hi = parse_pow(spec.substr(dots + 2));
        for (int v = lo; v <= hi; v *= 2) out.push_back(v);
        return out;
    }
    std::istringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"localsim: LOCAL/SLOCAL model simulation and algorithms"};
    app.require_subcommand(1);
    uint64_t seed = 1;
    bool want_json = false, want_quiet = false, allow_invalid = false;
    app.add_option("--seed", seed, "master seed");
    app.add_flag("--json", want_json, "emit JSON to stdout");
    app.add_flag("--quiet", want_quiet, "suppress informational output");
    app.add_flag("--allow-invalid", allow_invalid, "exit 0 even when a result is invalid");

    // gen
    auto* gen = app.add_subcommand("gen", "generate a graph file");
    std::string family = "cycle", out_path = "graph.txt", ids_path;
    GenParams gp;
    int id_exponent = 3;
    gen->add_option("--family", family, "cycle|path|branching_tree|random_regular|random_bounded_degree");
    gen->add_option("--n", gp.n, "node count");
    gen->add_option("--delta", gp.delta, "degree parameter");
    gen->add_option("--layers", gp.layers, "branching tree layers");
    gen->add_option("--m", gp.m, "edge count (random_bounded_degree)");
    gen->add_option("--out", out_path, "output file");
    gen->add_option("--ids", ids_path, "also write an id file");
    gen->add_option("--id-exponent", id_exponent, "id range exponent C");

    // run
    auto* run = app.add_subcommand("run", "run a registered algorithm on a graph file");
    std::string alg, graph_path, result_path;
    run->add_option("--alg", alg, "algorithm id")->required();
    run->add_option("--graph", graph_path, "graph file")->required();
    run->add_option("--out", result_path, "write result JSON here");

    // check
    auto* chk = app.add_subcommand("check", "check a labeling against a problem spec");
    std::string problem = "mis", labels_path;
    int problem_k = 3;
    chk->add_option("--problem", problem, "mis|coloring|sinkless|edge_grabbing");
    chk->add_option("--k", problem_k, "color count for coloring");
    chk->add_option("--graph", graph_path, "graph file")->required();
    chk->add_option("--labels", labels_path, "labels (JSON array or result JSON)")->required();

    // bench
    auto* bench = app.add_subcommand("bench", "sweep sizes and seeds, emit CSV");
    std::string sizes_spec = "2^4..2^10", csv_path = "-";
    int trials = 3, bench_delta = 3;
    std::string bench_family = "cycle", bench_alg = "linial";
    bench->add_option("--alg", bench_alg, "algorithm id");
    bench->add_option("--family", bench_family, "graph family");
    bench->add_option("--sizes", sizes_spec, "e.g. 2^4..2^16 or 10,100,1000");
    bench->add_option("--trials", trials, "trials per size");
    bench->add_option("--delta", bench_delta, "degree for random_regular");
    bench->add_option("--csv", csv_path, "CSV output path (- for stdout)");

    // decompose
    auto* dec = app.add_subcommand("decompose", "network decompositions");
    std::string method = "ballcarve";
    dec->add_option("--method", method, "ballcarve|distributed|mpx");
    dec->add_option("--graph", graph_path, "graph file")->required();
    dec->add_option("--out", result_path, "write decomposition JSON here");

    // lll
    auto* lll_cmd = app.add_subcommand("lll", "constructive LLL on sinkless instances");
    std::string lll_method = "fg", instance_path;
    lll_cmd->add_option("--method", lll_method, "fg|mt");
    lll_cmd->add_option("--graph", graph_path, "graph file (tree)");
    lll_cmd->add_option("--instance", instance_path, "LLL instance JSON (criteria check only)");

    // roundelim
    auto* re = app.add_subcommand("roundelim", "round elimination on path tables");
    std::string table_path, re_op = "verify", re_out;
    re->add_option("--table", table_path, "table JSON file")->required();
    re->add_option("--op", re_op, "verify|eliminate|zeroround");
    re->add_option("--out", re_out, "output table file (eliminate)");

    for (auto* sc : app.get_subcommands({})) sc->fallthrough();
    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            Graph g = generate(family, gp, seed);
            spit(out_path, write_graph(g));
            if (!ids_path.empty()) {
                IdAssignment ids = assign_ids(g, id_exponent, seed);
                std::ostringstream os;
                for (uint64_t v : ids.ids) os << v << '\n';
                spit(ids_path, os.str());
            }
            if (!want_quiet)
                std::cout << "wrote " << g.n() << " nodes, " << g.m() << " edges to " << out_path
                          << "\n";
            return 0;
        }
        if (*run) {
            Graph g = load_graph(graph_path);
            RunOutcome oc = run_algorithm(alg, g, seed);
            json j = oc.result.to_json(alg, g.n());
            j["valid"] = oc.valid;
            j["seed"] = seed;
            j[oc.metric_name] = oc.metric;
            std::string text = j.dump(2);
            if (!result_path.empty()) spit(result_path, text);
            if (want_json || result_path.empty()) std::cout << text << "\n";
            return oc.valid || allow_invalid ? 0 : 1;
        }
        if (*chk) {
            Graph g = load_graph(graph_path);
            json j = json::parse(slurp(labels_path));
            std::vector<int64_t> labels =
                j.is_array() ? j.get<std::vector<int64_t>>()
                             : j.at("labels").get<std::vector<int64_t>>();
            CheckReport rep;
            if (problem == "mis")
                rep = check_solution(mis(), g, labels);
            else if (problem == "coloring")
                rep = check_solution(proper_coloring(problem_k, 0), g, labels);
            else if (problem == "sinkless")
                rep = check_sinkless(g, labels, g.max_degree());
            else if (problem == "edge_grabbing")
                rep = check_solution(edge_grabbing(), g, labels);
            else
                throw CLI::ValidationError("unknown problem: " + problem);
            json out;
            out["valid"] = rep.valid;
            for (auto& [node, why] : rep.violations)
                out["violations"].push_back({{"node", node}, {"reason", why}});
            std::cout << out.dump(2) << "\n";
            return rep.valid || allow_invalid ? 0 : 1;
        }
        if (*bench) {
            std::vector<int> sizes = parse_sizes(sizes_spec);
            struct Row {
                std::string family;
                int n, delta;
                std::string alg;
                uint64_t seed;
                int rounds;
                int64_t metric;
                bool valid;
                int max_component;
                int64_t wall_ms;
            };
            std::vector<Row> rows(sizes.size() * trials);
            std::vector<std::pair<int, int>> jobs;
            for (size_t si = 0; si < sizes.size(); ++si)
                for (int tr = 0; tr < trials; ++tr) jobs.push_back({(int)si, tr});
            parallel_for(0, (int)jobs.size(), [&](int ji) {
                auto [si, tr] = jobs[ji];
                int n = sizes[si];
                uint64_t s = trial_seed(seed, (uint64_t)si * 1000 + tr);
                GenParams p;
                p.n = n;
                p.delta = bench_delta;
                p.m = 2 * n;
                Graph g = generate(bench_family, p, s);
                auto t0 = std::chrono::steady_clock::now();
                RunOutcome oc = run_algorithm(bench_alg, g, s);
                auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
                rows[ji] = Row{bench_family, n,        g.max_degree(), bench_alg,
                               s,            oc.result.rounds_used,    oc.metric,
                               oc.valid,     oc.max_component,         (int64_t)ms};
            });
            std::ostringstream csv;
            csv << "# localsim bench csv v1\n";
            csv << "family,n,delta,alg,seed,rounds,colors_or_metric,valid,max_component,wall_ms\n";
            bool all_valid = true;
            for (const Row& r : rows) {
                csv << r.family << ',' << r.n << ',' << r.delta << ',' << r.alg << ',' << r.seed
                    << ',' << r.rounds << ',' << r.metric << ',' << (r.valid ? 1 : 0) << ','
                    << r.max_component << ',' << r.wall_ms << '\n';
                all_valid = all_valid && r.valid;
            }
            if (csv_path == "-")
                std::cout << csv.str();
            else
                spit(csv_path, csv.str());
            return all_valid || allow_invalid ? 0 : 1;
        }
        if (*dec) {
            Graph g = load_graph(graph_path);
            NetworkDecomposition nd;
            if (method == "ballcarve")
                nd = ball_carving_sequential(g);
            else if (method == "distributed")
                nd = distributed_decomposition(g, assign_ids(g, 3, seed));
            else if (method == "mpx")
                nd = mpx_decomposition(g, seed);
            else
                throw CLI::ValidationError("unknown method: " + method);
            CheckReport rep = validate_decomposition(g, nd);
            std::string text = nd.to_json();
            if (!result_path.empty()) spit(result_path, text);
            if (want_json || result_path.empty()) std::cout << text << "\n";
            if (!want_quiet)
                std::cerr << "c=" << nd.c << " d=" << nd.d << (nd.weak ? " weak" : " strong")
                          << " valid=" << rep.valid << "\n";
            return rep.valid || allow_invalid ? 0 : 1;
        }
        if (*lll_cmd) {
            if (!instance_path.empty()) {
                LLLInstance inst = LLLInstance::from_json(slurp(instance_path));
                auto tight = check_criterion_tight(inst);
                auto relaxed = check_criterion_relaxed(inst, 3);
                json out;
                out["tight"] = tight.verdict == Criterion::holds
                                   ? "holds"
                                   : (tight.verdict == Criterion::fails ? "fails"
                                                                        : "indeterminate");
                out["relaxed_C3"] = relaxed.verdict == Criterion::holds ? "holds" : "fails";
                out["delta"] = tight.delta;
                std::cout << out.dump(2) << "\n";
                return 0;
            }
            Graph g = load_graph(graph_path);
            RunOutcome oc =
                run_algorithm(lll_method == "mt" ? "lll:sinkless:mt" : "lll:sinkless:fg", g, seed);
            json j = oc.result.to_json("lll:" + lll_method, g.n());
            j["valid"] = oc.valid;
            j["seed"] = seed;
            std::cout << j.dump(2) << "\n";
            return oc.valid || allow_invalid ? 0 : 1;
        }
        if (*re) {
            PathTable tab = PathTable::from_json(slurp(table_path));
            if (re_op == "verify") {
                TableReport rep = verify_table(tab);
                json out;
                out["valid"] = rep.valid;
                out["windows_checked"] = rep.windows_checked;
                if (rep.witness) out["witness"] = rep.witness->window;
                std::cout << out.dump(2) << "\n";
                return rep.valid || allow_invalid ? 0 : 1;
            }
            if (re_op == "eliminate") {
                PathTable next = tab.kind == PathTable::node ? eliminate_node_to_edge(tab)
                                                             : eliminate_edge_to_node(tab);
                std::string text = next.to_json();
                if (!re_out.empty())
                    spit(re_out, text);
                else
                    std::cout << text << "\n";
                if (!want_quiet)
                    std::cerr << "eliminated to " << (next.kind == PathTable::node ? "node" : "edge")
                              << " table, rounds " << next.rounds_label() << ", range "
                              << next.k.to_string() << "\n";
                return 0;
            }
            if (re_op == "zeroround") {
                auto wit = zero_round_analysis(tab);
                json out;
                out["injective"] = !wit.has_value();
                if (wit) out["witness"] = wit->window;
                std::cout << out.dump(2) << "\n";
                return 0;
            }
            throw CLI::ValidationError("unknown roundelim op: " + re_op);
        }
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
