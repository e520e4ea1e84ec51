#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <random>

#include "doctest.h"
#include "localsim/ball.hpp"
#include "localsim/graph.hpp"
#include "localsim/labels.hpp"
#include "oracle.hpp"

using namespace localsim;

TEST_CASE("ball: zero radius is the single center node") {
    Graph g = make_cycle(5);
    Ball b = extract_ball(g, 0, 0, {});
    CHECK(b.size() == 1);
    CHECK(b.dist(0) == 0);
    CHECK(b.degree(0) == 2);
}

TEST_CASE("ball: cycle(5) radius 1 has 3 nodes and 2 edges") {
    Graph g = make_cycle(5);
    Ball b = extract_ball(g, 0, 1, {});
    CHECK(b.size() == 3);
    CHECK(b.edges().size() == 2);
}

TEST_CASE("ball: node sets match the BFS oracle on a random regular graph") {
    Graph g = make_random_regular(50, 3, 1);
    for (int u = 0; u < g.n(); u += 7) {
        Ball b = extract_ball(g, u, 2, {});
        CHECK(b.size() <= 1 + 3 + 6);
        CHECK((size_t)b.size() == oracle::ball_nodes(g, u, 2).size());
    }
}

TEST_CASE("ball nesting: B(u,r) inside B(u,r+1)") {
    Graph g = oracle::random_graph(20, 0.15, 3);
    for (int u = 0; u < g.n(); ++u)
        for (int r = 0; r < 4; ++r) {
            auto inner = oracle::ball_nodes(g, u, r);
            Ball b1 = extract_ball(g, u, r, {});
            Ball b2 = extract_ball(g, u, r + 1, {});
            CHECK(b1.size() == (int)inner.size());
            CHECK(b1.size() <= b2.size());
        }
}

TEST_CASE("ball: out-of-range center rejected") {
    Graph g = make_cycle(5);
    CHECK_THROWS(extract_ball(g, 7, 1, {}));
}

TEST_CASE("power graph: r=1 equals the graph") {
    Graph g = oracle::random_graph(15, 0.2, 5);
    Graph p = power_graph(g, 1);
    CHECK(p.edges() == g.edges());
}

TEST_CASE("power graph: cycle(6) squared is 4-regular") {
    Graph p = power_graph(make_cycle(6), 2);
    for (int u = 0; u < 6; ++u) CHECK(p.degree(u) == 4);
}

TEST_CASE("power graph: path(5) squared degree sequence") {
    Graph p = power_graph(make_path(5), 2);
    std::vector<int> degs;
    for (int u = 0; u < 5; ++u) degs.push_back(p.degree(u));
    CHECK(degs == std::vector<int>{2, 3, 4, 3, 2});
}

TEST_CASE("power graph composition matches distances (n <= 30)") {
    for (uint64_t seed = 0; seed < 4; ++seed) {
        Graph g = oracle::random_graph(18 + 3 * (int)seed, 0.12, seed);
        auto d = oracle::all_pairs_distances(g);
        Graph p2 = power_graph(g, 2);
        Graph p2_3 = power_graph(p2, 3);
        Graph p6 = power_graph(g, 6);
        // edges of (G^2)^3 = pairs at distance in [1, 6]
        CHECK(p2_3.edges() == p6.edges());
        for (const Edge& e : p6.edges()) {
            CHECK(d[e.u][e.v] >= 1);
            CHECK(d[e.u][e.v] <= 6);
        }
    }
}

TEST_CASE("generators: degenerate parameters rejected") {
    CHECK_THROWS(make_cycle(1));
    CHECK_THROWS(make_cycle(2));
    CHECK_THROWS(make_random_regular(5, 3, 1));  // odd n*delta
    CHECK_THROWS(make_random_regular(3, 3, 1));  // n <= delta
}

TEST_CASE("branching tree: closed-form node count") {
    // 1 + delta * ((delta-1)^layers - 1) / (delta - 2) for delta >= 3
    Graph g = make_branching_tree(3, 2);
    CHECK(g.n() == 10);
    Graph h = make_branching_tree(4, 3);
    CHECK(h.n() == 1 + 4 * (27 - 1) / 2);
    // construction oracle: count nodes per BFS layer from the root
    auto dist = h.bfs_distances(0);
    int layers = *std::max_element(dist.begin(), dist.end());
    CHECK(layers == 3);
    CHECK(h.max_degree() == 4);
    CHECK(h.edge_colored());
}

TEST_CASE("random regular: exact degrees and reproducibility") {
    Graph g = make_random_regular(100, 4, 7);
    for (int u = 0; u < g.n(); ++u) CHECK(g.degree(u) == 4);
    Graph h = make_random_regular(100, 4, 7);
    CHECK(g.edges() == h.edges());
    Graph k = make_random_regular(100, 4, 8);
    CHECK(g.edges() != k.edges());
}

TEST_CASE("generate dispatch covers the families deterministically") {
    GenParams p;
    p.n = 40;
    p.delta = 3;
    p.m = 50;
    Graph a = generate("random_bounded_degree", p, 11);
    Graph b = generate("random_bounded_degree", p, 11);
    CHECK(a.edges() == b.edges());
    CHECK(a.max_degree() <= 3);
    CHECK_THROWS(generate("grid", p, 1));
}

TEST_CASE("ids: single node gets id 1") {
    Graph g = make_path(1);
    IdAssignment a = assign_ids(g, 3, 5);
    CHECK(a.ids == std::vector<uint64_t>{1});
}

TEST_CASE("ids: increasing along the orientation of a path") {
    Graph g = make_path(4);
    IdAssignment a = assign_ids_increasing(g, 3, 9);
    for (int u = 0; u + 1 < 4; ++u) CHECK(a.ids[u] < a.ids[u + 1]);
}

TEST_CASE("ids: distinct and within range") {
    Graph g = make_path(10);
    IdAssignment a = assign_ids(g, 3, 5);
    std::set<uint64_t> seen(a.ids.begin(), a.ids.end());
    CHECK(seen.size() == 10);
    for (uint64_t v : a.ids) {
        CHECK(v >= 1);
        CHECK(v <= 1000);
    }
}

TEST_CASE("tape: bit-identical regeneration and budget enforcement") {
    RandomTape t1(8, 100, 42), t2(8, 100, 42);
    for (int u = 0; u < 8; ++u)
        for (int i = 0; i < 100; ++i) CHECK(t1.bit(u, i) == t2.bit(u, i));
    CHECK_THROWS(t1.bit(0, 100));
    TapeCursor cur(t1);
    cur.take_word(3, 64);
    CHECK(cur.consumed(3) == 64);
    cur.take_word(3, 36);
    CHECK_THROWS(cur.take_bit(3));
}

TEST_CASE("graph text format: byte-exact round trip") {
    std::vector<Graph> gs = {make_cycle(7), make_path(5), make_branching_tree(3, 2),
                             oracle::random_graph(12, 0.3, 2)};
    for (const Graph& g : gs) {
        std::string w1 = write_graph(g);
        Graph h = read_graph(w1);
        CHECK(write_graph(h) == w1);
        CHECK(h.n() == g.n());
        CHECK(h.edges() == g.edges());
        CHECK(h.oriented() == g.oriented());
        CHECK(h.edge_colored() == g.edge_colored());
    }
}

TEST_CASE("canonical encoding is invariant under relabeling") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 12; ++trial) {
        int n = 5 + (int)(rng() % 8);
        Graph g = oracle::random_graph(n, 0.3, rng());
        Labeling l(n);
        for (int u = 0; u < n; ++u) l[u].values = {(int64_t)(rng() % 3)};

        std::vector<int> perm(n);
        for (int i = 0; i < n; ++i) perm[i] = i;
        std::shuffle(perm.begin(), perm.end(), rng);
        GraphBuilder b(n);
        for (const Edge& e : g.edges()) b.add_edge(perm[e.u], perm[e.v]);
        Graph h = b.build();
        Labeling lp(n);
        for (int u = 0; u < n; ++u) lp[perm[u]] = l[u];

        for (int u = 0; u < n; ++u) {
            for (int r = 0; r <= 3; ++r) {
                Ball bg = extract_ball(g, u, r, l);
                Ball bh = extract_ball(h, perm[u], r, lp);
                CHECK(bg.encoding() == bh.encoding());
            }
        }
    }
}

TEST_CASE("builder rejects malformed graphs") {
    GraphBuilder b(3);
    b.add_edge(0, 0);
    CHECK_THROWS(b.build());
    GraphBuilder c(3);
    c.add_edge(0, 1).add_edge(1, 0);
    CHECK_THROWS(c.build());
    GraphBuilder d(2);
    d.add_colored_edge(0, 1, 1);
    CHECK_NOTHROW(d.build());
    GraphBuilder e(3);
    e.add_colored_edge(0, 1, 1).add_colored_edge(1, 2, 1);
    CHECK_THROWS(e.build());  // not a proper edge coloring
}
