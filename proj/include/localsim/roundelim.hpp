#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace localsim {

// Windows are tuples over {0 = end-of-path marker, 1..N = ids}; the ids are
// strictly increasing and markers form a prefix and/or suffix run.
using Window = std::vector<int>;
inline constexpr int kPathEnd = 0;

// Nominal color range as an iterated exponential: range = 2^2^...^value
// (tower twos on top of value). One elimination turns {v, 0} into {2^v, 0}
// while 2^v fits, and bumps the tower otherwise.
struct ColorRange {
    uint64_t value = 0;
    int tower = 0;
    bool operator==(const ColorRange&) const = default;
    ColorRange exp2() const;
    std::string to_string() const;
};

// Dense algorithm table for coloring oriented paths with increasing ids.
// node kind: views of width 2t+1, the center at index t.
// edge kind: views of width 2t (round complexity t - 1/2), the edge
// endpoints at indices t-1 and t.
struct PathTable {
    enum Kind { node, edge };
    Kind kind = node;
    int t = 0;
    int N = 0;
    ColorRange k;
    // colors of eliminated tables are subsets of the input range: packed
    // bitmasks when the input range fits 63 bits, dense set indices into
    // color_sets otherwise
    bool mask_colors = false;
    std::map<Window, uint64_t> entries;
    std::vector<std::vector<uint64_t>> color_sets;

    int width() const { return kind == node ? 2 * t + 1 : 2 * t; }
    std::string rounds_label() const;
    uint64_t color_at(const Window& w) const;  // throws when not total

    std::string to_json() const;
    static PathTable from_json(const std::string& text);
};

// all valid windows of the given width: increasing ids from [1, N], marker
// runs only at the ends, and every position in `real_at` non-marker
std::vector<Window> enumerate_windows(int width, int N, const std::vector<int>& real_at);

// build a total node table from a function of the window
PathTable make_node_table(int t, int N, uint64_t k,
                          const std::function<uint64_t(const Window&)>& color);

// ---- elimination -----------------------------------------------------------

// node t -> edge t (round t-1/2): the edge color is the set of colors the
// node table outputs over all one-node extensions on the right (including
// the end-of-path option), packed as a mask over [k]
PathTable eliminate_node_to_edge(const PathTable& tab);
// edge t -> node t-1: same construction for the outgoing edge; a node that
// can see it is the last of the path gets the empty set
PathTable eliminate_edge_to_node(const PathTable& tab);

// ---- verification ------------------------------------------------------------

struct ViolationWitness {
    Window window;  // minimal segment exhibiting equal adjacent colors
    int pos_a = 0, pos_b = 0;
    uint64_t color = 0;
};

struct TableReport {
    bool valid = true;
    std::optional<ViolationWitness> witness;
    int64_t windows_checked = 0;
};

// exhaustively instantiate all increasing id assignments of minimal windows
// (including end-of-path cases) and check adjacent outputs differ
TableReport verify_table(const PathTable& tab);

// pigeonhole analysis of a 0-round node table: two ids with equal color
// placed adjacently, or "injective"
std::optional<ViolationWitness> zero_round_analysis(const PathTable& tab);

}  // namespace localsim
