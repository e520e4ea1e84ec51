#include "localsim/roundelim.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

#include "json.hpp"
#include "localsim/util.hpp"

namespace localsim {

ColorRange ColorRange::exp2() const {
    if (tower == 0 && value <= 62) return {(uint64_t)1 << value, 0};
    return {value, tower + 1};
}

std::string ColorRange::to_string() const {
    std::string s = std::to_string(value);
    for (int i = 0; i < tower; ++i) s = "2^" + s;
    return s;
}

std::string PathTable::rounds_label() const {
    if (kind == node) return std::to_string(t);
    return std::to_string(t - 1) + ".5";
}

uint64_t PathTable::color_at(const Window& w) const {
    auto it = entries.find(w);
    if (it == entries.end())
        throw std::invalid_argument("table is not total over increasing tuples");
    return it->second;
}

std::string PathTable::to_json() const {
    nlohmann::json j;
    j["kind"] = kind == node ? "node" : "edge";
    j["t"] = t;
    j["N"] = N;
    j["k"] = {{"value", k.value}, {"tower", k.tower}};
    j["mask_colors"] = mask_colors;
    j["entries"] = nlohmann::json::array();
    for (const auto& [w, c] : entries) j["entries"].push_back({w, c});
    if (!color_sets.empty()) j["color_sets"] = color_sets;
    return j.dump();
}

PathTable PathTable::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    PathTable tab;
    tab.kind = j.at("kind").get<std::string>() == "node" ? node : edge;
    tab.t = j.at("t").get<int>();
    tab.N = j.at("N").get<int>();
    tab.k.value = j.at("k").at("value").get<uint64_t>();
    tab.k.tower = j.at("k").at("tower").get<int>();
    tab.mask_colors = j.value("mask_colors", false);
    for (const auto& e : j.at("entries"))
        tab.entries[e.at(0).get<Window>()] = e.at(1).get<uint64_t>();
    if (j.contains("color_sets"))
        tab.color_sets = j.at("color_sets").get<std::vector<std::vector<uint64_t>>>();
    return tab;
}

std::vector<Window> enumerate_windows(int width, int N, const std::vector<int>& real_at) {
    std::vector<Window> out;
    // choose a prefix marker run p and a suffix run s, then increasing ids
    for (int p = 0; p <= width; ++p) {
        for (int s = 0; p + s <= width; ++s) {
            int real = width - p - s;
            if (real == 0 && width > 0) continue;  // a window sees >= 1 node
            bool ok = true;
            for (int pos : real_at)
                if (pos < p || pos >= width - s) ok = false;
            if (!ok) continue;
            // choose `real` increasing ids from [1, N]
            std::vector<int> pick(real);
            std::function<void(int, int)> rec = [&](int idx, int lo) {
                if (idx == real) {
                    Window w(width, kPathEnd);
                    for (int i = 0; i < real; ++i) w[p + i] = pick[i];
                    out.push_back(w);
                    return;
                }
                for (int v = lo; v <= N; ++v) {
                    pick[idx] = v;
                    rec(idx + 1, v + 1);
                }
            };
            if (real <= N) rec(0, 1);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

PathTable make_node_table(int t, int N, uint64_t k,
                          const std::function<uint64_t(const Window&)>& color) {
    PathTable tab;
    tab.kind = PathTable::node;
    tab.t = t;
    tab.N = N;
    tab.k = {k, 0};
    for (const Window& w : enumerate_windows(2 * t + 1, N, {t})) {
        uint64_t c = color(w);
        if (c >= k) throw std::invalid_argument("table color outside range");
        tab.entries[w] = c;
    }
    return tab;
}

// ---- elimination ---------------------------------------------------------

namespace {

// extensions of the window by one slot on the right
std::vector<int> right_extensions(const Window& w, int N) {
    std::vector<int> ext;
    ext.push_back(kPathEnd);
    if (w.empty() || w.back() != kPathEnd) {
        int last = 0;
        for (int v : w)
            if (v != kPathEnd) last = std::max(last, v);
        for (int v = last + 1; v <= N; ++v) ext.push_back(v);
    }
    return ext;
}

// intern a color set: mask when the input range allows, dense index else
struct SetEncoder {
    bool mask_mode;
    std::map<std::vector<uint64_t>, uint64_t> interned;
    std::vector<std::vector<uint64_t>> sets;

    uint64_t encode(std::vector<uint64_t> colors) {
        std::sort(colors.begin(), colors.end());
        colors.erase(std::unique(colors.begin(), colors.end()), colors.end());
        if (mask_mode) {
            uint64_t m = 0;
            for (uint64_t c : colors) m |= (uint64_t)1 << c;
            return m;
        }
        auto [it, fresh] = interned.emplace(colors, (uint64_t)sets.size());
        if (fresh) sets.push_back(colors);
        return it->second;
    }
};

}  // namespace

PathTable eliminate_node_to_edge(const PathTable& tab) {
    if (tab.kind != PathTable::node || tab.t < 1)
        throw std::invalid_argument("need a node table with t >= 1");
    PathTable out;
    out.kind = PathTable::edge;
    out.t = tab.t;
    out.N = tab.N;
    out.k = tab.k.exp2();
    SetEncoder enc{tab.k.tower == 0 && tab.k.value <= 62, {}, {}};
    out.mask_colors = enc.mask_mode;
    for (const Window& w : enumerate_windows(2 * tab.t, tab.N, {tab.t - 1, tab.t})) {
        std::vector<uint64_t> colors;
        for (int x : right_extensions(w, tab.N)) {
            Window nw = w;
            nw.push_back(x);
            colors.push_back(tab.color_at(nw));
        }
        out.entries[w] = enc.encode(std::move(colors));
    }
    out.color_sets = std::move(enc.sets);
    return out;
}

PathTable eliminate_edge_to_node(const PathTable& tab) {
    if (tab.kind != PathTable::edge || tab.t < 1)
        throw std::invalid_argument("need an edge table with t >= 1");
    PathTable out;
    out.kind = PathTable::node;
    out.t = tab.t - 1;
    out.N = tab.N;
    out.k = tab.k.exp2();
    SetEncoder enc{tab.k.tower == 0 && tab.k.value <= 62, {}, {}};
    out.mask_colors = enc.mask_mode;
    int width = 2 * out.t + 1;
    int center = out.t;
    for (const Window& w : enumerate_windows(width, tab.N, {center})) {
        std::vector<uint64_t> colors;
        // the outgoing edge (center, center+1) must exist; a provably-last
        // node keeps the empty set
        bool has_partner = width == 1 || w[center + 1] != kPathEnd;
        if (width == 1) {
            for (int x = w[center] + 1; x <= tab.N; ++x)
                colors.push_back(tab.color_at({w[center], x}));
        } else if (has_partner) {
            for (int x : right_extensions(w, tab.N)) {
                Window ew = w;
                ew.push_back(x);
                colors.push_back(tab.color_at(ew));
            }
        }
        out.entries[w] = enc.encode(std::move(colors));
    }
    out.color_sets = std::move(enc.sets);
    return out;
}

// ---- verification ------------------------------------------------------------

TableReport verify_table(const PathTable& tab) {
    TableReport rep;
    int w = tab.width();
    // minimal window containing two adjacent views
    int pair_width = w + 1;
    std::vector<int> real_at;
    if (tab.kind == PathTable::node)
        real_at = {tab.t, tab.t + 1};  // the two adjacent centers
    else
        real_at = {tab.t - 1, tab.t, tab.t + 1};  // three consecutive nodes
    for (const Window& win : enumerate_windows(pair_width, tab.N, real_at)) {
        Window left(win.begin(), win.end() - 1);
        Window right(win.begin() + 1, win.end());
        uint64_t ca = tab.color_at(left);
        uint64_t cb = tab.color_at(right);
        ++rep.windows_checked;
        if (ca == cb) {
            rep.valid = false;
            rep.witness = ViolationWitness{win, tab.kind == PathTable::node ? tab.t : tab.t - 1,
                                           tab.kind == PathTable::node ? tab.t + 1 : tab.t, ca};
            return rep;
        }
    }
    return rep;
}

std::optional<ViolationWitness> zero_round_analysis(const PathTable& tab) {
    if (tab.kind != PathTable::node || tab.t != 0)
        throw std::invalid_argument("zero round analysis needs a node table with t = 0");
    std::map<uint64_t, int> seen;
    for (int id = 1; id <= tab.N; ++id) {
        uint64_t c = tab.color_at({id});
        auto [it, fresh] = seen.emplace(c, id);
        if (!fresh) {
            // two ids with the same color, placed adjacently (increasing)
            ViolationWitness wit;
            wit.window = {it->second, id};
            wit.pos_a = 0;
            wit.pos_b = 1;
            wit.color = c;
            return wit;
        }
    }
    return std::nullopt;
}

}  // namespace localsim
