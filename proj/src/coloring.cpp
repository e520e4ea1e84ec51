#include "localsim/coloring.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <stdexcept>

#include "localsim/util.hpp"

namespace localsim {

// ---- cover-free families ------------------------------------------------

CoverFreeFamily CoverFreeFamily::polynomial(uint64_t k, int delta) {
    if (k < 1 || delta < 1) throw std::invalid_argument("bad cover-free parameters");
    CoverFreeFamily best;
    for (int d = 1; d <= 62; ++d) {
        uint64_t q0 = std::max<uint64_t>(
            2, (uint64_t)std::llround(std::pow((double)k, 1.0 / (d + 1))));
        while (q0 > 2 && pow_checked(q0 - 1, d + 1) >= k) --q0;
        while (pow_checked(q0, d + 1) < k) ++q0;
        uint64_t q = next_prime(std::max<uint64_t>(q0, (uint64_t)delta * d + 1));
        if (q > (1 << 15)) continue;  // ground q^2 would never be competitive
        int ground = (int)(q * q);
        if (best.ground_ == 0 || ground < best.ground_) {
            best.k_ = k;
            best.delta_ = delta;
            best.d_ = d;
            best.q_ = q;
            best.ground_ = ground;
        }
        // for larger d the prime floor delta*d+1 alone exceeds the best
        if (best.ground_ > 0 &&
            (uint64_t)delta * d + 1 > (uint64_t)std::sqrt((double)best.ground_) + 1)
            break;
    }
    if (best.ground_ == 0) throw std::runtime_error("no cover-free family found");
    return best;
}

CoverFreeFamily CoverFreeFamily::polynomial_fixed(uint64_t k, int delta, int d, uint64_t q) {
    if (!is_prime_u64(q) || q <= (uint64_t)delta * d || pow_checked(q, d + 1) < k)
        throw std::invalid_argument("invalid fixed family parameters");
    CoverFreeFamily f;
    f.k_ = k;
    f.delta_ = delta;
    f.d_ = d;
    f.q_ = q;
    f.ground_ = (int)(q * q);
    return f;
}

CoverFreeFamily CoverFreeFamily::explicit_family(std::vector<std::vector<int>> sets, int delta,
                                                 int ground) {
    CoverFreeFamily f;
    f.k_ = sets.size();
    f.delta_ = delta;
    f.ground_ = ground;
    f.sets_ = std::move(sets);
    return f;
}

std::vector<int> CoverFreeFamily::set_of(uint64_t index) const {
    if (index >= k_) throw std::out_of_range("family index out of range");
    if (!sets_.empty()) return sets_[index];
    std::vector<uint64_t> coeff(d_ + 1);
    uint64_t rest = index;
    for (int i = 0; i <= d_; ++i) {
        coeff[i] = rest % q_;
        rest /= q_;
    }
    std::vector<int> out;
    out.reserve(q_);
    for (uint64_t x = 0; x < q_; ++x) {
        uint64_t acc = 0;
        for (int i = d_; i >= 0; --i) acc = (acc * x + coeff[i]) % q_;
        out.push_back((int)(x * q_ + acc));
    }
    return out;
}

// ---- Linial reduction ---------------------------------------------------

std::vector<int64_t> linial_reduce_once(const Graph& g, const std::vector<int64_t>& colors,
                                        const CoverFreeFamily& fam) {
    if ((int)colors.size() != g.n()) throw std::invalid_argument("color count mismatch");
    for (const Edge& e : g.edges())
        if (colors[e.u] == colors[e.v])
            throw std::invalid_argument("input coloring is not proper");
    for (int64_t c : colors)
        if (c < 0 || (uint64_t)c >= fam.k())
            throw std::invalid_argument("color outside family range");
    if (g.max_degree() > fam.delta())
        throw std::invalid_argument("graph degree exceeds family delta");

    std::vector<int64_t> out(g.n());
    std::vector<int> stamp(fam.ground(), -1);
    for (int u = 0; u < g.n(); ++u) {
        for (int v : g.neighbors(u))
            for (int x : fam.set_of((uint64_t)colors[v])) stamp[x] = u;
        int64_t chosen = -1;
        for (int x : fam.set_of((uint64_t)colors[u]))
            if (stamp[x] != u) {
                chosen = x;
                break;  // set elements come out in increasing order
            }
        if (chosen < 0) throw std::logic_error("cover-free family failed to provide a color");
        out[u] = chosen;
    }
    return out;
}

LinialResult linial_color_from(const Graph& g, const std::vector<int64_t>& colors0,
                               uint64_t k0) {
    int delta = std::max(g.max_degree(), 1);
    LinialResult r;
    r.colors = colors0;
    r.color_range = k0;
    while (true) {
        CoverFreeFamily fam = CoverFreeFamily::polynomial(r.color_range, delta);
        if ((uint64_t)fam.ground() >= r.color_range) break;  // bound stopped shrinking
        r.colors = linial_reduce_once(g, r.colors, fam);
        r.color_range = (uint64_t)fam.ground();
        ++r.rounds;
    }
    // one more pass with the small-range family (degree 3, first prime > 3*delta)
    uint64_t qs = next_prime(3 * (uint64_t)delta + 1);
    if (qs * qs < r.color_range && pow_checked(qs, 4) >= r.color_range) {
        CoverFreeFamily fam = CoverFreeFamily::polynomial_fixed(r.color_range, delta, 3, qs);
        r.colors = linial_reduce_once(g, r.colors, fam);
        r.color_range = qs * qs;
        ++r.rounds;
    }
    return r;
}

LinialResult linial_color(const Graph& g, const IdAssignment& ids) {
    std::vector<int64_t> colors(g.n());
    for (int u = 0; u < g.n(); ++u) colors[u] = (int64_t)ids.ids[u] - 1;
    return linial_color_from(g, colors, ids.range_bound);
}

LinialResult distance_coloring(const Graph& g, int rho, const IdAssignment& ids) {
    if (rho < 1) throw std::invalid_argument("distance coloring needs rho >= 1");
    Graph p = power_graph(g, rho);
    return linial_color(p, ids);
}

// ---- Cole-style bit reduction -------------------------------------------

int cole_output_bits(int k_bits, int delta) {
    return delta * (ceil_log2((uint64_t)k_bits) + 1);
}

std::vector<int64_t> cole_reduce(const Graph& g, const std::vector<int64_t>& colors,
                                 int k_bits) {
    if (k_bits < 1 || k_bits > 62) throw std::invalid_argument("color width out of range");
    for (const Edge& e : g.edges())
        if (colors[e.u] == colors[e.v])
            throw std::invalid_argument("two neighbors share a color");
    for (int64_t c : colors)
        if (c < 0 || c >= ((int64_t)1 << k_bits))
            throw std::invalid_argument("color wider than declared");
    int delta = g.max_degree();
    int jw = ceil_log2((uint64_t)k_bits);
    if (cole_output_bits(k_bits, delta) > 62)
        throw std::invalid_argument("output color would not fit in 63 bits");

    std::vector<int64_t> out(g.n(), 0);
    for (int u = 0; u < g.n(); ++u) {
        int64_t acc = 0;
        int slots = 0;
        for (int v : g.neighbors(u)) {
            int j = 0;
            while (((colors[u] ^ colors[v]) >> j & 1) == 0) ++j;
            acc = (acc << (jw + 1)) | ((int64_t)j << 1) | (colors[u] >> j & 1);
            ++slots;
        }
        for (; slots < delta; ++slots)
            acc = (acc << (jw + 1)) | (int64_t)0 << 1 | (colors[u] & 1);  // pad (0, own bit 0)
        out[u] = acc;
    }
    return out;
}

// ---- greedy sequential algorithms -----------------------------------------

namespace {

class GreedyMis : public SequentialAlgorithm {
  public:
    std::string name() const override { return "greedy_mis"; }
    int locality(int) const override { return 1; }
    SeqPair apply(int, const SeqView& view) const override {
        for (int j : view.neighbors(0))
            if (view.processed(j) && view.pair(j).s == 1) return {0, nullptr};
        return {1, nullptr};
    }
};

class GreedyColoring : public SequentialAlgorithm {
  public:
    std::string name() const override { return "greedy_coloring"; }
    int locality(int) const override { return 1; }
    SeqPair apply(int, const SeqView& view) const override {
        std::vector<int64_t> used;
        for (int j : view.neighbors(0))
            if (view.processed(j)) used.push_back(view.pair(j).s);
        int64_t c = 1;
        while (std::find(used.begin(), used.end(), c) != used.end()) ++c;
        return {c, nullptr};
    }
};

}  // namespace

std::shared_ptr<SequentialAlgorithm> greedy_mis_slocal() { return std::make_shared<GreedyMis>(); }
std::shared_ptr<SequentialAlgorithm> greedy_coloring_slocal() {
    return std::make_shared<GreedyColoring>();
}

// ---- Luby's MIS ------------------------------------------------------------

int luby_iteration_budget(int n) { return 2 * ceil_log2((uint64_t)std::max(n, 2)) + 8; }

namespace {

uint64_t label_word(const NodeLabel& l, int start, int w) {
    if (start + w > l.bit_count) throw std::out_of_range("tape budget exceeded");
    uint64_t v = 0;
    for (int i = 0; i < w; ++i) {
        int bit = (l.bits[(start + i) / 64] >> (63 - (start + i) % 64)) & 1;
        v = (v << 1) | (uint64_t)bit;
    }
    return v;
}

// (word, key) lexicographic comparison; the key makes the rule total
bool luby_wins(uint64_t wu, uint64_t ku, uint64_t wv, uint64_t kv) {
    if (wu != wv) return wu > wv;
    return ku > kv;
}

struct LubyState {
    int n = 0;
    int degree = 0;
    NodeLabel label;
    uint64_t key = 0;
    int iter = 0;
    uint64_t word = 0;
    int status = 0;  // 0 live, 1 in MIS, 2 removed
    int decided_iter = -1;
};

class LubyProtocol : public MessageProtocol {
  public:
    std::string name() const override { return "luby"; }
    int rounds(int n) const override { return 2 * luby_iteration_budget(n); }

    std::any init(int n, int degree, const NodeLabel& label,
                  const std::vector<PortAttr>&) const override {
        LubyState st;
        st.n = n;
        st.degree = degree;
        st.label = label;
        st.key = node_sort_key(label, 0);
        return st;
    }

    std::pair<std::any, std::string> step(int, int round, std::any state,
                                          const std::vector<std::string>& inbox) const override {
        LubyState st = std::any_cast<LubyState>(std::move(state));
        bool drawing = (round % 2) == 0;  // even steps: draw/broadcast, odd: decide
        if (drawing) {
            if (round > 0 && st.status == 0) {
                // a neighbor joined last round? then this node is removed
                for (const std::string& m : inbox)
                    if (m == "J") {
                        st.status = 2;
                        st.decided_iter = st.iter;
                        break;
                    }
                ++st.iter;
            }
            if (st.status != 0) return {std::move(st), std::string()};
            st.word = label_word(st.label, 64 * st.iter, 64);
            std::string msg = "W";
            msg.append((const char*)&st.word, 8);
            msg.append((const char*)&st.key, 8);
            return {std::move(st), std::move(msg)};
        }
        if (st.status != 0) return {std::move(st), std::string()};
        bool best = true;
        for (const std::string& m : inbox) {
            if (m.size() != 17 || m[0] != 'W') continue;
            uint64_t wv, kv;
            memcpy(&wv, m.data() + 1, 8);
            memcpy(&kv, m.data() + 9, 8);
            if (!luby_wins(st.word, st.key, wv, kv)) best = false;
        }
        if (best) {
            st.status = 1;
            st.decided_iter = st.iter;
            return {std::move(st), std::string("J")};
        }
        return {std::move(st), std::string()};
    }

    int64_t finalize(const std::any& state) const override {
        const LubyState& st = std::any_cast<const LubyState&>(state);
        if (st.status == 0) throw std::runtime_error("luby round budget exhausted");
        return st.status == 1 ? 1 : 0;
    }
};

}  // namespace

std::shared_ptr<MessageProtocol> luby_protocol() { return std::make_shared<LubyProtocol>(); }

LubyResult luby_mis(const Graph& g, const RandomTape& tape) {
    LubyResult r;
    r.in_mis.assign(g.n(), 0);
    std::vector<int> status(g.n(), 0);
    int live = g.n();
    int iter = 0;
    while (live > 0) {
        std::vector<uint64_t> word(g.n(), 0);
        for (int u = 0; u < g.n(); ++u)
            if (status[u] == 0) word[u] = tape.word(u, 64 * iter, 64);
        std::vector<int> joined;
        for (int u = 0; u < g.n(); ++u) {
            if (status[u] != 0) continue;
            bool best = true;
            for (int v : g.neighbors(u))
                if (status[v] == 0 && !luby_wins(word[u], (uint64_t)u, word[v], (uint64_t)v))
                    best = false;
            if (best) joined.push_back(u);
        }
        for (int u : joined) {
            status[u] = 1;
            r.in_mis[u] = 1;
            --live;
        }
        for (int u : joined)
            for (int v : g.neighbors(u))
                if (status[v] == 0) {
                    status[v] = 2;
                    --live;
                }
        ++iter;
        if (iter > 64 * g.n() + 64) throw std::runtime_error("luby did not terminate");
    }
    r.iterations = iter;
    return r;
}

// ---- randomized 3-coloring of oriented cycles ------------------------------

static void require_oriented_cycle(const Graph& g) {
    if (!g.oriented() || g.n() < 3) throw std::invalid_argument("need an oriented cycle");
    for (int u = 0; u < g.n(); ++u)
        if (g.degree(u) != 2 || g.successor(u) < 0 || g.predecessor(u) < 0)
            throw std::invalid_argument("need an oriented cycle");
}

std::vector<char> cycle_red_set(const Graph& cycle, const RandomTape& tape, CycleRule rule) {
    require_oriented_cycle(cycle);
    int n = cycle.n();
    std::vector<char> coin(n), red(n, 0);
    for (int u = 0; u < n; ++u) coin[u] = (char)tape.bit(u, 0);
    for (int u = 0; u < n; ++u) {
        int p = cycle.predecessor(u), s = cycle.successor(u);
        if (rule == CycleRule::independent)
            red[u] = coin[u] && !coin[p] && !coin[s];
        else
            red[u] = coin[u] && !coin[p];
    }
    return red;
}

Cycle3Result cycle_3color_randomized(const Graph& cycle, const RandomTape& tape,
                                     CycleRule rule) {
    std::vector<char> red = cycle_red_set(cycle, tape, rule);
    int n = cycle.n();
    if (std::find(red.begin(), red.end(), (char)1) == red.end())
        throw std::runtime_error("no selected node after phase 1; resample with a new seed");
    Cycle3Result r;
    r.colors.assign(n, 0);
    for (int u = 0; u < n; ++u) {
        if (!red[u]) continue;
        // walk forward from each red node, coloring until the next red
        r.colors[u] = 1;
        int d = 1, v = cycle.successor(u);
        while (!red[v]) {
            r.colors[v] = 2 + ((d - 1) & 1);
            v = cycle.successor(v);
            ++d;
        }
        r.max_run = std::max(r.max_run, d - 1);
    }
    r.rounds = 2 + r.max_run;
    return r;
}

namespace {

// color from the nearest red (rising-edge rule) within `window` hops back
class CycleWindowColor : public FunctionAlgorithm {
  public:
    explicit CycleWindowColor(int window) : window_(window) {}
    std::string name() const override { return "cycle3color_w" + std::to_string(window_); }
    int radius(int n) const override {
        (void)n;
        return window_;
    }
    int bit_demand() const override { return 1; }

    int64_t evaluate(int, const Ball& ball) const override {
        int x = 0;
        for (int d = 0; d < window_; ++d) {
            int p = ball.predecessor(x);
            if (p < 0) throw std::runtime_error("cycle window algorithm needs a cycle");
            int cx = coin(ball, x), cp = coin(ball, p);
            if (cx == 1 && cp == 0) return d == 0 ? 1 : 2 + ((d - 1) & 1);
            x = p;
        }
        return 2;  // no red visible: fallback (this is the failure event)
    }

  private:
    int window_;
    static int coin(const Ball& b, int i) {
        const NodeLabel& l = b.label(i);
        if (l.bit_count < 1) throw std::runtime_error("tape bit missing");
        return (int)(l.bits[0] >> 63) & 1;
    }
};

}  // namespace

std::shared_ptr<FunctionAlgorithm> cycle_color_window_fn(int window) {
    return std::make_shared<CycleWindowColor>(window);
}

// ---- Cole-Vishkin 3-coloring of oriented cycles ----------------------------

static int width_of(uint64_t v) { return ceil_log2(v + 1); }

int cv3_radius(uint64_t id_range) {
    int b = std::max(3, width_of(id_range - 1));
    int iters = 1;  // the final pass landing in 6 colors
    while (b > 3) {
        b = width_of(2 * (uint64_t)b - 1);
        ++iters;
    }
    return iters + 3;
}

namespace {

class Cv3Cycle : public FunctionAlgorithm {
  public:
    Cv3Cycle(uint64_t id_range, bool use_value_stack)
        : range_(id_range), values_(use_value_stack), radius_(cv3_radius(id_range)) {}

    std::string name() const override { return "cv3color"; }
    int radius(int) const override { return radius_; }

    int64_t evaluate(int, const Ball& ball) const override {
        int R = radius_;
        // lay out the oriented line [-R, R] around the center
        std::vector<int64_t> col(2 * R + 1, -1);
        int x = 0;
        for (int p = 0; p <= R; ++p) {
            col[R + p] = fake_id(ball, x);
            if (p < R) {
                x = ball.successor(x);
                if (x < 0) throw std::runtime_error("cv3 needs an oriented cycle");
            }
        }
        x = 0;
        for (int p = 0; p >= -R; --p) {
            col[R + p] = fake_id(ball, x);
            if (p > -R) {
                x = ball.predecessor(x);
                if (x < 0) throw std::runtime_error("cv3 needs an oriented cycle");
            }
        }
        int iters = radius_ - 3;
        int hi = R;  // valid upper bound of col (positions -R..hi)
        for (int it = 0; it < iters; ++it) {
            for (int p = -R; p < hi; ++p) {
                int64_t a = col[R + p], b = col[R + p + 1];
                if (a == b) throw std::runtime_error("cv3: adjacent equal colors");
                int j = 0;
                while (((a ^ b) >> j & 1) == 0) ++j;
                col[R + p] = 2 * j + (a >> j & 1);
            }
            --hi;
        }
        // shift colors 5, 4, 3 down into {0,1,2}
        int lo = -R;
        for (int64_t c = 5; c >= 3; --c) {
            std::vector<int64_t> next(col);
            for (int p = lo + 1; p < hi; ++p)
                if (col[R + p] == c) {
                    int64_t pick = 0;
                    while (pick == col[R + p - 1] || pick == col[R + p + 1]) ++pick;
                    next[R + p] = pick;
                }
            col = std::move(next);
            ++lo;
            --hi;
        }
        return col[R];
    }

  private:
    uint64_t range_;
    bool values_;
    int radius_;

    int64_t fake_id(const Ball& b, int i) const {
        const NodeLabel& l = b.label(i);
        int64_t v;
        if (values_) {
            if (l.values.empty()) throw std::runtime_error("cv3: missing fake id value");
            v = l.values.back();
        } else {
            if (l.id < 0) throw std::runtime_error("cv3: missing id");
            v = l.id;
        }
        if (v < 0 || (uint64_t)v >= range_)
            throw std::runtime_error("cv3: identifier exceeds advertised range");
        return v;
    }
};

}  // namespace

std::shared_ptr<FunctionAlgorithm> cv3_cycle_fn(uint64_t id_range, bool use_value_stack) {
    return std::make_shared<Cv3Cycle>(id_range, use_value_stack);
}

}  // namespace localsim
