#include "localsim/labels.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include "localsim/util.hpp"

namespace localsim {

static std::vector<uint64_t> sample_distinct(uint64_t lo, uint64_t hi, int count,
                                             uint64_t seed) {
    // uniform without replacement from [lo, hi]
    if (hi - lo + 1 < (uint64_t)count) throw std::invalid_argument("id range too small");
    std::unordered_set<uint64_t> seen;
    std::vector<uint64_t> out;
    out.reserve(count);
    uint64_t state = splitmix64(seed ^ 0x1d5ULL);
    uint64_t span = hi - lo + 1;
    while ((int)out.size() < count) {
        state = splitmix64(state);
        uint64_t v = lo + state % span;
        if (seen.insert(v).second) out.push_back(v);
    }
    return out;
}

IdAssignment assign_ids(const Graph& g, int exponent, uint64_t seed) {
    if (exponent < 1) throw std::invalid_argument("id exponent must be >= 1");
    IdAssignment a;
    a.exponent = exponent;
    a.range_bound = pow_checked(std::max(g.n(), 1), exponent);
    a.ids = sample_distinct(1, a.range_bound, g.n(), seed);
    return a;
}

IdAssignment assign_ids_increasing(const Graph& path, int exponent, uint64_t seed) {
    if (!path.oriented()) throw std::invalid_argument("increasing ids need an oriented path");
    IdAssignment a = assign_ids(path, exponent, seed);
    std::vector<uint64_t> sorted = a.ids;
    std::sort(sorted.begin(), sorted.end());
    // find the start of the path (no predecessor) and walk the orientation
    int start = -1;
    for (int u = 0; u < path.n(); ++u)
        if (path.predecessor(u) < 0) {
            if (start >= 0) throw std::invalid_argument("not a single path");
            start = u;
        }
    if (start < 0) throw std::invalid_argument("graph is not a path (found a cycle)");
    int u = start;
    for (int i = 0; i < path.n(); ++i) {
        a.ids[u] = sorted[i];
        u = path.successor(u);
    }
    return a;
}

RandomTape::RandomTape(int n, int budget_bits, uint64_t seed)
    : n_(n), budget_(budget_bits), seed_(seed) {
    int words = (budget_bits + 63) / 64;
    words_.assign(n, {});
    for (int u = 0; u < n; ++u) {
        words_[u].resize(words);
        uint64_t s = splitmix64(seed ^ splitmix64((uint64_t)u + 1));
        for (int w = 0; w < words; ++w) {
            s = splitmix64(s);
            words_[u][w] = s;
        }
    }
}

int RandomTape::bit(int u, int i) const {
    if (i >= budget_) throw std::out_of_range("tape budget exceeded");
    return (words_[u][i / 64] >> (63 - (i % 64))) & 1;
}

uint64_t RandomTape::word(int u, int start, int w) const {
    if (w < 0 || w > 64) throw std::invalid_argument("word width");
    uint64_t v = 0;
    for (int i = 0; i < w; ++i) v = (v << 1) | (uint64_t)bit(u, start + i);
    return v;
}

int TapeCursor::take_bit(int u) {
    int b = tape_->bit(u, pos_[u]);
    ++pos_[u];
    return b;
}

uint64_t TapeCursor::take_word(int u, int w) {
    uint64_t v = tape_->word(u, pos_[u], w);
    pos_[u] += w;
    return v;
}

Labeling labeling_from_ids(const IdAssignment& ids) {
    Labeling l(ids.ids.size());
    attach_ids(l, ids);
    return l;
}

Labeling labeling_from_tape(const RandomTape& tape) {
    Labeling l(tape.n());
    attach_tape(l, tape);
    return l;
}

Labeling blank_labeling(int n) { return Labeling(n); }

void push_values(Labeling& l, const std::vector<int64_t>& vals) {
    if (vals.size() != l.size()) throw std::invalid_argument("value vector size mismatch");
    for (size_t i = 0; i < l.size(); ++i) l[i].values.push_back(vals[i]);
}

void attach_ids(Labeling& l, const IdAssignment& ids) {
    if (ids.ids.size() != l.size()) throw std::invalid_argument("id vector size mismatch");
    for (size_t i = 0; i < l.size(); ++i) l[i].id = (int64_t)ids.ids[i];
}

void attach_tape(Labeling& l, const RandomTape& tape) {
    if ((size_t)tape.n() != l.size()) throw std::invalid_argument("tape size mismatch");
    for (size_t i = 0; i < l.size(); ++i) {
        l[i].bits = tape.words_of((int)i);
        l[i].bit_count = tape.budget();
    }
}

int thread_cap() {
    const char* env = std::getenv("LOCALSIM_THREADS");
    if (!env) return (int)std::thread::hardware_concurrency();
    int v = std::atoi(env);
    return v > 0 ? v : 1;
}

void parallel_for(int begin, int end, const std::function<void(int)>& body) {
    int total = end - begin;
    int workers = std::min(thread_cap(), total);
    if (workers <= 1 || total < 256) {
        for (int i = begin; i < end; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next(begin);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < end; i = next.fetch_add(1)) body(i);
        });
    for (auto& t : pool) t.join();
}

std::string Dyadic::to_string() const {
    // "num/2^exp" with num printed in decimal
    unsigned __int128 v = num;
    std::string digits;
    if (v == 0) digits = "0";
    while (v > 0) {
        digits.push_back('0' + (char)(int)(v % 10));
        v /= 10;
    }
    std::reverse(digits.begin(), digits.end());
    return digits + "/2^" + std::to_string(exp);
}

}  // namespace localsim
