#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "localsim/engine.hpp"
#include "localsim/graph.hpp"
#include "localsim/labels.hpp"

namespace localsim {

// Delta-cover-free family over ground [0, ground): no set is covered by the
// union of delta others. The polynomial construction takes the graphs of
// degree-<=d polynomials over F_q with q > delta*d and q^(d+1) >= k; two
// distinct polynomials agree on at most d points, so delta sets cover at
// most delta*d < q points of another set.
class CoverFreeFamily {
  public:
    static CoverFreeFamily polynomial(uint64_t k, int delta);
    static CoverFreeFamily polynomial_fixed(uint64_t k, int delta, int d, uint64_t q);
    static CoverFreeFamily explicit_family(std::vector<std::vector<int>> sets, int delta,
                                           int ground);

    uint64_t k() const { return k_; }
    int ground() const { return ground_; }
    int delta() const { return delta_; }
    bool is_polynomial() const { return sets_.empty(); }
    int poly_degree() const { return d_; }
    uint64_t prime() const { return q_; }

    std::vector<int> set_of(uint64_t index) const;

  private:
    uint64_t k_ = 0;
    int ground_ = 0, delta_ = 0, d_ = 0;
    uint64_t q_ = 0;
    std::vector<std::vector<int>> sets_;  // explicit mode
};

// ---- Linial color reduction -------------------------------------------

// One LOCAL round: node u with set S(c_u) takes the minimum ground element
// outside its neighbors' sets. Input must be a proper coloring in [0, k).
std::vector<int64_t> linial_reduce_once(const Graph& g, const std::vector<int64_t>& colors,
                                        const CoverFreeFamily& fam);

struct LinialResult {
    std::vector<int64_t> colors;
    int rounds = 0;
    uint64_t color_range = 0;  // colors are in [0, color_range)
};

// Iterate reductions from an arbitrary proper coloring in [0, k0) until the
// range bound stops shrinking, then one more pass with the small-range
// family (degree-3 polynomials, q = first prime > 3*delta) when it helps.
LinialResult linial_color_from(const Graph& g, const std::vector<int64_t>& colors0,
                               uint64_t k0);
// ids as the initial coloring
LinialResult linial_color(const Graph& g, const IdAssignment& ids);
// proper coloring of power_graph(g, rho); colors unique inside every rho-ball
LinialResult distance_coloring(const Graph& g, int rho, const IdAssignment& ids);

// the implementation constant: final color count <= kLinialC0 * delta^2
inline constexpr int kLinialC0 = 16;

// ---- Cole-style bit reduction -----------------------------------------

// Input colors are k_bits-bit strings forming a proper coloring; each node
// records, per port, an index where its string differs from the neighbor's
// plus its own bit there. Output width is delta*(ceil_log2(k_bits)+1) bits.
std::vector<int64_t> cole_reduce(const Graph& g, const std::vector<int64_t>& colors,
                                 int k_bits);
int cole_output_bits(int k_bits, int delta);

// ---- greedy sequential algorithms ---------------------------------------

std::shared_ptr<SequentialAlgorithm> greedy_mis_slocal();           // 1 = selected
std::shared_ptr<SequentialAlgorithm> greedy_coloring_slocal();      // colors 1..delta+1

// ---- Luby's MIS ----------------------------------------------------------

struct LubyResult {
    std::vector<int64_t> in_mis;
    int iterations = 0;
};
// direct simulation: each iteration every live node draws a 64-bit word;
// local maxima join, neighbors of joiners leave
LubyResult luby_mis(const Graph& g, const RandomTape& tape);
// the same algorithm as a message protocol (2 rounds per iteration)
std::shared_ptr<MessageProtocol> luby_protocol();
int luby_iteration_budget(int n);

// ---- randomized 3-coloring of oriented cycles ---------------------------

enum class CycleRule {
    independent,  // coin per node; selected iff 1 and both neighbors 0
    rising_edge,  // selected iff own coin 1 and predecessor coin 0
};

struct Cycle3Result {
    std::vector<int64_t> colors;  // 1 = red, then 2/3 alternating
    int rounds = 0;
    int max_run = 0;  // longest stretch with no red predecessor
};
Cycle3Result cycle_3color_randomized(const Graph& cycle, const RandomTape& tape,
                                     CycleRule rule = CycleRule::independent);

// per-node red indicator for a given rule (window statistics, tests)
std::vector<char> cycle_red_set(const Graph& cycle, const RandomTape& tape, CycleRule rule);

// Function-view variant used by the derandomizer: color from the nearest
// red within `window` hops backward (rising-edge rule, 1 tape bit/node);
// falls back to color 2 when no red is visible.
std::shared_ptr<FunctionAlgorithm> cycle_color_window_fn(int window);

// ---- Cole-Vishkin 3-coloring of oriented cycles -------------------------

// Function algorithm solving 3-coloring on oriented cycles of any size,
// reading per-node ids (or fake ids pushed as the top label value) bounded
// by id_range. Radius = iterations(id_range) + 3.
std::shared_ptr<FunctionAlgorithm> cv3_cycle_fn(uint64_t id_range, bool use_value_stack);
int cv3_radius(uint64_t id_range);

}  // namespace localsim
