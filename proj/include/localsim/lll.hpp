#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "localsim/graph.hpp"
#include "localsim/labels.hpp"
#include "localsim/util.hpp"

namespace localsim {

// Bipartite variable-event structure with exact dyadic probability oracles.
struct LLLInstance {
    struct Variable {
        int bits = 1;
    };
    struct Event {
        std::vector<int> vars;
        // either an explicit list of violating full assignments (packed in
        // var order, bit 0 of vars[0] at the lowest slot), or a single
        // required conjunction (e.g. "all edges point in")
        std::vector<uint64_t> violating;
        std::vector<uint8_t> conjunction;  // one required bit per var slot
        bool is_conjunction() const { return !conjunction.empty(); }
        int total_bits = 0;
    };
    std::vector<Variable> variables;
    std::vector<Event> events;

    int delta_rv() const;   // max events on one variable
    int delta_be() const;   // max variables of one event
    int delta_dep() const;  // dependency-graph max degree

    std::string to_json() const;
    static LLLInstance from_json(const std::string& text);
};

// fixed bit prefixes per variable (bit j valid when j < fixed[v])
struct BitAssignment {
    std::vector<int> fixed;
    std::vector<uint64_t> bits;

    static BitAssignment empty_for(const LLLInstance& inst);
    int bit(int v, int j) const { return (int)(bits[v] >> j) & 1; }
    void set_bit(int v, int j, int val);
    bool fully_fixed(const LLLInstance& inst) const;
};

// exact conditional probability of the event given the fixed prefix
Dyadic event_cond_prob(const LLLInstance& inst, int event, const BitAssignment& a);
// independent reference oracle: enumerate all completions (tests)
Dyadic event_cond_prob_bruteforce(const LLLInstance& inst, int event, const BitAssignment& a);

// bad events adjacent iff they share a random variable
Graph dependency_graph(const LLLInstance& inst);

// ---- criteria ------------------------------------------------------------

enum class Criterion { holds, fails, indeterminate };
struct CriterionReport {
    Criterion verdict = Criterion::holds;
    Dyadic max_p;
    int delta = 0;
    std::string detail;
};
// tight: p*(delta+1) <= 1/e via a certified rational bracket of 1/e;
// relaxed: p * delta^C <= 1 exactly
CriterionReport check_criterion_tight(const LLLInstance& inst);
CriterionReport check_criterion_relaxed(const LLLInstance& inst, int C);

// ---- Fischer-Ghaffari first phase -----------------------------------------

struct ShatterResult {
    BitAssignment assignment;
    std::vector<char> frozen;            // per variable
    std::vector<int> residual_events;    // conditional probability > 0
    std::vector<std::vector<int>> components;  // residual dependency components
    int max_component = 0;
};

// Samples variable bits in `order`, freezing the entire variable
// neighborhood of any event whose conditional probability crosses 1/(6*delta).
// Every event ends at conditional probability <= 1/(3*delta), exactly.
ShatterResult fg_first_phase(const LLLInstance& inst, const std::vector<int>& order,
                             const RandomTape& tape);

// ---- residual finisher ------------------------------------------------------

inline constexpr int kResidualSearchCapBits = 24;

// Exhaustive lexicographic search over the component's free bits; existence
// is guaranteed by the local lemma, so search exhaustion is fatal. Components
// with more than kResidualSearchCapBits free bits fall back to Moser-Tardos
// restricted to the component.
void solve_residual(const LLLInstance& inst, const std::vector<int>& component,
                    BitAssignment& a, const RandomTape& tape);

// ---- Moser-Tardos resampling -------------------------------------------------

struct MtResult {
    BitAssignment assignment;
    int resamples = 0;
};
MtResult moser_tardos(const LLLInstance& inst, const RandomTape& tape, int max_resamples);

// ---- sinkless orientation encoding -------------------------------------------

struct SinklessInstance {
    LLLInstance inst;
    std::vector<int> event_node;  // event index -> graph node
    // decode a full assignment into per-edge orientation (true: min->max)
    std::vector<bool> decode(const Graph& g, const BitAssignment& a) const;
};
// one 1-bit variable per edge; one event per node of degree delta
SinklessInstance sinkless_to_lll(const Graph& g);

}  // namespace localsim
