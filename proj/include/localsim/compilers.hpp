#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "localsim/coloring.hpp"
#include "localsim/decomposition.hpp"
#include "localsim/engine.hpp"
#include "localsim/lll.hpp"
#include "localsim/problems.hpp"

namespace localsim {

// ---- SLOCAL -> LOCAL ------------------------------------------------------

// a decomposer takes the (power) graph it must decompose plus the ids
using Decomposer =
    std::function<NetworkDecomposition(const Graph&, const IdAssignment&)>;

struct CompiledRun {
    RunResult result;
    std::vector<int> witness_order;  // replaying it sequentially reproduces labels
    int decomposition_rounds = 0;
    int simulation_rounds = 0;
};

// Simulates `seq` color class by color class of a decomposition of
// G^t. Same-color clusters are farther than t apart, so their simulations
// cannot see each other's pairs; this is asserted on every read.
CompiledRun slocal_to_local_via_decomposition(const SequentialAlgorithm& seq, const Graph& g,
                                              const IdAssignment& ids,
                                              const Decomposer& decomposer,
                                              const Labeling& labels = {});

// Same, with a Linial coloring of G^t as the (diameter-0) decomposition.
CompiledRun slocal_to_local_via_coloring(const SequentialAlgorithm& seq, const Graph& g,
                                         const IdAssignment& ids, const Labeling& labels = {});

// ---- sequential composition -------------------------------------------------

// Runs a2 on the outputs of a1 in one sequential pass of locality
// max(t1+t2, 2*t2): each node fixes a1 around itself (recording the
// simulations it performed), then applies a2. a2 reads a1's output as the
// top label value of every view node.
class ComposedSequential : public SequentialAlgorithm {
  public:
    ComposedSequential(std::shared_ptr<const SequentialAlgorithm> a1,
                       std::shared_ptr<const SequentialAlgorithm> a2);
    std::string name() const override;
    int locality(int n) const override;
    SeqPair apply(int n, const SeqView& view) const override;
    void on_run_begin(int n) const override;

    // order of first simulation of a1 at each node during the last run
    const std::vector<int>& sigma1() const { return sigma1_; }

  private:
    std::shared_ptr<const SequentialAlgorithm> a1_, a2_;
    mutable std::vector<int> sigma1_;
};

std::shared_ptr<ComposedSequential> compose_sequential(
    std::shared_ptr<const SequentialAlgorithm> a1,
    std::shared_ptr<const SequentialAlgorithm> a2);

// wraps a plain sequential algorithm so it reads a supplied per-node input
// labeling from the top of the value stack (for composition replay tests)
SeqRun run_sequential_with_inputs(const SequentialAlgorithm& alg, const Graph& g,
                                  const std::vector<int64_t>& inputs,
                                  const std::vector<int>& order, const Labeling& base = {});

// ---- derandomization by conditional expectations ------------------------------

// X(u) predicate over a full tape (words in tape bit order, one per node)
using FailFn = std::function<bool(const Graph&, int, const std::vector<uint64_t>&)>;

// Exact failure-probability oracle for a randomized function algorithm: the
// probability that `problem` is violated at u after running `alg`, given a
// partially fixed tape. The read sets list the (node, bit) pairs the failure
// indicator actually depends on; everything else is enumeration-free.
class FailureOracle {
  public:
    FailureOracle(std::shared_ptr<const FunctionAlgorithm> alg, const LocalProblemSpec& problem,
                  const Graph& g, int bits_per_node);

    // replace the generic (engine-run) failure predicate with a direct one;
    // must compute the identical indicator (cross-checked in tests)
    void set_fast_fail(FailFn fn) { fast_ = std::move(fn); }

    int bits_per_node() const { return bits_per_node_; }
    int bits_read() const { return bits_read_; }
    const std::vector<std::vector<std::pair<int, int>>>& read_sets() const { return reads_; }

    bool fails(int u, const std::vector<uint64_t>& words) const;
    // exact: enumerate the free read bits of X(u)'s dependence set
    Dyadic prob(int u, const BitAssignment& fixed) const;
    // E[sum_u X(u) | fixed], an exact dyadic rational
    Dyadic total(const BitAssignment& fixed) const;
    // nodes whose failure indicator reads bits of v
    const std::vector<int>& dependents(int v) const { return dependents_[v]; }

  private:
    std::shared_ptr<const FunctionAlgorithm> alg_;
    const LocalProblemSpec* problem_;
    const Graph* g_;
    int bits_per_node_;
    int bits_read_;
    int radius_;
    FailFn fast_;
    std::vector<std::vector<std::pair<int, int>>> reads_;  // per node u: (node, bit)
    std::vector<std::vector<int>> check_nodes_;            // B(u, r)
    std::vector<std::vector<int>> dependents_;
};

struct DerandomizeResult {
    BitAssignment tape_bits;           // the fixed bits, one block per node
    std::vector<Dyadic> expectation_trace;  // after each node is fixed
    std::vector<int64_t> labels;       // final run of alg with the fixed tape
    CheckReport check;
};

// Conditional expectation derandomization: processes nodes in `order`,
// fixing each node's whole bit block to the lexicographically smallest
// value that does not increase E[sum X(u)]. Requires the initial
// expectation to be < 1; reports (throws) otherwise.
DerandomizeResult derandomize(std::shared_ptr<const FunctionAlgorithm> alg,
                              const LocalProblemSpec& problem, const Graph& g,
                              int bits_per_node, const std::vector<int>& order);
DerandomizeResult derandomize_with_oracle(std::shared_ptr<const FunctionAlgorithm> alg,
                                          const LocalProblemSpec& problem, const Graph& g,
                                          const FailureOracle& oracle,
                                          const std::vector<int>& order);

// ---- slowdown -------------------------------------------------------------

// alg'_n = alg_{f(n)}: lies upward about the graph size
class SlowedAlgorithm : public FunctionAlgorithm {
  public:
    SlowedAlgorithm(std::shared_ptr<const FunctionAlgorithm> alg,
                    std::function<int(int)> size_map);
    std::string name() const override;
    int radius(int n) const override;
    int64_t evaluate(int n, const Ball& ball) const override;
    int bit_demand() const override;

  private:
    std::shared_ptr<const FunctionAlgorithm> alg_;
    std::function<int(int)> f_;
};

std::shared_ptr<FunctionAlgorithm> slowdown(std::shared_ptr<const FunctionAlgorithm> alg,
                                            std::function<int(int)> size_map);

// ---- constant-size speedup ---------------------------------------------------

struct SpeedupParams {
    int n0 = 0;     // simulated size
    int r = 1;      // checkability radius of the problem
    int t0 = 0;     // radius of alg at n0
    int rho = 0;    // fake-id coloring radius, 2*(t0+r)
    int exponent = 3;  // fake ids must stay below n0^exponent
};

// checks the volume condition delta^0 + ... + delta^(t0+r) <= n0
bool speedup_condition(int delta, const SpeedupParams& p);

struct SpeedupRun {
    RunResult result;
    int coloring_rounds = 0;
    uint64_t color_range = 0;
};

// distance-color G^rho, then evaluate alg_{n0} with the colors as fake ids;
// refuses (throws) when the volume condition or the id range fails
SpeedupRun speedup_constantize(const FunctionAlgorithm& alg, const SpeedupParams& p,
                               const Graph& g, const IdAssignment& ids);

// formulate "alg_{n0} fails at u" as an LLL instance over per-node tapes
struct SpeedupLll {
    LLLInstance inst;
    std::vector<int> event_node;
};
SpeedupLll randomized_speedup_to_lll(std::shared_ptr<const FunctionAlgorithm> alg,
                                     const LocalProblemSpec& problem, const SpeedupParams& p,
                                     const Graph& g, int bits_per_node);

// run a randomized function algorithm with an explicit bit assignment as tape
std::vector<int64_t> run_with_bits(const FunctionAlgorithm& alg, const Graph& g,
                                   const BitAssignment& bits, int advertised_n = -1);

// ---- identifier-range reduction demo ---------------------------------------

// reduce huge ids to a poly(n)-range distance coloring of G^(2*(t+r)) and run
// alg with the colors as identifiers
RunResult run_with_reduced_ids(const FunctionAlgorithm& alg, const Graph& g,
                               const IdAssignment& huge_ids, int r);

}  // namespace localsim
