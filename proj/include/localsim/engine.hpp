#pragma once

#include <any>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "localsim/ball.hpp"
#include "localsim/graph.hpp"
#include "localsim/labels.hpp"

namespace localsim {

struct RunResult {
    std::vector<int64_t> labels;
    int rounds_used = 0;
    int locality_used = 0;
    std::vector<int64_t> messages_per_round;
    std::vector<int64_t> bytes_per_round;
    nlohmann::json extra;

    nlohmann::json to_json(const std::string& algorithm, int n) const;
};

// ---- function view ----------------------------------------------------

// A local algorithm as a pure map from (n, canonical ball) to a label.
class FunctionAlgorithm {
  public:
    virtual ~FunctionAlgorithm() = default;
    virtual std::string name() const = 0;
    virtual int radius(int n) const = 0;
    virtual int64_t evaluate(int n, const Ball& ball) const = 0;
    // bits of the node tape this algorithm actually reads (per node)
    virtual int bit_demand() const { return 0; }
};

// ---- message view -----------------------------------------------------

// Orientation/color of one incident edge as the node sees it at start.
struct PortAttr {
    int dir;    // +1 outgoing, -1 incoming, 0 unoriented
    int color;  // -1 if uncolored
};

// Synchronous message-passing protocol. In each round every node computes
// (new state, outgoing message) from its state and the messages received
// on its ports; the outgoing message is broadcast on all ports ("" stays
// silent). Ports are the neighbor-list positions sorted by neighbor key
// (identifier when present, else leading tape bits).
class MessageProtocol {
  public:
    virtual ~MessageProtocol() = default;
    virtual std::string name() const = 0;
    virtual int rounds(int n) const = 0;
    virtual std::any init(int n, int degree, const NodeLabel& label,
                          const std::vector<PortAttr>& ports) const = 0;
    virtual std::pair<std::any, std::string> step(int n, int round, std::any state,
                                                  const std::vector<std::string>& inbox) const = 0;
    virtual int64_t finalize(const std::any& state) const = 0;
    virtual int bit_demand() const { return 0; }
};

struct EngineOptions {
    bool audit_purity = false;  // re-evaluate cache hits and assert equality
};

// advertised_n < 0 means the true g.n(); slowdown compilers pass a lie here
RunResult run_function_mode(const FunctionAlgorithm& alg, const Graph& g,
                            const Labeling& labels, int advertised_n = -1,
                            const EngineOptions& opt = {});
RunResult run_message_mode(const MessageProtocol& p, const Graph& g, const Labeling& labels,
                           int advertised_n = -1);

std::shared_ptr<MessageProtocol> protocol_from_function(
    std::shared_ptr<const FunctionAlgorithm> alg);
std::shared_ptr<FunctionAlgorithm> function_from_protocol(
    std::shared_ptr<const MessageProtocol> p);

// ---- sequential view --------------------------------------------------

struct SeqPair {
    int64_t s = 0;
    std::shared_ptr<const std::any> aux;  // null if the algorithm stores nothing
};

// The t-ball a sequential algorithm sees: induced subgraph in a fixed
// deterministic (distance, node index) order, input labels, and the (s,t)
// pairs of already-processed nodes inside it.
class SeqView {
  public:
    int size() const { return (int)nodes_.size(); }
    int dist(int i) const { return dist_.at(i); }
    int degree(int i) const { return degree_.at(i); }
    // stable node handle (the underlying node index)
    int handle(int i) const { return nodes_.at(i); }
    const NodeLabel& label(int i) const { return labels_.at(i); }
    const std::vector<int>& neighbors(int i) const { return adj_.at(i); }
    bool processed(int i) const { return pairs_.at(i) != nullptr; }
    const SeqPair& pair(int i) const;
    std::pair<int, int> edge_attr(int i, int j) const;  // (dir relative to i, color)

  private:
    friend SeqView make_seq_view(const Graph&, int, int, const Labeling&,
                                 const std::vector<const SeqPair*>&);
    friend SeqView assemble_seq_view(std::vector<int>, std::vector<int>, std::vector<int>,
                                     std::vector<NodeLabel>, std::vector<std::vector<int>>,
                                     std::vector<std::vector<std::pair<int, int>>>,
                                     std::vector<const SeqPair*>);
    std::vector<int> nodes_, dist_, degree_;
    std::vector<NodeLabel> labels_;
    std::vector<std::vector<int>> adj_;
    std::vector<std::vector<std::pair<int, int>>> eattr_;
    std::vector<const SeqPair*> pairs_;
};

SeqView make_seq_view(const Graph& g, int center, int r, const Labeling& labels,
                      const std::vector<const SeqPair*>& pairs);

// assembles a view from explicit parts (composition internals); the caller
// supplies nodes in (distance, handle) order with position-indexed adjacency
SeqView assemble_seq_view(std::vector<int> handles, std::vector<int> dist,
                          std::vector<int> degree, std::vector<NodeLabel> labels,
                          std::vector<std::vector<int>> adj,
                          std::vector<std::vector<std::pair<int, int>>> eattr,
                          std::vector<const SeqPair*> pairs);

class SequentialAlgorithm {
  public:
    virtual ~SequentialAlgorithm() = default;
    virtual std::string name() const = 0;
    virtual int locality(int n) const = 0;
    virtual SeqPair apply(int n, const SeqView& view) const = 0;
    virtual void on_run_begin(int n) const { (void)n; }
};

// order callback: given processed flags and current outputs, pick the next
// unprocessed node (adversarial orders for "regardless of the order" tests)
using OrderCallback =
    std::function<int(const std::vector<char>& processed, const std::vector<int64_t>& out)>;

struct SeqRun {
    RunResult result;
    std::vector<int> order;          // the order actually used
    std::vector<SeqPair> pairs;      // final (s, aux) per node
    size_t max_aux_bytes = 0;        // coarse: count of aux entries stored
};

SeqRun run_sequential(const SequentialAlgorithm& alg, const Graph& g,
                      const std::vector<int>& order, const Labeling& labels,
                      int advertised_n = -1);
SeqRun run_sequential_random(const SequentialAlgorithm& alg, const Graph& g, uint64_t seed,
                             const Labeling& labels, int advertised_n = -1);
SeqRun run_sequential_adversarial(const SequentialAlgorithm& alg, const Graph& g,
                                  const OrderCallback& pick, const Labeling& labels,
                                  int advertised_n = -1);

// key used to sort ports and break message-mode ties deterministically
uint64_t node_sort_key(const NodeLabel& l, int fallback_index);

}  // namespace localsim
