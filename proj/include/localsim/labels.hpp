#pragma once

#include <cstdint>
#include <vector>

#include "localsim/graph.hpp"

namespace localsim {

// Unique identifiers sampled without replacement from [1, n^C].
struct IdAssignment {
    std::vector<uint64_t> ids;
    uint64_t range_bound = 0;  // ids are in [1, range_bound]
    int exponent = 0;          // range_bound = n^exponent
};

IdAssignment assign_ids(const Graph& g, int exponent, uint64_t seed);
// ids increasing along the orientation of a path
IdAssignment assign_ids_increasing(const Graph& path, int exponent, uint64_t seed);

// Finite replayable randomness: exactly `budget` bits per node, regenerated
// bit-identically from (seed, n, budget). Consumers track how many bits they
// take per node and fail loudly past the budget.
class RandomTape {
  public:
    RandomTape() = default;
    RandomTape(int n, int budget_bits, uint64_t seed);

    int n() const { return n_; }
    int budget() const { return budget_; }
    uint64_t seed() const { return seed_; }

    // bit i of node u (0/1); i must be < budget
    int bit(int u, int i) const;
    // w consecutive bits starting at position `start` of node u, MSB-first
    uint64_t word(int u, int start, int w) const;

    const std::vector<uint64_t>& words_of(int u) const { return words_[u]; }

  private:
    int n_ = 0, budget_ = 0;
    uint64_t seed_ = 0;
    std::vector<std::vector<uint64_t>> words_;
};

// Per-node bit cursor over a tape; throws when a node exceeds the budget.
class TapeCursor {
  public:
    explicit TapeCursor(const RandomTape& t) : tape_(&t), pos_(t.n(), 0) {}
    int take_bit(int u);
    uint64_t take_word(int u, int w);
    int consumed(int u) const { return pos_[u]; }

  private:
    const RandomTape* tape_;
    std::vector<int> pos_;
};

// Per-node label bundle attached to balls: identifier, tape bits, plus a
// stack of generic integer values (partial outputs of pipeline stages).
struct NodeLabel {
    int64_t id = -1;  // -1 = no id
    std::vector<uint64_t> bits;
    int bit_count = 0;
    std::vector<int64_t> values;

    bool operator==(const NodeLabel&) const = default;
};

using Labeling = std::vector<NodeLabel>;

Labeling labeling_from_ids(const IdAssignment& ids);
Labeling labeling_from_tape(const RandomTape& tape);
// empty labels for n nodes
Labeling blank_labeling(int n);
// push one value per node onto the label stacks
void push_values(Labeling& l, const std::vector<int64_t>& vals);
void attach_ids(Labeling& l, const IdAssignment& ids);
void attach_tape(Labeling& l, const RandomTape& tape);

}  // namespace localsim
