#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "localsim/graph.hpp"
#include "localsim/labels.hpp"
#include "localsim/problems.hpp"

namespace localsim {

struct NetworkDecomposition {
    std::vector<int> color;    // in [0, c)
    std::vector<int> cluster;  // cluster ids, unique across colors
    int c = 0;
    int d = 0;  // measured diameter bound
    bool weak = false;

    std::string to_json() const;
    static NetworkDecomposition from_json(const std::string& text);
};

struct PartialClustering {
    std::vector<int> cluster;  // -1 = not clustered
    int clustered_count = 0;
    int max_diameter = 0;  // max distance to the cluster source, doubled
};

// ---- sequential ball carving (strong diameter) --------------------------

struct CarveStats {
    int phases = 0;
    std::vector<int> clustered_per_phase;
    std::vector<int> killed_per_phase;
    int max_radius = 0;
};

NetworkDecomposition ball_carving_sequential(const Graph& g, CarveStats* stats = nullptr);

// ---- deterministic distributed decomposition (weak diameter) ------------

struct DistDecompStats {
    int bits = 0;                     // b = identifier bit length
    int steps_per_phase = 0;          // 10 * b * ceil(log2 n)
    std::vector<int> deleted_per_phase;  // per phase of the last carving
    int max_growth_steps = 0;
    int carvings = 0;
};

// One b-phase carving: clusters >= half of the surviving nodes.
// Exposes the per-phase invariants for the validator tests.
PartialClustering distributed_carving(const Graph& g, const std::vector<uint64_t>& ids,
                                      int bits, DistDecompStats* stats = nullptr);

NetworkDecomposition distributed_decomposition(const Graph& g, const IdAssignment& ids,
                                               DistDecompStats* stats = nullptr);

// ---- MPX clustering (randomized) -----------------------------------------

struct MpxStats {
    int T = 0;
    int capped_headstarts = 0;
};

PartialClustering mpx_clustering(const Graph& g, uint64_t seed, MpxStats* stats = nullptr);
NetworkDecomposition mpx_decomposition(const Graph& g, uint64_t seed);

// ---- validation -----------------------------------------------------------

// checks: every node colored/clustered once, same-color clusters are not
// adjacent, and each cluster meets the declared diameter kind and bound
CheckReport validate_decomposition(const Graph& g, const NetworkDecomposition& nd);

// non-adjacency of clusters in a partial clustering
CheckReport validate_partial(const Graph& g, const PartialClustering& pc);

}  // namespace localsim
