#pragma once

#include <cstdint>
#include <vector>

#include "localsim/graph.hpp"
#include "localsim/labels.hpp"

namespace localsim {

// Edge inside a ball, in canonical node indices (u < v).
// dir: +1 oriented u->v, -1 oriented v->u, 0 unoriented. color: -1 if none.
struct BallEdge {
    int u, v;
    int dir;
    int color;
    bool operator==(const BallEdge&) const = default;
};

struct RawBall;

// A radius-r labeled neighborhood in canonical form: node 0 is the center
// and the node numbering depends only on the labeled isomorphism type of
// the ball (label-preserving isomorphisms fixing the center map to the
// identical object). Function-view algorithms receive exactly this.
class Ball {
  public:
    int size() const { return (int)dist_.size(); }
    int radius() const { return radius_; }

    int dist(int i) const { return dist_.at(i); }
    // true degree in the host graph (boundary nodes keep their real degree)
    int degree(int i) const { return degree_.at(i); }
    const NodeLabel& label(int i) const { return labels_.at(i); }
    const std::vector<int>& neighbors(int i) const { return adj_.at(i); }
    const std::vector<BallEdge>& edges() const { return edges_; }

    // (dir, color) of the edge i--j with dir relative to i (+1 = i->j);
    // throws if not adjacent
    std::pair<int, int> edge_between(int i, int j) const;

    // all nodes at exactly distance d; throws past the radius so that an
    // algorithm overreaching its declared locality is rejected
    std::vector<int> nodes_at(int d) const;

    // successor of node i along the orientation inside the ball (-1 if none)
    int successor(int i) const;
    int predecessor(int i) const;

    // engine bookkeeping: canonical index -> key in the host structure.
    // Not part of the encoding; algorithms must not use it.
    int original(int i) const { return orig_.at(i); }

    const std::vector<uint64_t>& encoding() const { return encoding_; }

  private:
    friend Ball canonicalize_ball(const RawBall&);
    int radius_ = 0;
    std::vector<int> dist_, degree_;
    std::vector<NodeLabel> labels_;
    std::vector<std::vector<int>> adj_;
    std::vector<BallEdge> edges_;
    std::vector<int> orig_;
    std::vector<uint64_t> encoding_;
};

// Raw (pre-canonical) ball data; `edges` entries are positions into the
// node arrays with dir relative to (a, b) as listed.
struct RawBall {
    int radius = 0;
    int center = 0;  // position
    std::vector<int> keys;
    std::vector<int> dist, degree;
    std::vector<NodeLabel> labels;
    struct RawEdge {
        int a, b, dir, color;
    };
    std::vector<RawEdge> edges;
};

Ball canonicalize_ball(const RawBall& raw);
Ball extract_ball(const Graph& g, int center, int r, const Labeling& labels);

}  // namespace localsim
