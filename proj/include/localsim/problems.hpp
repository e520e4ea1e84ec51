#pragma once

#include <functional>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "localsim/ball.hpp"
#include "localsim/engine.hpp"
#include "localsim/graph.hpp"

namespace localsim {

struct CheckReport {
    bool valid = true;
    std::vector<std::pair<int, std::string>> violations;
};

// A local problem (S_out, r, allowed): the output label written at each
// node is the last entry of that node's label value stack inside the ball.
class LocalProblemSpec {
  public:
    LocalProblemSpec(std::string name, int radius, std::set<int64_t> s_out,
                     std::function<std::string(const Ball&)> violation)
        : name_(std::move(name)),
          radius_(radius),
          s_out_(std::move(s_out)),
          violation_(std::move(violation)) {}

    const std::string& name() const { return name_; }
    int radius() const { return radius_; }
    // empty set means "any integer label"
    bool label_allowed(int64_t v) const { return s_out_.empty() || s_out_.count(v) > 0; }
    const std::set<int64_t>& s_out() const { return s_out_; }

    // empty string = ball allowed; otherwise a human-readable reason
    std::string violation(const Ball& b) const { return violation_(b); }
    bool allowed(const Ball& b) const { return violation_(b).empty(); }

  private:
    std::string name_;
    int radius_;
    std::set<int64_t> s_out_;
    std::function<std::string(const Ball&)> violation_;
};

// output label of ball node i (top of the value stack)
int64_t ball_out(const Ball& b, int i);

// Checks `out` against the spec: every node whose r-ball fails `allowed`
// is reported. `input` (ids/tape/earlier values) rides along in the balls.
CheckReport check_solution(const LocalProblemSpec& spec, const Graph& g,
                           const std::vector<int64_t>& out, const Labeling& input = {});

// ---- builtins ----------------------------------------------------------

// proper coloring with colors {base, ..., base+k-1}
LocalProblemSpec proper_coloring(int k, int64_t base = 1);
// selected = 1, unselected = 0
LocalProblemSpec mis();
// Edge-labeled via port masks: each node's label carries one bit per
// incident edge whose min endpoint it is (bit i of node u = orientation of
// the i-th such edge in u's sorted neighbor order; 1 = away from u).
// A node of full degree must have an outgoing edge.
LocalProblemSpec sinkless_orientation(int delta);
// each node outputs an incident edge color; neighbors must not grab the
// edge between them
LocalProblemSpec edge_grabbing();

// Direct checker for the port-mask encoded sinkless orientation (the mask
// bit positions reference global port order, so this one reads the graph).
CheckReport check_sinkless(const Graph& g, const std::vector<int64_t>& labels, int delta);

// ---- sinkless orientation label encoding --------------------------------

// orientation[e] = true when edge e points from min to max endpoint
std::vector<int64_t> encode_orientation(const Graph& g, const std::vector<bool>& fwd);
std::vector<bool> decode_orientation(const Graph& g, const std::vector<int64_t>& labels);
// does node u have an outgoing edge under fwd?
bool has_outgoing(const Graph& g, int u, const std::vector<bool>& fwd);

// ---- table-driven LCL ---------------------------------------------------

// JSON: {name, S_in, S_out, r, delta, allowed_balls: [encodings]}
// Balls are matched by canonical encoding; feasible for r <= 2, small delta.
class LclTable {
  public:
    std::string name;
    std::vector<int64_t> s_in, s_out;
    int r = 1;
    int delta = 0;
    std::set<std::vector<uint64_t>> allowed_balls;

    LocalProblemSpec to_spec() const;
    std::string to_json() const;
    static LclTable from_json(const std::string& text);
};

// enumerate the canonical encodings of all output-labeled r-balls of
// degree <= delta that satisfy `keep` (builds tables from predicates)
LclTable build_lcl_table(const std::string& name, const LocalProblemSpec& base, int delta,
                         std::vector<int64_t> s_out);

}  // namespace localsim
