#pragma once

#include <array>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "dagreal/error_exp.hpp"
#include "dagreal/node.hpp"

namespace dagreal {

/// Output of the serial preprocessing step: which nodes must be recomputed
/// and to what absolute error.
struct EvalPlan {
  Node* root = nullptr;
  ErrorExp q;
  std::vector<Node*> order;                              // demanded nodes, children first
  std::unordered_map<const Node*, ErrorExp> targets;     // demanded nodes only
  std::vector<Node*> dirty;                              // subsequence of order

  ErrorExp target(const Node* n) const { return targets.at(n); }
};

/// Propagates the root target q downwards. Nodes whose cached approximation
/// already meets their target, and everything only they demand, are left
/// clean. Requires magnitude bounds (Node::bounds): an upper bound for every
/// multiplied or divided operand and a lower bound for every divisor and
/// radicand, else throws EvalError(missing_magnitude_bound).
EvalPlan assign_targets(Node& root, ErrorExp q);

/// Per-kind operation counters; negation is tallied with subtraction.
struct OpCounts {
  std::uint64_t add = 0;
  std::uint64_t sub = 0;
  std::uint64_t mul = 0;
  std::uint64_t div = 0;
  std::uint64_t root = 0;

  void record(OpKind kind);
  std::uint64_t total() const { return add + sub + mul + div + root; }
  OpCounts& operator+=(const OpCounts& o);
};

/// Recomputes one dirty node from its children's approximations so that
/// |approx - value| <= 2^target, then refreshes its magnitude bounds. Touches
/// no node other than `node`.
void compute_node(Node& node, ErrorExp target);

/// Serial reference execution of a plan.
Approximation evaluate_plan(const EvalPlan& plan, OpCounts* counts = nullptr);

/// Tightens node.bounds from its filter and cached approximation.
void refine_bounds(Node& node);

/// Next value of the global completion sequence (instrumentation).
std::uint64_t next_eval_stamp();

}  // namespace dagreal
