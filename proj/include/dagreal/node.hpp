#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "dagreal/bigfloat.hpp"
#include "dagreal/error_exp.hpp"
#include "dagreal/interval.hpp"

namespace dagreal {

enum class OpKind : std::uint8_t { leaf, neg, root, add, sub, mul, div };

const char* to_string(OpKind kind) noexcept;
std::size_t arity(OpKind kind) noexcept;
/// Kinds that may belong to an operator tree: + - * / and unary minus.
constexpr bool is_operator(OpKind kind) noexcept {
  return kind == OpKind::add || kind == OpKind::sub || kind == OpKind::mul ||
         kind == OpKind::div || kind == OpKind::neg;
}

/// |value - exact| <= 2^error.
struct Approximation {
  BigFloat value;
  ErrorExp error;
};

/// Bounds on floor(log2 |v|). upper: |v| < 2^(upper+1); lower: |v| >= 2^lower.
struct MagnitudeBounds {
  std::optional<std::int64_t> upper;
  std::optional<std::int64_t> lower;
  bool zero = false;  // value is known to be exactly 0
};

/// BFMSS-style parameters: log2 u(E) <= log_u, log2 l(E) <= log_l.
struct SeparationParams {
  std::int64_t log_u = 0;
  std::int64_t log_l = 0;
};

class Node;
using NodePtr = std::shared_ptr<Node>;

/// One vertex of an expression dag.
///
/// Structure (kind, children) is fixed at construction except for
/// replace_with(), which restructuring uses to rewrite a subtree root in place
/// without changing its value. parent_count() is the number of incoming edges
/// from live nodes, multi-edges counted with multiplicity.
///
/// The public fields after the structural accessors are evaluation caches.
/// They are written by the evaluator in its serial phases, or during parallel
/// execution only by the task that owns the node.
class Node {
 public:
  explicit Node(BigFloat value);
  Node(OpKind kind, NodePtr a, NodePtr b = nullptr, unsigned root_index = 0);
  ~Node();

  Node(const Node&) = delete;
  Node& operator=(const Node&) = delete;

  OpKind kind() const noexcept { return kind_; }
  unsigned root_index() const noexcept { return root_k_; }
  std::size_t arity() const noexcept { return dagreal::arity(kind_); }
  Node* child(std::size_t i) const noexcept { return children_[i].get(); }
  const NodePtr& child_ptr(std::size_t i) const noexcept { return children_[i]; }
  std::uint32_t parent_count() const noexcept { return parent_count_; }
  const BigFloat& leaf_value() const { return *leaf_; }
  const FilterInterval& filter() const noexcept { return filter_; }

  /// Rewrites this node into `kind(a, b)`; the new structure must denote the
  /// same value. Caches stay valid.
  void replace_with(OpKind kind, NodePtr a, NodePtr b = nullptr, unsigned root_index = 0);

  std::optional<Approximation> approx;
  MagnitudeBounds bounds;
  std::optional<SeparationParams> sep;
  bool restructured = false;

  // Instrumentation: completion order stamp and number of computations.
  std::uint64_t eval_stamp = 0;
  std::uint32_t compute_count = 0;

 private:
  void attach_children();
  void release_children();

  OpKind kind_;
  unsigned root_k_ = 0;
  std::array<NodePtr, 2> children_;
  std::uint32_t parent_count_ = 0;
  std::optional<BigFloat> leaf_;
  FilterInterval filter_;
};

/// Every node reachable from `root`, children before parents. Deterministic:
/// depth-first post-order visiting the left child first.
std::vector<Node*> topological_order(const Node& root);

std::size_t count_nodes(const Node& root);

/// Longest root-to-leaf path counted in non-leaf nodes.
std::size_t dag_depth(const Node& root);

}  // namespace dagreal
