#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "dagreal/node.hpp"
#include "dagreal/operator_tree.hpp"

namespace dagreal {

struct Strategy {
  enum class Kind : std::uint8_t { def, amb, mtr, mtr_k };
  static constexpr std::uint64_t kUnbounded = std::numeric_limits<std::uint64_t>::max();

  Kind kind = Kind::def;
  std::uint64_t threshold = 5;  // mtr_k only

  static Strategy none() { return {Kind::def, 0}; }
  static Strategy amb() { return {Kind::amb, 0}; }
  static Strategy mtr() { return {Kind::mtr, 0}; }
  static Strategy mtr_k(std::uint64_t k) { return {Kind::mtr_k, k}; }

  /// Split threshold used by raise(); plain MTR never splits early.
  std::uint64_t effective_threshold() const {
    return kind == Kind::mtr_k ? threshold : kUnbounded;
  }
  std::string name() const;
};

/// Slot of a linear fractional form: symbolic 0, symbolic 1, or a node, each
/// possibly negated. Symbolic values never become nodes unless unavoidable.
struct Coefficient {
  enum class Kind : std::uint8_t { zero, one, node };
  Kind kind = Kind::zero;
  bool negated = false;
  NodePtr node;

  static Coefficient zero() { return {}; }
  static Coefficient one(bool negated = false) { return {Kind::one, negated, nullptr}; }
  static Coefficient of(NodePtr n, bool negated = false) {
    return {Kind::node, negated, std::move(n)};
  }

  bool is_zero() const { return kind == Kind::zero; }
  bool is_one() const { return kind == Kind::one && !negated; }
  Coefficient operator-() const;
};

/// (A*X + B) / (C*X + D)
struct LinearFractionalForm {
  Coefficient a = Coefficient::one();
  Coefficient b = Coefficient::zero();
  Coefficient c = Coefficient::zero();
  Coefficient d = Coefficient::one();
  NodePtr x;

  static LinearFractionalForm init(NodePtr x);
  /// Materializes the form as new nodes and returns its top. At most one
  /// negation is built, at the top.
  NodePtr build() const;
};

enum class Side : std::uint8_t { left, right };

/// Folds `parent` (whose child on `side` is the form's expression) into the
/// form. `sibling` is parent's other child, null for negation.
LinearFractionalForm incorporate(LinearFractionalForm form, const Node& parent,
                                 const NodePtr& sibling, Side side);

struct RaiseResult {
  LinearFractionalForm form;
  Node* split = nullptr;
  std::vector<Node*> path;  // root down to the parent of split
};

/// Walks the critical path of the tree rooted at `root` and splits at the
/// first node v with 2*phi(v) <= phi(root), or at a division once more than
/// `threshold` additions and subtractions were passed since the last
/// division. Returns the form with every node above the split incorporated.
RaiseResult raise(Node& root, const PhiMap& phi, std::uint64_t threshold);

/// Split node of plain MTR: phi(v) <= phi(T)/2 < phi(parent(v)) on the
/// critical path.
Node* find_split(const OperatorTree& tree, const PhiMap& phi);

/// Rebuilds the maximal pure sum ({+, -, unary -}) or pure product subtree
/// rooted at tree.root as a balanced tree, in place. Other trees are left
/// alone. Returns tree.root.
Node* am_balance(const OperatorTree& tree);

/// Applies `strategy` to every operator tree reachable from `root`. Tree
/// roots keep their identity; they are rewritten in place and flagged in
/// Node::restructured, so repeated calls are no-ops.
void restructure(Node& root, Strategy strategy);

}  // namespace dagreal
