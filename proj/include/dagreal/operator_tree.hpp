#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "dagreal/node.hpp"

namespace dagreal {

/// Maximal connected set of operator nodes in which only the root may have
/// more than one parent.
struct OperatorTree {
  Node* root = nullptr;
  std::vector<Node*> members;   // pre-order, root first
  std::vector<Node*> operands;  // in-order, one entry per edge leaving the tree
};

/// Operand counts per member. Each edge into an operand counts once, so a
/// shared operand used twice contributes 2.
using PhiMap = std::unordered_map<const Node*, std::uint64_t>;

/// True when `child`, reached from an operator parent, belongs to that
/// parent's tree.
inline bool joins_parent_tree(const Node& child) {
  return is_operator(child.kind()) && child.parent_count() == 1;
}

/// Tree rooted at `root` (an operator node), ignoring whatever parents root
/// has.
OperatorTree operator_tree_at(Node& root);

/// All maximal operator trees reachable from `root`, in topological order of
/// their roots (operand trees first).
std::vector<OperatorTree> find_operator_trees(Node& root);

PhiMap count_operands(const OperatorTree& tree);

/// Path from the tree root that always descends into the child with at least
/// as many operands as its sibling, left on ties. Ends at an operand.
std::vector<Node*> critical_path(const OperatorTree& tree, const PhiMap& phi);

/// Height of the tree counted in member levels (a single member has depth 1).
std::size_t operator_tree_depth(const OperatorTree& tree);

/// Deterministic text form: one line per node in post-order, ids counted from
/// 0 in that order. `<id> <kind>[k] <child ids...> phi=<n|-> parents=<n>`,
/// leaves print their value in hexadecimal instead of child ids.
std::string dump_dag(Node& root);

}  // namespace dagreal
