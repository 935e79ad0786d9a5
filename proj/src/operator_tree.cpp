#include "dagreal/operator_tree.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>

namespace dagreal {

namespace {

bool is_member_child(const Node& parent, const Node& child) {
  return is_operator(parent.kind()) && joins_parent_tree(child);
}

}  // namespace

OperatorTree operator_tree_at(Node& root) {
  OperatorTree tree;
  tree.root = &root;
  if (!is_operator(root.kind())) return tree;
  // Explicit stack: (node, next child). Produces pre-order members and
  // in-order operands.
  std::vector<std::pair<Node*, std::size_t>> stack;
  stack.emplace_back(&root, 0);
  tree.members.push_back(&root);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next == node->arity()) {
      stack.pop_back();
      continue;
    }
    Node* c = node->child(next++);
    if (is_member_child(*node, *c)) {
      tree.members.push_back(c);
      stack.emplace_back(c, 0);
    } else {
      tree.operands.push_back(c);
    }
  }
  return tree;
}

std::vector<OperatorTree> find_operator_trees(Node& root) {
  std::vector<OperatorTree> trees;
  // Mark nodes whose (only) parent inside the dag is an operator.
  std::unordered_set<const Node*> under_operator;
  const auto order = topological_order(root);
  for (Node* n : order) {
    if (!is_operator(n->kind())) continue;
    for (std::size_t i = 0; i < n->arity(); ++i) under_operator.insert(n->child(i));
  }
  for (Node* n : order) {
    if (!is_operator(n->kind())) continue;
    const bool member = n != &root && n->parent_count() == 1 && under_operator.count(n) != 0;
    if (!member) trees.push_back(operator_tree_at(*n));
  }
  return trees;
}

PhiMap count_operands(const OperatorTree& tree) {
  PhiMap phi;
  const std::unordered_set<const Node*> members(tree.members.begin(), tree.members.end());
  // Members are in pre-order, so reverse order sees children first.
  for (auto it = tree.members.rbegin(); it != tree.members.rend(); ++it) {
    const Node* n = *it;
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < n->arity(); ++i) {
      const Node* c = n->child(i);
      total += members.count(c) != 0 ? phi.at(c) : 1;
    }
    phi[n] = total;
  }
  return phi;
}

std::vector<Node*> critical_path(const OperatorTree& tree, const PhiMap& phi) {
  std::vector<Node*> path;
  if (tree.root == nullptr) return path;
  auto weight = [&phi](const Node* n) {
    auto it = phi.find(n);
    return it == phi.end() ? std::uint64_t{1} : it->second;
  };
  Node* node = tree.root;
  path.push_back(node);
  while (phi.count(node) != 0) {
    Node* next = node->child(0);
    if (node->arity() == 2 && weight(node->child(1)) > weight(node->child(0))) {
      next = node->child(1);
    }
    path.push_back(next);
    node = next;
  }
  return path;
}

std::size_t operator_tree_depth(const OperatorTree& tree) {
  std::unordered_map<const Node*, std::size_t> depth;
  const std::unordered_set<const Node*> members(tree.members.begin(), tree.members.end());
  std::size_t result = 0;
  for (auto it = tree.members.rbegin(); it != tree.members.rend(); ++it) {
    const Node* n = *it;
    std::size_t d = 0;
    for (std::size_t i = 0; i < n->arity(); ++i) {
      const Node* c = n->child(i);
      if (members.count(c) != 0) d = std::max(d, depth.at(c));
    }
    depth[n] = d + 1;
    result = d + 1;
  }
  return result;
}

std::string dump_dag(Node& root) {
  const auto order = topological_order(root);
  std::unordered_map<const Node*, std::size_t> id;
  for (std::size_t i = 0; i < order.size(); ++i) id[order[i]] = i;
  PhiMap phi;
  for (const auto& tree : find_operator_trees(root)) {
    for (const auto& [n, v] : count_operands(tree)) phi[n] = v;
  }
  std::ostringstream os;
  for (const Node* n : order) {
    os << id[n] << ' ' << to_string(n->kind());
    if (n->kind() == OpKind::root) os << '[' << n->root_index() << ']';
    if (n->kind() == OpKind::leaf) os << ' ' << n->leaf_value().to_hex();
    for (std::size_t i = 0; i < n->arity(); ++i) os << ' ' << id[n->child(i)];
    auto it = phi.find(n);
    os << " phi=";
    if (it == phi.end()) {
      os << '-';
    } else {
      os << it->second;
    }
    os << " parents=" << n->parent_count() << '\n';
  }
  return os.str();
}

}  // namespace dagreal
