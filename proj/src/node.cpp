#include "dagreal/node.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace dagreal {

const char* to_string(OpKind kind) noexcept {
  switch (kind) {
    case OpKind::leaf: return "leaf";
    case OpKind::neg: return "neg";
    case OpKind::root: return "root";
    case OpKind::add: return "add";
    case OpKind::sub: return "sub";
    case OpKind::mul: return "mul";
    case OpKind::div: return "div";
  }
  return "?";
}

std::size_t arity(OpKind kind) noexcept {
  switch (kind) {
    case OpKind::leaf: return 0;
    case OpKind::neg:
    case OpKind::root: return 1;
    default: return 2;
  }
}

namespace {

FilterInterval combine_filters(OpKind kind, const Node* a, const Node* b, unsigned k) {
  switch (kind) {
    case OpKind::neg: return -a->filter();
    case OpKind::root: return root(a->filter(), k);
    case OpKind::add: return a->filter() + b->filter();
    case OpKind::sub: return a->filter() - b->filter();
    case OpKind::mul: return a->filter() * b->filter();
    case OpKind::div: return a->filter() / b->filter();
    case OpKind::leaf: break;
  }
  return FilterInterval::invalid();
}

void check_shape(OpKind kind, const NodePtr& a, const NodePtr& b, unsigned k) {
  const std::size_t n = arity(kind);
  if (n == 0) throw std::invalid_argument("leaf nodes are built from a value");
  if (!a || (n == 2) != static_cast<bool>(b)) {
    throw std::invalid_argument(std::string("wrong operands for ") + to_string(kind));
  }
  if (kind == OpKind::root && k < 2) throw std::invalid_argument("root index must be >= 2");
}

// Children released while another release is running are parked here, so
// destroying a long chain does not recurse once per node.
thread_local std::vector<NodePtr>* g_release_stack = nullptr;

}  // namespace

Node::Node(BigFloat value)
    : kind_(OpKind::leaf), leaf_(std::move(value)), filter_(FilterInterval::enclosing(*leaf_)) {
  approx = Approximation{*leaf_, ErrorExp::exact()};
  if (leaf_->is_zero()) {
    bounds.zero = true;
  } else {
    bounds.upper = leaf_->msb();
    bounds.lower = leaf_->msb();
  }
}

Node::Node(OpKind kind, NodePtr a, NodePtr b, unsigned root_index)
    : kind_(kind), root_k_(kind == OpKind::root ? root_index : 0) {
  check_shape(kind, a, b, root_index);
  children_ = {std::move(a), std::move(b)};
  attach_children();
  filter_ = combine_filters(kind_, children_[0].get(), children_[1].get(), root_k_);
}

Node::~Node() { release_children(); }

void Node::attach_children() {
  for (auto& c : children_) {
    if (c) ++c->parent_count_;
  }
}

void Node::release_children() {
  for (auto& c : children_) {
    if (c) --c->parent_count_;
  }
  if (g_release_stack != nullptr) {
    for (auto& c : children_) {
      if (c) g_release_stack->push_back(std::move(c));
    }
    return;
  }
  std::vector<NodePtr> stack;
  for (auto& c : children_) {
    if (c) stack.push_back(std::move(c));
  }
  g_release_stack = &stack;
  while (!stack.empty()) {
    NodePtr n = std::move(stack.back());
    stack.pop_back();
    n.reset();
  }
  g_release_stack = nullptr;
}

void Node::replace_with(OpKind kind, NodePtr a, NodePtr b, unsigned root_index) {
  check_shape(kind, a, b, root_index);
  if (kind_ == OpKind::leaf) throw std::logic_error("leaves cannot be rewritten");
  std::array<NodePtr, 2> fresh = {std::move(a), std::move(b)};
  for (auto& c : fresh) {
    if (c) ++c->parent_count_;
  }
  kind_ = kind;
  root_k_ = kind == OpKind::root ? root_index : 0;
  // Old children go through the same non-recursive release path.
  release_children();
  children_ = std::move(fresh);
}

std::vector<Node*> topological_order(const Node& root) {
  std::vector<Node*> order;
  std::unordered_set<const Node*> seen;
  // (node, next child index to visit)
  std::vector<std::pair<Node*, std::size_t>> stack;
  auto* r = const_cast<Node*>(&root);
  stack.emplace_back(r, 0);
  seen.insert(r);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->arity()) {
      Node* c = node->child(next++);
      if (seen.insert(c).second) stack.emplace_back(c, 0);
      continue;
    }
    order.push_back(node);
    stack.pop_back();
  }
  return order;
}

std::size_t count_nodes(const Node& root) { return topological_order(root).size(); }

std::size_t dag_depth(const Node& root) {
  std::unordered_map<const Node*, std::size_t> depth;
  std::size_t result = 0;
  for (Node* n : topological_order(root)) {
    std::size_t d = 0;
    if (n->kind() != OpKind::leaf) {
      for (std::size_t i = 0; i < n->arity(); ++i) d = std::max(d, depth[n->child(i)]);
      ++d;
    }
    depth[n] = d;
    result = d;
  }
  return result;
}

}  // namespace dagreal
