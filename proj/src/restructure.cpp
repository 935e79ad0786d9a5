#include "dagreal/restructure.hpp"

#include <stdexcept>
#include <unordered_set>

namespace dagreal {

std::string Strategy::name() const {
  switch (kind) {
    case Kind::def: return "def";
    case Kind::amb: return "amb";
    case Kind::mtr: return "mtr";
    case Kind::mtr_k: return "mtr-k";
  }
  return "?";
}

Coefficient Coefficient::operator-() const {
  Coefficient r = *this;
  if (kind != Kind::zero) r.negated = !negated;
  return r;
}

namespace {

NodePtr make(OpKind kind, NodePtr a, NodePtr b = nullptr) {
  return std::make_shared<Node>(kind, std::move(a), std::move(b));
}

NodePtr materialize(const Coefficient& c) {
  switch (c.kind) {
    case Coefficient::Kind::zero: return std::make_shared<Node>(BigFloat(std::int64_t{0}));
    case Coefficient::Kind::one: return std::make_shared<Node>(BigFloat(std::int64_t{1}));
    case Coefficient::Kind::node: return c.node;
  }
  return nullptr;
}

// e * c
Coefficient times(const NodePtr& e, const Coefficient& c) {
  switch (c.kind) {
    case Coefficient::Kind::zero: return Coefficient::zero();
    case Coefficient::Kind::one: return Coefficient::of(e, c.negated);
    case Coefficient::Kind::node: return Coefficient::of(make(OpKind::mul, e, c.node), c.negated);
  }
  return {};
}

// Signed sum of two nodes: +a+b, +a-b, -a+b, -a-b. The minus sign of a
// result is kept in the coefficient rather than built as a node.
Coefficient signed_add(NodePtr a, bool neg_a, NodePtr b, bool neg_b) {
  if (!neg_a && !neg_b) return Coefficient::of(make(OpKind::add, a, b));
  if (!neg_a) return Coefficient::of(make(OpKind::sub, a, b));
  if (!neg_b) return Coefficient::of(make(OpKind::sub, b, a));
  return Coefficient::of(make(OpKind::add, a, b), true);
}

Coefficient plus(const Coefficient& x, const Coefficient& y) {
  if (x.is_zero()) return y;
  if (y.is_zero()) return x;
  return signed_add(materialize(x), x.negated, materialize(y), y.negated);
}

Coefficient minus(const Coefficient& x, const Coefficient& y) { return plus(x, -y); }

NodePtr with_sign(NodePtr n, bool negated) {
  return negated ? make(OpKind::neg, std::move(n)) : n;
}

}  // namespace

LinearFractionalForm LinearFractionalForm::init(NodePtr x) {
  LinearFractionalForm f;
  f.x = std::move(x);
  return f;
}

NodePtr LinearFractionalForm::build() const {
  const Coefficient num = plus(times(x, a), b);
  const Coefficient den = plus(times(x, c), d);
  if (num.is_zero() || den.is_zero()) throw std::logic_error("degenerate linear fractional form");
  if (den.kind == Coefficient::Kind::one) {
    return with_sign(materialize(num), num.negated != den.negated);
  }
  return with_sign(make(OpKind::div, materialize(num), materialize(den)),
                   num.negated != den.negated);
}

LinearFractionalForm incorporate(LinearFractionalForm f, const Node& parent,
                                 const NodePtr& e, Side side) {
  switch (parent.kind()) {
    case OpKind::add:
      f.a = plus(f.a, times(e, f.c));
      f.b = plus(f.b, times(e, f.d));
      break;
    case OpKind::sub:
      if (side == Side::left) {
        f.a = minus(f.a, times(e, f.c));
        f.b = minus(f.b, times(e, f.d));
      } else {
        f.a = minus(times(e, f.c), f.a);
        f.b = minus(times(e, f.d), f.b);
      }
      break;
    case OpKind::mul:
      f.a = times(e, f.a);
      f.b = times(e, f.b);
      break;
    case OpKind::div:
      if (side == Side::left) {
        f.c = times(e, f.c);
        f.d = times(e, f.d);
      } else {
        // e / ((AX+B)/(CX+D)) = e(CX+D) / (AX+B)
        std::swap(f.a, f.c);
        std::swap(f.b, f.d);
        f.a = times(e, f.a);
        f.b = times(e, f.b);
      }
      break;
    case OpKind::neg:
      f.a = -f.a;
      f.b = -f.b;
      break;
    default:
      throw std::invalid_argument(std::string("cannot incorporate ") + to_string(parent.kind()));
  }
  return f;
}

RaiseResult raise(Node& root, const PhiMap& phi, std::uint64_t threshold) {
  RaiseResult r;
  const std::uint64_t total = phi.at(&root);
  // `phi` may hold entries for nodes outside this tree; membership is
  // structural.
  auto member = [&phi](const Node* n) { return joins_parent_tree(*n) && phi.count(n) != 0; };
  auto weight = [&](const Node* n) { return member(n) ? phi.at(n) : std::uint64_t{1}; };
  std::vector<Side> sides;
  Node* node = &root;
  NodePtr node_ptr;  // owning pointer of `node` below the root
  std::uint64_t counter = 0;
  while (true) {
    if (node != &root) {
      if (!member(node) || 2 * weight(node) <= total) break;
      if (node->kind() == OpKind::div && counter > threshold) break;
    }
    if (node->kind() == OpKind::add || node->kind() == OpKind::sub) {
      ++counter;
    } else if (node->kind() == OpKind::div) {
      counter = 0;
    }
    Side side = Side::left;
    if (node->arity() == 2 && weight(node->child(1)) > weight(node->child(0))) side = Side::right;
    r.path.push_back(node);
    sides.push_back(side);
    node_ptr = node->child_ptr(side == Side::left ? 0 : 1);
    node = node_ptr.get();
  }
  r.split = node;
  r.form = LinearFractionalForm::init(node_ptr);
  for (std::size_t i = r.path.size(); i-- > 0;) {
    const Node& p = *r.path[i];
    NodePtr sibling;
    if (p.arity() == 2) sibling = p.child_ptr(sides[i] == Side::left ? 1 : 0);
    r.form = incorporate(std::move(r.form), p, sibling, sides[i]);
  }
  return r;
}

Node* find_split(const OperatorTree& tree, const PhiMap& phi) {
  const std::uint64_t total = phi.at(tree.root);
  const auto path = critical_path(tree, phi);
  for (Node* n : path) {
    auto it = phi.find(n);
    const std::uint64_t w = it == phi.end() ? 1 : it->second;
    if (2 * w <= total) return n;
  }
  return path.back();
}

namespace {

enum class Family : std::uint8_t { none, sum, product };

Family family_of(OpKind k) {
  switch (k) {
    case OpKind::add:
    case OpKind::sub:
    case OpKind::neg: return Family::sum;
    case OpKind::mul: return Family::product;
    default: return Family::none;
  }
}

struct SignedOperand {
  NodePtr node;
  bool negated = false;
};

// Operands (in order) of the maximal same-family subtree rooted at `root`.
std::vector<SignedOperand> collect_family(Node& root, Family fam) {
  std::vector<SignedOperand> out;
  struct Item {
    NodePtr node;
    Node* raw;
    bool negated;
  };
  std::vector<Item> stack;
  auto push_children = [&stack](Node* n, bool negated) {
    switch (n->kind()) {
      case OpKind::add:
      case OpKind::mul:
        stack.push_back({n->child_ptr(1), n->child(1), negated});
        stack.push_back({n->child_ptr(0), n->child(0), negated});
        break;
      case OpKind::sub:
        stack.push_back({n->child_ptr(1), n->child(1), !negated});
        stack.push_back({n->child_ptr(0), n->child(0), negated});
        break;
      case OpKind::neg: stack.push_back({n->child_ptr(0), n->child(0), !negated}); break;
      default: break;
    }
  };
  push_children(&root, false);
  while (!stack.empty()) {
    Item it = std::move(stack.back());
    stack.pop_back();
    if (family_of(it.raw->kind()) == fam && it.raw->parent_count() == 1) {
      push_children(it.raw, it.negated);
    } else {
      out.push_back({std::move(it.node), it.negated});
    }
  }
  return out;
}

Coefficient balanced(const std::vector<SignedOperand>& ops, std::size_t lo, std::size_t hi,
                     Family fam) {
  if (hi - lo == 1) return Coefficient::of(ops[lo].node, ops[lo].negated);
  const std::size_t mid = lo + (hi - lo + 1) / 2;
  const Coefficient l = balanced(ops, lo, mid, fam);
  const Coefficient r = balanced(ops, mid, hi, fam);
  if (fam == Family::product) return Coefficient::of(make(OpKind::mul, l.node, r.node));
  return signed_add(l.node, l.negated, r.node, r.negated);
}

// Replaces the structure of `target` by that of `top`. Both denote the same
// value; `top` is a freshly built operator node.
void adopt(Node& target, const NodePtr& top) {
  if (!is_operator(top->kind())) throw std::logic_error("rebuilt tree has no operator at the top");
  target.replace_with(top->kind(), top->child_ptr(0), top->child_ptr(1), top->root_index());
}

using Worklist = std::vector<NodePtr>;

void push_operator_operands(const std::vector<NodePtr>& operands, Worklist& work) {
  for (const auto& n : operands) {
    if (is_operator(n->kind()) && !n->restructured) work.push_back(n);
  }
}

std::vector<NodePtr> operand_ptrs(const OperatorTree& tree) {
  // Recover owning pointers of the operands by walking the members.
  std::vector<NodePtr> out;
  for (Node* m : tree.members) {
    for (std::size_t i = 0; i < m->arity(); ++i) {
      Node* c = m->child(i);
      if (!(is_operator(m->kind()) && joins_parent_tree(*c))) out.push_back(m->child_ptr(i));
    }
  }
  return out;
}

void balance_family(Node& n, Worklist& work) {
  const Family fam = family_of(n.kind());
  if (fam == Family::none) {
    for (std::size_t i = 0; i < n.arity(); ++i) {
      const NodePtr& c = n.child_ptr(i);
      if (is_operator(c->kind()) && !c->restructured) work.push_back(c);
    }
    return;
  }
  std::vector<SignedOperand> ops = collect_family(n, fam);
  if (ops.size() >= 3) {
    const Coefficient top = balanced(ops, 0, ops.size(), fam);
    adopt(n, with_sign(top.node, top.negated));
  }
  for (const auto& op : ops) {
    if (is_operator(op.node->kind()) && !op.node->restructured) work.push_back(op.node);
  }
}

// phi of every member of the tree rooted at `root`, reusing cached values.
// A cached entry stays valid while the subtree below it is untouched, which
// holds for X and the siblings moved into coefficients.
std::uint64_t ensure_phi(Node& root, PhiMap& cache) {
  if (auto it = cache.find(&root); it != cache.end()) return it->second;
  std::vector<std::pair<Node*, bool>> stack{{&root, false}};
  while (!stack.empty()) {
    auto& [v, expanded] = stack.back();
    if (cache.count(v) != 0) {
      stack.pop_back();
      continue;
    }
    if (!expanded) {
      expanded = true;
      Node* node = v;
      for (std::size_t i = 0; i < node->arity(); ++i) {
        Node* c = node->child(i);
        if (joins_parent_tree(*c) && cache.count(c) == 0) stack.emplace_back(c, false);
      }
      continue;
    }
    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < v->arity(); ++i) {
      const Node* c = v->child(i);
      sum += joins_parent_tree(*c) ? cache.at(c) : 1;
    }
    cache[v] = sum;
    stack.pop_back();
  }
  return cache.at(&root);
}

void raise_tree(Node& n, std::uint64_t threshold, Worklist& work, PhiMap& phi) {
  if (ensure_phi(n, phi) < 3) {
    push_operator_operands(operand_ptrs(operator_tree_at(n)), work);
    return;
  }
  RaiseResult r = raise(n, phi, threshold);
  const LinearFractionalForm form = std::move(r.form);
  // Path nodes are rewritten (the root) or released by adopt(); their
  // addresses may be reused.
  for (Node* p : r.path) phi.erase(p);
  r.path.clear();
  adopt(n, form.build());
  // Worklist is LIFO: push in reverse so A is handled first.
  const NodePtr x = form.x;
  if (x && is_operator(x->kind()) && !x->restructured) work.push_back(x);
  for (const Coefficient* c : {&form.d, &form.c, &form.b, &form.a}) {
    if (c->kind == Coefficient::Kind::node && is_operator(c->node->kind()) &&
        !c->node->restructured) {
      work.push_back(c->node);
    }
  }
}

}  // namespace

Node* am_balance(const OperatorTree& tree) {
  Node& root = *tree.root;
  const Family fam = family_of(root.kind());
  if (fam == Family::none) return &root;
  for (const Node* m : tree.members) {
    if (family_of(m->kind()) != fam) return &root;
  }
  Worklist ignored;
  balance_family(root, ignored);
  return &root;
}

void restructure(Node& root, Strategy strategy) {
  if (strategy.kind == Strategy::Kind::def || root.restructured) return;
  // Owning pointers for the tree roots only; holding any other node would
  // keep replaced structure alive and distort parent counts.
  std::vector<NodePtr> roots;
  {
    std::unordered_set<const Node*> is_root;
    for (const auto& t : find_operator_trees(root)) is_root.insert(t.root);
    for (Node* n : topological_order(root)) {
      for (std::size_t i = 0; i < n->arity(); ++i) {
        if (is_root.erase(n->child(i)) != 0) roots.push_back(n->child_ptr(i));
      }
    }
  }
  const std::uint64_t threshold = strategy.effective_threshold();
  Worklist work;
  PhiMap phi;
  auto process = [&](Node& n) {
    if (n.restructured) return;
    n.restructured = true;
    if (strategy.kind == Strategy::Kind::amb) {
      balance_family(n, work);
    } else {
      raise_tree(n, threshold, work, phi);
    }
  };
  // The dag root first, then every other tree; each drains the worklist.
  auto drain = [&] {
    while (!work.empty()) {
      NodePtr next = std::move(work.back());
      work.pop_back();
      process(*next);
    }
  };
  if (is_operator(root.kind())) process(root);
  drain();
  for (auto it = roots.rbegin(); it != roots.rend(); ++it) {
    process(**it);
    drain();
  }
  root.restructured = true;
}

}  // namespace dagreal
