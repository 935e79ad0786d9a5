#include "dagreal/plan.hpp"

#include <algorithm>
#include <atomic>

#include "dagreal/errors.hpp"

namespace dagreal {

namespace {

std::atomic<std::uint64_t> g_eval_stamp{0};

std::int64_t upper_of(const Node& n) {
  if (n.bounds.zero) return -kExpLimit;
  if (!n.bounds.upper) {
    throw EvalError(Errc::missing_magnitude_bound, "no magnitude upper bound for an operand");
  }
  return *n.bounds.upper;
}

std::int64_t lower_of(const Node& n) {
  if (n.bounds.zero || !n.bounds.lower) {
    throw EvalError(Errc::missing_magnitude_bound,
                    "divisor or radicand not separated from zero");
  }
  return *n.bounds.lower;
}

bool is_trivial(const Node& n, std::int64_t t) {
  return n.bounds.zero || (n.bounds.upper && t >= sat_add(*n.bounds.upper, 1));
}

}  // namespace

void OpCounts::record(OpKind kind) {
  switch (kind) {
    case OpKind::add: ++add; break;
    case OpKind::sub:
    case OpKind::neg: ++sub; break;
    case OpKind::mul: ++mul; break;
    case OpKind::div: ++div; break;
    case OpKind::root: ++root; break;
    case OpKind::leaf: break;
  }
}

OpCounts& OpCounts::operator+=(const OpCounts& o) {
  add += o.add;
  sub += o.sub;
  mul += o.mul;
  div += o.div;
  root += o.root;
  return *this;
}

std::uint64_t next_eval_stamp() { return ++g_eval_stamp; }

void refine_bounds(Node& node) {
  MagnitudeBounds& b = node.bounds;
  if (b.zero) return;
  auto lower_upper = [&b](std::int64_t u) { b.upper = b.upper ? std::min(*b.upper, u) : u; };
  auto raise_lower = [&b](std::int64_t l) { b.lower = b.lower ? std::max(*b.lower, l) : l; };
  const FilterInterval& f = node.filter();
  if (f.is_zero()) {
    b.zero = true;
    return;
  }
  if (auto u = f.msb_upper()) lower_upper(*u);
  if (auto l = f.msb_lower()) raise_lower(*l);
  if (!node.approx) return;
  const BigFloat& v = node.approx->value;
  const ErrorExp err = node.approx->error;
  if (err.is_exact()) {
    if (v.is_zero()) {
      b.zero = true;
      return;
    }
    lower_upper(v.msb());
    raise_lower(v.msb());
    return;
  }
  const std::int64_t e = err.exponent();
  if (v.is_zero()) {
    lower_upper(e);
    return;
  }
  lower_upper(sat_add(std::max(v.msb(), e), 1));
  if (v.msb() > e) raise_lower(v.msb() - 1);
}

EvalPlan assign_targets(Node& root, ErrorExp q) {
  if (!q.is_finite()) throw std::invalid_argument("assign_targets needs a finite target");
  EvalPlan plan;
  plan.root = &root;
  plan.q = q;
  const std::vector<Node*> all = topological_order(root);
  plan.targets.emplace(&root, q);
  auto demand = [&plan](const Node* c, std::int64_t t) {
    const ErrorExp e(clamp_exp(t));
    auto [it, inserted] = plan.targets.emplace(c, e);
    if (!inserted) it->second = std::min(it->second, e);
  };
  std::vector<Node*> dirty_rev;
  for (auto it = all.rbegin(); it != all.rend(); ++it) {
    Node* v = *it;
    auto found = plan.targets.find(v);
    if (found == plan.targets.end()) continue;
    const std::int64_t t = found->second.exponent();
    if (v->approx && v->approx->error <= found->second) continue;
    dirty_rev.push_back(v);
    if (is_trivial(*v, t)) continue;
    const Node* x = v->child(0);
    switch (v->kind()) {
      case OpKind::leaf: break;
      case OpKind::neg: demand(x, t); break;
      case OpKind::add:
      case OpKind::sub:
        demand(x, sat_sub(t, 2));
        demand(v->child(1), sat_sub(t, 2));
        break;
      case OpKind::mul: {
        const Node* y = v->child(1);
        const std::int64_t ux = upper_of(*x);
        const std::int64_t uy = upper_of(*y);
        const std::int64_t tt = std::min(t, sat_add(sat_add(ux, uy), 4));
        demand(x, sat_sub(sat_sub(tt, uy), 3));
        demand(y, sat_sub(sat_sub(tt, ux), 3));
        break;
      }
      case OpKind::div: {
        const Node* y = v->child(1);
        const std::int64_t ux = upper_of(*x);
        const std::int64_t ly = lower_of(*y);
        demand(x, sat_sub(sat_add(t, ly), 3));
        demand(y, std::min(sat_sub(sat_sub(sat_add(t, sat_add(ly, ly)), ux), 3), ly - 1));
        break;
      }
      case OpKind::root: {
        const auto k = static_cast<std::int64_t>(v->root_index());
        const std::int64_t l = lower_of(*x);
        const std::int64_t gain = ceil_div(sat_mul(k - 1, l), k);
        demand(x, std::min(sat_sub(sat_add(t, gain), 1), l - 1));
        break;
      }
    }
  }
  plan.dirty.assign(dirty_rev.rbegin(), dirty_rev.rend());
  for (Node* n : all) {
    if (plan.targets.count(n) != 0) plan.order.push_back(n);
  }
  return plan;
}

void compute_node(Node& node, ErrorExp target) {
  const std::int64_t t = target.exponent();
  if (node.bounds.zero) {
    node.approx = Approximation{BigFloat(), ErrorExp::exact()};
  } else if (is_trivial(node, t)) {
    node.approx = Approximation{BigFloat(), target};
  } else {
    const Approximation& x = *node.child(0)->approx;
    bool exact = false;
    BigFloat value;
    bool inputs_exact = x.error.is_exact();
    switch (node.kind()) {
      case OpKind::leaf: return;
      case OpKind::neg:
        node.approx = Approximation{neg(x.value), x.error};
        break;
      case OpKind::root:
        value = root(x.value, node.root_index(), ErrorExp(sat_sub(t, 1)), &exact);
        break;
      default: {
        const Approximation& y = *node.child(1)->approx;
        inputs_exact = inputs_exact && y.error.is_exact();
        const ErrorExp budget(sat_sub(t, 2));
        switch (node.kind()) {
          case OpKind::add: value = add(x.value, y.value, budget, &exact); break;
          case OpKind::sub: value = sub(x.value, y.value, budget, &exact); break;
          case OpKind::mul: value = mul(x.value, y.value, budget, &exact); break;
          case OpKind::div: value = div(x.value, y.value, budget, &exact); break;
          default: break;
        }
      }
    }
    if (node.kind() != OpKind::neg) {
      node.approx = Approximation{std::move(value),
                                  inputs_exact && exact ? ErrorExp::exact() : target};
    }
  }
  refine_bounds(node);
  ++node.compute_count;
  node.eval_stamp = next_eval_stamp();
}

Approximation evaluate_plan(const EvalPlan& plan, OpCounts* counts) {
  for (Node* n : plan.dirty) {
    compute_node(*n, plan.target(n));
    if (counts != nullptr) counts->record(n->kind());
  }
  return *plan.root->approx;
}

}  // namespace dagreal
