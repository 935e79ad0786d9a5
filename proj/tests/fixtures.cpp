#include "fixtures.hpp"

#include <functional>
#include <unordered_map>

#include "dagreal/operator_tree.hpp"

namespace fixtures {

using namespace dagreal;

std::map<OpKind, std::size_t> kind_counts(const Node& root) {
  std::map<OpKind, std::size_t> out;
  for (const Node* n : topological_order(root)) ++out[n->kind()];
  return out;
}

namespace {

long diff(std::map<OpKind, std::size_t>& a, std::map<OpKind, std::size_t>& b, OpKind k) {
  return static_cast<long>(a[k]) - static_cast<long>(b[k]);
}

NodePtr leaf(double v) { return std::make_shared<Node>(BigFloat(v)); }

}  // namespace

IncorporateCounts add_incorporation_counts() {
  IncorporateCounts out;
  const NodePtr x = std::make_shared<Node>(OpKind::add, leaf(1.5), leaf(2.5));
  // Reach A, B, C, D all nodes: E3 / (E2 + E1 / X), then + E4.
  LinearFractionalForm f = LinearFractionalForm::init(x);
  const Node div_parent(OpKind::div, leaf(7), leaf(7));
  const Node add_parent(OpKind::add, leaf(7), leaf(7));
  f = incorporate(f, div_parent, leaf(3), Side::right);  // E1 / X
  f = incorporate(f, add_parent, leaf(5), Side::left);   // + E2
  f = incorporate(f, div_parent, leaf(11), Side::right); // E3 / (...)
  f = incorporate(f, add_parent, leaf(13), Side::left);  // + E4
  if (f.a.kind != Coefficient::Kind::node || f.b.kind != Coefficient::Kind::node ||
      f.c.kind != Coefficient::Kind::node || f.d.kind != Coefficient::Kind::node) {
    throw std::logic_error("fixture did not reach a form with four node coefficients");
  }
  const NodePtr before = f.build();
  const NodePtr e = leaf(17);
  const NodePtr original = std::make_shared<Node>(OpKind::add, before, e);
  const NodePtr after = incorporate(f, add_parent, e, Side::left).build();
  auto cb = kind_counts(*before);
  auto co = kind_counts(*original);
  auto ca = kind_counts(*after);
  out.created_mul = diff(ca, cb, OpKind::mul);
  out.created_add = diff(ca, cb, OpKind::add);
  out.net_mul = diff(ca, co, OpKind::mul);
  out.net_add = diff(ca, co, OpKind::add);

  const LinearFractionalForm g = LinearFractionalForm::init(x);
  const NodePtr g_before = g.build();
  const NodePtr g_after = incorporate(g, add_parent, e, Side::left).build();
  auto gb = kind_counts(*g_before);
  auto ga = kind_counts(*g_after);
  out.trivial_created_mul = diff(ga, gb, OpKind::mul);
  out.trivial_created_add = diff(ga, gb, OpKind::add);
  return out;
}

DivChain div_add_chain(const std::vector<unsigned>& segments, unsigned base_operands) {
  DivChain out;
  double next = 1.0;
  auto fresh = [&next] {
    next += 1.0;
    return Real(next);
  };
  Real cur = fresh();
  for (unsigned i = 1; i < base_operands; ++i) cur = cur + fresh();
  cur = cur / fresh();
  out.divs.push_back(cur.node().get());
  for (unsigned m : segments) {
    for (unsigned i = 0; i < m; ++i) cur = cur + fresh();
    cur = cur / fresh();
    out.divs.push_back(cur.node().get());
  }
  out.value = cur;
  return out;
}

Real random_operator_tree(std::mt19937_64& rng, unsigned operands, bool safe_div) {
  std::uniform_real_distribution<double> val(0.5, 4.0);
  // `positive`: only + * / over positive leaves, so the value cannot vanish.
  std::function<Real(unsigned, bool)> build = [&](unsigned n, bool positive) -> Real {
    if (n == 1) return Real(val(rng));
    const unsigned kind = std::uniform_int_distribution<unsigned>(0, 9)(rng);
    if (kind == 0 && !positive) return -build(n, false);
    const unsigned left = std::uniform_int_distribution<unsigned>(1, n - 1)(rng);
    switch (kind % 4) {
      case 1:
        if (!positive) return build(left, false) - build(n - left, false);
        [[fallthrough]];
      case 0: return build(left, positive) + build(n - left, positive);
      case 2: return build(left, positive) * build(n - left, positive);
      default: {
        const Real a = build(left, positive);
        return a / build(n - left, positive || safe_div);
      }
    }
  };
  return build(operands, false);
}

Real chain(OpKind kind, unsigned n, double first) {
  Real cur(first);
  for (unsigned i = 1; i < n; ++i) cur = apply(kind, cur, Real(first + i));
  return cur;
}

std::size_t kind_depth(const Node& root, OpKind kind) {
  std::unordered_map<const Node*, std::size_t> d;
  std::size_t best = 0;
  for (const Node* n : topological_order(root)) {
    std::size_t v = 0;
    if (n->kind() == kind) {
      for (std::size_t i = 0; i < n->arity(); ++i) v = std::max(v, d[n->child(i)]);
      ++v;
    }
    d[n] = v;
    best = std::max(best, v);
  }
  return best;
}

}  // namespace fixtures
