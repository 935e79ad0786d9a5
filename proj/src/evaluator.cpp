#include "dagreal/evaluator.hpp"

#include <algorithm>
#include <chrono>
#include <unordered_map>

#include "dagreal/errors.hpp"

namespace dagreal {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

constexpr std::int64_t kFirstTarget = -52;

void mark_zero(Node& n) {
  n.bounds.zero = true;
  n.approx = Approximation{BigFloat(), ErrorExp::exact()};
}

void tighten_upper(Node& n, std::int64_t u) {
  n.bounds.upper = n.bounds.upper ? std::min(*n.bounds.upper, u) : u;
}

// Upper magnitude bound from the children's bounds; also detects values that
// are zero by structure.
void structural_bounds(Node& n) {
  if (n.bounds.zero || n.kind() == OpKind::leaf) return;
  const Node& x = *n.child(0);
  switch (n.kind()) {
    case OpKind::neg:
      if (x.bounds.zero) return mark_zero(n);
      tighten_upper(n, *x.bounds.upper);
      return;
    case OpKind::root:
      if (x.bounds.zero) return mark_zero(n);
      tighten_upper(n, ceil_div(sat_add(*x.bounds.upper, 1),
                                static_cast<std::int64_t>(n.root_index())) -
                           1);
      return;
    default: break;
  }
  const Node& y = *n.child(1);
  switch (n.kind()) {
    case OpKind::add:
    case OpKind::sub:
      if (x.bounds.zero && y.bounds.zero) return mark_zero(n);
      if (x.bounds.zero) return tighten_upper(n, *y.bounds.upper);
      if (y.bounds.zero) return tighten_upper(n, *x.bounds.upper);
      tighten_upper(n, sat_add(std::max(*x.bounds.upper, *y.bounds.upper), 1));
      return;
    case OpKind::mul:
      if (x.bounds.zero || y.bounds.zero) return mark_zero(n);
      tighten_upper(n, sat_add(sat_add(*x.bounds.upper, *y.bounds.upper), 1));
      return;
    case OpKind::div:
      if (x.bounds.zero) return mark_zero(n);
      tighten_upper(n, sat_sub(*x.bounds.upper, *y.bounds.lower));
      return;
    default: return;
  }
}

// Sign certified by the cached approximation, if any. With `for_bound` the
// approximation must also yield a lower magnitude bound (|v~| >= 2^(e+1)).
std::optional<int> approx_sign(const Node& n, bool for_bound) {
  if (!n.approx) return std::nullopt;
  const Approximation& a = *n.approx;
  if (a.error.is_exact()) return a.value.sign();
  const std::int64_t e = a.error.exponent();
  if (for_bound ? compare_abs_pow2(a.value, sat_add(e, 1)) >= 0
                : compare_abs_pow2(a.value, e) > 0) {
    return a.value.sign();
  }
  return std::nullopt;
}

}  // namespace

Evaluator::Evaluator(EvalConfig cfg) : cfg_(cfg) {
  if (cfg_.threads > 0) pool_ = std::make_unique<TaskPool>(PoolConfig{cfg_.threads});
}

Evaluator::~Evaluator() = default;

void Evaluator::ensure_restructured(Node& root) {
  if (cfg_.strategy.kind == Strategy::Kind::def || root.restructured) return;
  const auto t0 = Clock::now();
  restructure(root, cfg_.strategy);
  stats_.restructure_ms += ms_since(t0);
}

Approximation Evaluator::run_plan(Node& root, ErrorExp q) {
  auto t0 = Clock::now();
  const EvalPlan plan = assign_targets(root, q);
  stats_.preprocess_ms += ms_since(t0);
  ++stats_.plans;
  t0 = Clock::now();
  Approximation result;
  if (pool_) {
    ScheduleStats s;
    result = pool_->execute(plan, &s);
    stats_.tasks += s.tasks_executed;
    stats_.ready_peak = std::max(stats_.ready_peak, s.ready_peak);
    stats_.ops += s.ops;
  } else {
    OpCounts ops;
    result = evaluate_plan(plan, &ops);
    stats_.tasks += ops.total();
    stats_.ops += ops;
  }
  stats_.execute_ms += ms_since(t0);
  return result;
}

int Evaluator::sign_loop(Node& node) {
  // Lower magnitude bounds are the purpose of every nested call, so they are
  // always established here.
  refine_bounds(node);
  if (node.bounds.zero) return 0;
  if (auto s = node.filter().sign()) return *s;
  if (auto s = approx_sign(node, true)) return *s;
  std::optional<std::int64_t> sep;
  bool sep_known = false;
  std::int64_t q = kFirstTarget;
  while (true) {
    const Approximation a = run_plan(node, ErrorExp(q));
    if (a.error.is_exact()) {
      if (a.value.is_zero()) mark_zero(node);
      return a.value.sign();
    }
    if (auto s = approx_sign(node, true)) return *s;
    if (!sep_known) {
      sep = sep_bound(node, cfg_.policy);
      sep_known = true;
    }
    std::int64_t next = sat_add(q, q);
    if (sep) {
      if (sat_add(q, 1) <= *sep) {
        mark_zero(node);
        return 0;
      }
      next = std::max(next, *sep - 1);
    } else {
      if (q <= cfg_.iteration_cap) {
        throw EvalError(Errc::iteration_limit,
                        "no sign decision at error 2^" + std::to_string(q) +
                            "; the value is probably zero");
      }
      next = std::max(next, cfg_.iteration_cap);
    }
    q = next;
  }
}

void Evaluator::prepare(Node& root) {
  ensure_restructured(root);
  const auto t0 = Clock::now();
  const double exec0 = stats_.execute_ms;
  const double prep0 = stats_.preprocess_ms;
  const std::vector<Node*> order = topological_order(root);
  // Divisors and radicands need a lower bound; even radicands a sign check.
  enum : std::uint8_t { kDivisor = 1, kRadicand = 2, kEvenRadicand = 4 };
  std::unordered_map<const Node*, std::uint8_t> role;
  for (const Node* n : order) {
    if (n->kind() == OpKind::div) role[n->child(1)] |= kDivisor;
    if (n->kind() == OpKind::root) {
      role[n->child(0)] |= n->root_index() % 2 == 0 ? kRadicand | kEvenRadicand : kRadicand;
    }
  }
  for (Node* v : order) {
    refine_bounds(*v);
    auto r = role.find(v);
    if (r != role.end() && !v->bounds.zero) {
      const int s = v->bounds.lower && v->filter().sign() ? *v->filter().sign() : sign_loop(*v);
      if (s < 0 && (r->second & kEvenRadicand) != 0) {
        throw EvalError(Errc::negative_radicand, "even root of a negative value");
      }
    }
    if (r != role.end() && v->bounds.zero && (r->second & kDivisor) != 0) {
      throw EvalError(Errc::zero_denominator, "a divisor is zero");
    }
    structural_bounds(*v);
  }
  stats_.preprocess_ms = prep0 + ms_since(t0) - (stats_.execute_ms - exec0);
}

int Evaluator::decide_sign(const Real& x) {
  Node& root = *x.node();
  if (auto s = root.filter().sign()) return *s;
  prepare(root);
  if (root.bounds.zero) return 0;
  if (auto s = approx_sign(root, false)) return *s;
  return sign_loop(root);
}

Approximation Evaluator::guarantee_absolute_error_two_to(const Real& x, std::int64_t q) {
  Node& root = *x.node();
  prepare(root);
  return run_plan(root, ErrorExp(q));
}

int decide_sign(const Real& x, SeparationPolicy policy) {
  EvalConfig cfg;
  cfg.policy = policy;
  Evaluator ev(cfg);
  return ev.decide_sign(x);
}

Approximation Real::guarantee_absolute_error_two_to(std::int64_t q) const {
  Evaluator ev;
  return ev.guarantee_absolute_error_two_to(*this, q);
}

int Real::sign() const { return decide_sign(*this); }

}  // namespace dagreal
