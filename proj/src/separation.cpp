#include "dagreal/separation.hpp"

#include <algorithm>
#include <unordered_set>

#include "dagreal/errors.hpp"

namespace dagreal {

namespace {

constexpr std::int64_t kMaxSepExponent = std::int64_t{1} << 32;

SeparationParams leaf_params(const BigFloat& v) {
  SeparationParams p;
  if (v.is_zero()) return p;
  // v = M * 2^lsb with M odd; ceil(log2 M) is 0 for M = 1, else its bit length.
  const std::int64_t bits = v.mantissa_bits();
  p.log_u = bits == 1 ? 0 : bits;
  const std::int64_t lsb = v.lsb();
  if (lsb >= 0) {
    p.log_u = sat_add(p.log_u, lsb);
  } else {
    p.log_l = -lsb;
  }
  return p;
}

SeparationParams combine(const Node& n) {
  const SeparationParams x = n.child(0)->sep.value();
  SeparationParams r;
  switch (n.kind()) {
    case OpKind::neg: return x;
    case OpKind::root: {
      const auto k = static_cast<std::int64_t>(n.root_index());
      r.log_u = ceil_div(sat_add(x.log_u, sat_mul(k - 1, x.log_l)), k);
      r.log_l = x.log_l;
      return r;
    }
    default: break;
  }
  const SeparationParams y = n.child(1)->sep.value();
  switch (n.kind()) {
    case OpKind::add:
    case OpKind::sub:
      r.log_u = sat_add(std::max(sat_add(x.log_u, y.log_l), sat_add(y.log_u, x.log_l)), 1);
      r.log_l = sat_add(x.log_l, y.log_l);
      break;
    case OpKind::mul:
      r.log_u = sat_add(x.log_u, y.log_u);
      r.log_l = sat_add(x.log_l, y.log_l);
      break;
    case OpKind::div:
      r.log_u = sat_add(x.log_u, y.log_l);
      r.log_l = sat_add(x.log_l, y.log_u);
      break;
    default: break;
  }
  return r;
}

}  // namespace

const char* to_string(SeparationPolicy policy) noexcept {
  return policy == SeparationPolicy::bfmss ? "bfmss" : "assume-nonzero";
}

SeparationParams separation_params(Node& node) {
  if (node.sep) return *node.sep;
  for (Node* n : topological_order(node)) {
    if (n->sep) continue;
    n->sep = n->kind() == OpKind::leaf ? leaf_params(n->leaf_value()) : combine(*n);
  }
  return *node.sep;
}

std::uint64_t degree_bound(const Node& node) {
  std::uint64_t d = 1;
  for (const Node* n : topological_order(node)) {
    if (n->kind() != OpKind::root) continue;
    if (__builtin_mul_overflow(d, std::uint64_t{n->root_index()}, &d) ||
        d > (std::uint64_t{1} << 62)) {
      throw EvalError(Errc::degree_overflow, "algebraic degree bound exceeds 2^62");
    }
  }
  return d;
}

std::optional<std::int64_t> sep_bound(Node& node, SeparationPolicy policy) {
  if (policy == SeparationPolicy::assume_nonzero) return std::nullopt;
  const SeparationParams p = separation_params(node);
  const std::uint64_t d = degree_bound(node);
  // |val| >= 2^-(logL + (D-1) logU); one less makes the bound strict.
  std::int64_t mag = 0;
  if (__builtin_mul_overflow(static_cast<std::int64_t>(d - 1), p.log_u, &mag) ||
      __builtin_add_overflow(mag, p.log_l + 1, &mag) || mag > kMaxSepExponent) {
    throw EvalError(Errc::degree_overflow, "separation bound below 2^-(2^32)");
  }
  return -mag;
}

}  // namespace dagreal
