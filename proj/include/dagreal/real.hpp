#pragma once

#include <cstdint>

#include "dagreal/node.hpp"

namespace dagreal {

/// Handle to an exact real number represented by an expression dag.
///
/// Arithmetic only records the operation. Copies share the node, so
/// `x = x * y` grows a dag rather than a tree.
class Real {
 public:
  Real();  // 0
  Real(double v);        // NOLINT(google-explicit-constructor)
  Real(int v);           // NOLINT(google-explicit-constructor)
  Real(std::int64_t v);  // NOLINT(google-explicit-constructor)
  explicit Real(BigFloat v);
  explicit Real(NodePtr node);

  const NodePtr& node() const noexcept { return node_; }

  Real& operator+=(const Real& o);
  Real& operator-=(const Real& o);
  Real& operator*=(const Real& o);
  Real& operator/=(const Real& o);

  friend Real operator+(const Real& a, const Real& b);
  friend Real operator-(const Real& a, const Real& b);
  friend Real operator*(const Real& a, const Real& b);
  friend Real operator/(const Real& a, const Real& b);
  friend Real operator-(const Real& a);

  /// Approximation with |value - exact| <= 2^q, computed serially without
  /// restructuring. Use an Evaluator for other strategies.
  Approximation guarantee_absolute_error_two_to(std::int64_t q) const;
  /// Exact sign, using the BFMSS separation bound.
  int sign() const;

 private:
  NodePtr node_;
};

Real sqrt(const Real& x);
/// k-th root, k >= 2.
Real root(const Real& x, unsigned k);

Real make_leaf(double v);
Real make_leaf(std::int64_t v);
/// Builds kind(a, b); `b` is ignored for unary kinds and `k` for non-roots.
Real apply(OpKind kind, const Real& a, const Real& b = Real(), unsigned k = 2);

}  // namespace dagreal
