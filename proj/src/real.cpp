#include "dagreal/real.hpp"

#include <stdexcept>

namespace dagreal {

Real::Real() : Real(std::int64_t{0}) {}
Real::Real(double v) : node_(std::make_shared<Node>(BigFloat(v))) {}
Real::Real(int v) : Real(static_cast<std::int64_t>(v)) {}
Real::Real(std::int64_t v) : node_(std::make_shared<Node>(BigFloat(v))) {}
Real::Real(BigFloat v) : node_(std::make_shared<Node>(std::move(v))) {}
Real::Real(NodePtr node) : node_(std::move(node)) {
  if (!node_) throw std::invalid_argument("Real from a null node");
}

Real& Real::operator+=(const Real& o) { return *this = *this + o; }
Real& Real::operator-=(const Real& o) { return *this = *this - o; }
Real& Real::operator*=(const Real& o) { return *this = *this * o; }
Real& Real::operator/=(const Real& o) { return *this = *this / o; }

Real operator+(const Real& a, const Real& b) { return apply(OpKind::add, a, b); }
Real operator-(const Real& a, const Real& b) { return apply(OpKind::sub, a, b); }
Real operator*(const Real& a, const Real& b) { return apply(OpKind::mul, a, b); }
Real operator/(const Real& a, const Real& b) { return apply(OpKind::div, a, b); }
Real operator-(const Real& a) { return Real(std::make_shared<Node>(OpKind::neg, a.node())); }

Real sqrt(const Real& x) { return root(x, 2); }
Real root(const Real& x, unsigned k) {
  return Real(std::make_shared<Node>(OpKind::root, x.node(), nullptr, k));
}

Real make_leaf(double v) { return Real(v); }
Real make_leaf(std::int64_t v) { return Real(v); }

Real apply(OpKind kind, const Real& a, const Real& b, unsigned k) {
  switch (arity(kind)) {
    case 1: return Real(std::make_shared<Node>(kind, a.node(), nullptr, k));
    case 2: return Real(std::make_shared<Node>(kind, a.node(), b.node()));
    default: throw std::invalid_argument("apply() needs an operation kind");
  }
}

}  // namespace dagreal
