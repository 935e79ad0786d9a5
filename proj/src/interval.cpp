#include "dagreal/interval.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace dagreal {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Below this magnitude fma residuals may underflow and stop being exact.
const double kResidualSafe = std::ldexp(1.0, -900);

double down(double x) { return std::nextafter(x, -kInf); }
double up(double x) { return std::nextafter(x, kInf); }

// Round-to-nearest result plus the sign of (exact - result) when it is known.
struct Rounded {
  double value;
  std::optional<int> residual_sign;
};

double lower_of(const Rounded& r) {
  if (r.residual_sign && *r.residual_sign >= 0) return r.value;
  return down(r.value);
}

double upper_of(const Rounded& r) {
  if (r.residual_sign && *r.residual_sign <= 0) return r.value;
  return up(r.value);
}

int sgn(double x) { return (x > 0) - (x < 0); }

Rounded add_rounded(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  const double err = (a - (s - bb)) + (b - bb);
  return {s, sgn(err)};
}

Rounded mul_rounded(double a, double b) {
  if (a == 0.0 || b == 0.0) return {0.0, 0};
  const double p = a * b;
  if (std::fabs(p) < kResidualSafe) return {p, std::nullopt};
  return {p, sgn(std::fma(a, b, -p))};
}

Rounded div_rounded(double a, double b) {
  if (a == 0.0) return {0.0, 0};
  const double q = a / b;
  if (std::fabs(q) < kResidualSafe || std::fabs(a) < kResidualSafe) return {q, std::nullopt};
  const double r = std::fma(-q, b, a);  // a - q*b, exact
  return {q, sgn(r) * sgn(b)};
}

Rounded sqrt_rounded(double x) {
  if (x == 0.0) return {0.0, 0};
  const double s = std::sqrt(x);
  if (x < kResidualSafe) return {s, std::nullopt};
  return {s, sgn(std::fma(-s, s, x))};
}

// x * 2^d rounded toward -inf (lower) or +inf (upper).
double scale_lower(double x, std::int64_t d) {
  const double r = std::ldexp(x, static_cast<int>(std::clamp<std::int64_t>(d, -4000, 4000)));
  if (d < 0 && std::ldexp(r, static_cast<int>(-std::max<std::int64_t>(d, -4000))) != x) {
    return down(r);
  }
  return r;
}

double scale_upper(double x, std::int64_t d) {
  const double r = std::ldexp(x, static_cast<int>(std::clamp<std::int64_t>(d, -4000, 4000)));
  if (d < 0 && std::ldexp(r, static_cast<int>(-std::max<std::int64_t>(d, -4000))) != x) {
    return up(r);
  }
  return r;
}

}  // namespace

FilterInterval FilterInterval::normalized(double lo, double hi, std::int64_t scale) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) return invalid();
  FilterInterval r;
  r.valid_ = true;
  const double m = std::max(std::fabs(lo), std::fabs(hi));
  if (m == 0.0) return r;
  int e = 0;
  std::frexp(m, &e);
  r.lo_ = scale_lower(lo, -e);
  r.hi_ = scale_upper(hi, -e);
  r.scale_ = clamp_exp(scale + e);
  return r;
}

FilterInterval FilterInterval::point(double v) { return normalized(v, v, 0); }

FilterInterval FilterInterval::from_bounds(double lo, double hi) { return normalized(lo, hi, 0); }

FilterInterval FilterInterval::enclosing(const BigFloat& v) {
  if (v.is_zero()) return point(0.0);
  long elo = 0;
  long ehi = 0;
  const double dlo = mpfr_get_d_2exp(&elo, v.get(), MPFR_RNDD);
  const double dhi = mpfr_get_d_2exp(&ehi, v.get(), MPFR_RNDU);
  const long e = std::max(elo, ehi);
  // Exponents differ by at most one, so rescaling is exact.
  return normalized(std::ldexp(dlo, static_cast<int>(elo - e)),
                    std::ldexp(dhi, static_cast<int>(ehi - e)), e);
}

double FilterInterval::lower() const noexcept {
  const auto s = std::clamp<std::int64_t>(scale_, -4000, 4000);
  return scale_lower(lo_, s);
}

double FilterInterval::upper() const noexcept {
  const auto s = std::clamp<std::int64_t>(scale_, -4000, 4000);
  return scale_upper(hi_, s);
}

bool FilterInterval::contains(double v) const noexcept {
  if (!valid_) return false;
  return lower() <= v && v <= upper();
}

std::optional<int> FilterInterval::sign() const noexcept {
  if (!valid_) return std::nullopt;
  if (lo_ > 0.0) return 1;
  if (hi_ < 0.0) return -1;
  if (lo_ == 0.0 && hi_ == 0.0) return 0;
  return std::nullopt;
}

std::optional<std::int64_t> FilterInterval::msb_upper() const noexcept {
  if (!valid_ || is_zero()) return std::nullopt;
  int e = 0;
  std::frexp(std::max(std::fabs(lo_), std::fabs(hi_)), &e);
  return sat_add(e - 1, scale_);
}

std::optional<std::int64_t> FilterInterval::msb_lower() const noexcept {
  const auto s = sign();
  if (!s || *s == 0) return std::nullopt;
  int e = 0;
  std::frexp(std::min(std::fabs(lo_), std::fabs(hi_)), &e);
  return sat_add(e - 1, scale_);
}

std::string FilterInterval::to_string() const {
  if (!valid_) return "invalid";
  std::ostringstream os;
  os.precision(17);
  os << "[" << lo_ << ", " << hi_ << "]*2^" << scale_;
  return os.str();
}

FilterInterval operator+(const FilterInterval& a, const FilterInterval& b) {
  if (!a.valid_ || !b.valid_) return FilterInterval::invalid();
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const std::int64_t s = std::max(a.scale_, b.scale_);
  const double alo = scale_lower(a.lo_, a.scale_ - s);
  const double ahi = scale_upper(a.hi_, a.scale_ - s);
  const double blo = scale_lower(b.lo_, b.scale_ - s);
  const double bhi = scale_upper(b.hi_, b.scale_ - s);
  return FilterInterval::normalized(lower_of(add_rounded(alo, blo)),
                                    upper_of(add_rounded(ahi, bhi)), s);
}

FilterInterval operator-(const FilterInterval& a) {
  if (!a.valid_) return a;
  FilterInterval r = a;
  r.lo_ = -a.hi_;
  r.hi_ = -a.lo_;
  return r;
}

FilterInterval operator-(const FilterInterval& a, const FilterInterval& b) { return a + (-b); }

FilterInterval operator*(const FilterInterval& a, const FilterInterval& b) {
  if (!a.valid_ || !b.valid_) return FilterInterval::invalid();
  if (a.is_zero() || b.is_zero()) return FilterInterval::point(0.0);
  const std::array<Rounded, 4> c = {mul_rounded(a.lo_, b.lo_), mul_rounded(a.lo_, b.hi_),
                                    mul_rounded(a.hi_, b.lo_), mul_rounded(a.hi_, b.hi_)};
  double lo = kInf;
  double hi = -kInf;
  for (const auto& r : c) {
    lo = std::min(lo, lower_of(r));
    hi = std::max(hi, upper_of(r));
  }
  return FilterInterval::normalized(lo, hi, sat_add(a.scale_, b.scale_));
}

FilterInterval operator/(const FilterInterval& a, const FilterInterval& b) {
  if (!a.valid_ || !b.valid_) return FilterInterval::invalid();
  if (b.lo_ <= 0.0 && b.hi_ >= 0.0) return FilterInterval::invalid();
  if (a.is_zero()) return FilterInterval::point(0.0);
  const std::array<Rounded, 4> c = {div_rounded(a.lo_, b.lo_), div_rounded(a.lo_, b.hi_),
                                    div_rounded(a.hi_, b.lo_), div_rounded(a.hi_, b.hi_)};
  double lo = kInf;
  double hi = -kInf;
  for (const auto& r : c) {
    lo = std::min(lo, lower_of(r));
    hi = std::max(hi, upper_of(r));
  }
  return FilterInterval::normalized(lo, hi, sat_sub(a.scale_, b.scale_));
}

FilterInterval root(const FilterInterval& a, unsigned k) {
  if (!a.valid_ || k < 2 || k > 64) return FilterInterval::invalid();
  if (k % 2 == 0 && a.lo_ < 0.0) return FilterInterval::invalid();
  if (a.is_zero()) return a;
  const auto kk = static_cast<std::int64_t>(k);
  // Make the scale divisible by k; the mantissas absorb the remainder exactly.
  const std::int64_t rem = a.scale_ - floor_div(a.scale_, kk) * kk;
  const double lo = std::ldexp(a.lo_, static_cast<int>(rem));
  const double hi = std::ldexp(a.hi_, static_cast<int>(rem));
  const std::int64_t scale = floor_div(a.scale_, kk);
  if (k == 2) {
    return FilterInterval::normalized(lower_of(sqrt_rounded(lo)), upper_of(sqrt_rounded(hi)),
                                      scale);
  }
  // pow is not correctly rounded; widen by a relative 2^-40 on both sides.
  const double widen = std::ldexp(1.0, -40);
  auto kth = [k](double x) {
    const double r = std::pow(std::fabs(x), 1.0 / static_cast<double>(k));
    return x < 0.0 ? -r : r;
  };
  const double rlo = kth(lo);
  const double rhi = kth(hi);
  const double out_lo = rlo - std::fabs(rlo) * widen;
  const double out_hi = rhi + std::fabs(rhi) * widen;
  return FilterInterval::normalized(down(out_lo), up(out_hi), scale);
}

FilterInterval iv_op(IvOp op, const FilterInterval& a, const FilterInterval& b, unsigned k) {
  switch (op) {
    case IvOp::add: return a + b;
    case IvOp::sub: return a - b;
    case IvOp::mul: return a * b;
    case IvOp::div: return a / b;
    case IvOp::neg: return -a;
    case IvOp::root: return root(a, k);
  }
  return FilterInterval::invalid();
}

}  // namespace dagreal
