#include "dagreal/bigfloat.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dagreal/errors.hpp"

namespace dagreal {

namespace {

constexpr std::int64_t kMaxPrecision = std::int64_t{1} << 34;

mpfr_prec_t checked_prec(std::int64_t p) {
  if (p > kMaxPrecision) {
    throw EvalError(Errc::precision_overflow,
                    "working precision of " + std::to_string(p) + " bits requested");
  }
  return static_cast<mpfr_prec_t>(std::max<std::int64_t>(p, 2));
}

// Working precision that keeps round-to-nearest error of a result whose msb is
// at most `msb_bound` below 2^(target - 2).
mpfr_prec_t working_prec(std::int64_t msb_bound, ErrorExp target) {
  return checked_prec(sat_sub(msb_bound, target.exponent()) + 2);
}

}  // namespace

struct BigFloatAccess {
  static mpfr_ptr raw(BigFloat& x) { return x.v_; }
  static BigFloat with_prec(mpfr_prec_t p) { return BigFloat(BigFloat::WithPrecision{}, p); }
};

BigFloat::BigFloat() : BigFloat(WithPrecision{}, 2) { mpfr_set_zero(v_, 1); }

BigFloat::BigFloat(WithPrecision, mpfr_prec_t prec) { mpfr_init2(v_, prec); }

BigFloat::BigFloat(double v) : BigFloat(WithPrecision{}, 53) {
  if (!std::isfinite(v)) {
    throw EvalError(Errc::non_finite_input, "BigFloat from non-finite double");
  }
  mpfr_set_d(v_, v, MPFR_RNDN);
}

BigFloat::BigFloat(std::int64_t v) : BigFloat(WithPrecision{}, 64) {
  mpfr_set_sj(v_, v, MPFR_RNDN);
}

BigFloat::BigFloat(const BigFloat& other) : BigFloat(WithPrecision{}, mpfr_get_prec(other.v_)) {
  mpfr_set(v_, other.v_, MPFR_RNDN);
}

BigFloat::BigFloat(BigFloat&& other) noexcept : BigFloat(WithPrecision{}, 2) {
  mpfr_swap(v_, other.v_);
  mpfr_set_zero(other.v_, 1);
}

BigFloat& BigFloat::operator=(const BigFloat& other) {
  if (this != &other) {
    mpfr_set_prec(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }
  return *this;
}

BigFloat& BigFloat::operator=(BigFloat&& other) noexcept {
  mpfr_swap(v_, other.v_);
  return *this;
}

BigFloat::~BigFloat() { mpfr_clear(v_); }

BigFloat BigFloat::from_mpfr(mpfr_srcptr v) {
  mpfr_prec_t p = mpfr_zero_p(v) ? 2 : std::max<mpfr_prec_t>(mpfr_min_prec(v), 2);
  BigFloat r(WithPrecision{}, p);
  mpfr_set(r.v_, v, MPFR_RNDN);
  return r;
}

BigFloat BigFloat::from_hex(const std::string& s) {
  mpfr_t tmp;
  mpfr_init2(tmp, static_cast<mpfr_prec_t>(s.size() * 4 + 8));
  if (mpfr_set_str(tmp, s.c_str(), 16, MPFR_RNDN) != 0) {
    mpfr_clear(tmp);
    throw std::invalid_argument("not a hexadecimal float: " + s);
  }
  BigFloat r = from_mpfr(tmp);
  mpfr_clear(tmp);
  return r;
}

int BigFloat::sign() const noexcept { return mpfr_sgn(v_); }

std::int64_t BigFloat::msb() const noexcept { return mpfr_get_exp(v_) - 1; }

std::int64_t BigFloat::lsb() const noexcept {
  return mpfr_get_exp(v_) - static_cast<std::int64_t>(mpfr_min_prec(v_));
}

std::int64_t BigFloat::mantissa_bits() const noexcept {
  return is_zero() ? 0 : static_cast<std::int64_t>(mpfr_min_prec(v_));
}

double BigFloat::to_double() const noexcept { return mpfr_get_d(v_, MPFR_RNDN); }

std::string BigFloat::to_hex() const {
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%Ra", v_);
  std::string s(buf);
  mpfr_free_str(buf);
  return s;
}

std::string BigFloat::to_decimal(int digits) const {
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%.*Rg", digits, v_);
  std::string s(buf);
  mpfr_free_str(buf);
  return s;
}

bool operator==(const BigFloat& a, const BigFloat& b) noexcept {
  return mpfr_equal_p(a.v_, b.v_) != 0;
}

int compare(const BigFloat& a, const BigFloat& b) noexcept { return mpfr_cmp(a.v_, b.v_); }

int compare_abs_pow2(const BigFloat& a, std::int64_t e) noexcept {
  if (a.is_zero()) return -1;
  const std::int64_t m = a.msb();
  if (m != e) return m < e ? -1 : 1;
  return mpfr_min_prec(a.v_) == 1 ? 0 : 1;
}

BigFloat add(const BigFloat& x, const BigFloat& y, ErrorExp target, bool* exact) {
  if (x.is_zero() || y.is_zero()) {
    if (exact) *exact = true;
    return x.is_zero() ? y : x;
  }
  mpfr_prec_t p;
  if (target.is_exact()) {
    const std::int64_t top = std::max(x.msb(), y.msb()) + 1;
    const std::int64_t bottom = std::min(x.lsb(), y.lsb());
    p = checked_prec(top - bottom + 1);
  } else {
    p = working_prec(std::max(x.msb(), y.msb()) + 1, target);
  }
  BigFloat r = BigFloatAccess::with_prec(p);
  const int t = mpfr_add(BigFloatAccess::raw(r), x.get(), y.get(), MPFR_RNDN);
  if (exact) *exact = (t == 0);
  return r;
}

BigFloat sub(const BigFloat& x, const BigFloat& y, ErrorExp target, bool* exact) {
  return add(x, neg(y), target, exact);
}

BigFloat mul(const BigFloat& x, const BigFloat& y, ErrorExp target, bool* exact) {
  if (x.is_zero() || y.is_zero()) {
    if (exact) *exact = true;
    return BigFloat{};
  }
  const mpfr_prec_t p = target.is_exact()
                            ? checked_prec(x.mantissa_bits() + y.mantissa_bits())
                            : working_prec(x.msb() + y.msb() + 1, target);
  BigFloat r = BigFloatAccess::with_prec(p);
  const int t = mpfr_mul(BigFloatAccess::raw(r), x.get(), y.get(), MPFR_RNDN);
  if (exact) *exact = (t == 0);
  return r;
}

BigFloat div(const BigFloat& x, const BigFloat& y, ErrorExp target, bool* exact) {
  if (y.is_zero()) throw EvalError(Errc::division_by_zero, "bigfloat division by zero");
  if (target.is_exact()) throw std::invalid_argument("div requires a finite error target");
  if (x.is_zero()) {
    if (exact) *exact = true;
    return BigFloat{};
  }
  BigFloat r = BigFloatAccess::with_prec(working_prec(x.msb() - y.msb() + 1, target));
  const int t = mpfr_div(BigFloatAccess::raw(r), x.get(), y.get(), MPFR_RNDN);
  if (exact) *exact = (t == 0);
  return r;
}

BigFloat root(const BigFloat& x, unsigned k, ErrorExp target, bool* exact) {
  if (k < 2) throw std::invalid_argument("root index must be at least 2");
  if (target.is_exact()) throw std::invalid_argument("root requires a finite error target");
  if (x.sign() < 0 && k % 2 == 0) {
    throw EvalError(Errc::negative_radicand, "even root of a negative bigfloat");
  }
  if (x.is_zero()) {
    if (exact) *exact = true;
    return BigFloat{};
  }
  const std::int64_t msb_bound = ceil_div(x.msb() + 1, static_cast<std::int64_t>(k));
  BigFloat r = BigFloatAccess::with_prec(working_prec(msb_bound, target));
  const int t = k == 2 ? mpfr_sqrt(BigFloatAccess::raw(r), x.get(), MPFR_RNDN)
                       : mpfr_rootn_ui(BigFloatAccess::raw(r), x.get(), k, MPFR_RNDN);
  if (exact) *exact = (t == 0);
  return r;
}

BigFloat neg(const BigFloat& x) {
  BigFloat r(x);
  mpfr_neg(BigFloatAccess::raw(r), r.get(), MPFR_RNDN);
  return r;
}

void release_thread_caches() noexcept { mpfr_free_cache(); }

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::division_by_zero: return "DivisionByZero";
    case Errc::negative_radicand: return "NegativeRadicand";
    case Errc::zero_denominator: return "ZeroDenominator";
    case Errc::iteration_limit: return "IterationLimit";
    case Errc::degree_overflow: return "DegreeOverflow";
    case Errc::non_finite_input: return "NonFiniteInput";
    case Errc::missing_magnitude_bound: return "MissingMagnitudeBound";
    case Errc::precision_overflow: return "PrecisionOverflow";
  }
  return "UnknownError";
}

}  // namespace dagreal
