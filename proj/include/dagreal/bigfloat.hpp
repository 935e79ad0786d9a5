#pragma once

#include <cstdint>
#include <string>

#include <mpfr.h>

#include "dagreal/error_exp.hpp"

namespace dagreal {

/// Arbitrary precision binary float, value = sign * mantissa * 2^exponent.
///
/// Thin RAII wrapper over an mpfr_t. Values are immutable once built and all
/// arithmetic is exposed as pure free functions taking an absolute error
/// target, so a BigFloat can be shared between threads freely.
class BigFloat {
 public:
  BigFloat();  // zero
  explicit BigFloat(double v);
  explicit BigFloat(std::int64_t v);
  explicit BigFloat(int v) : BigFloat(static_cast<std::int64_t>(v)) {}

  BigFloat(const BigFloat& other);
  BigFloat(BigFloat&& other) noexcept;
  BigFloat& operator=(const BigFloat& other);
  BigFloat& operator=(BigFloat&& other) noexcept;
  ~BigFloat();

  /// Copies an MPFR value exactly (precision is widened as needed).
  static BigFloat from_mpfr(mpfr_srcptr v);
  /// Parses a hexadecimal float as produced by to_hex().
  static BigFloat from_hex(const std::string& s);

  int sign() const noexcept;
  bool is_zero() const noexcept { return sign() == 0; }

  /// floor(log2 |x|). Requires x != 0.
  std::int64_t msb() const noexcept;
  /// Exponent of the lowest set bit. Requires x != 0.
  std::int64_t lsb() const noexcept;
  /// Number of significant bits of the (odd) mantissa; 0 for zero.
  std::int64_t mantissa_bits() const noexcept;

  double to_double() const noexcept;
  std::string to_hex() const;
  std::string to_decimal(int digits = 20) const;

  mpfr_srcptr get() const noexcept { return v_; }
  /// Storage precision in bits; an implementation detail exposed for stats.
  std::int64_t precision() const noexcept { return mpfr_get_prec(v_); }

  friend bool operator==(const BigFloat& a, const BigFloat& b) noexcept;
  friend int compare(const BigFloat& a, const BigFloat& b) noexcept;
  /// Compares |a| with 2^e.
  friend int compare_abs_pow2(const BigFloat& a, std::int64_t e) noexcept;

 private:
  struct WithPrecision {};
  BigFloat(WithPrecision, mpfr_prec_t prec);
  friend struct BigFloatAccess;

  mpfr_t v_;
};

// Each operation returns r with |r - exact| <= 2^target. With an EXACT target
// (add, sub, mul only) the exact result is returned. When `exact` is given it
// receives whether r equals the exact result.
BigFloat add(const BigFloat& x, const BigFloat& y, ErrorExp target, bool* exact = nullptr);
BigFloat sub(const BigFloat& x, const BigFloat& y, ErrorExp target, bool* exact = nullptr);
BigFloat mul(const BigFloat& x, const BigFloat& y, ErrorExp target, bool* exact = nullptr);
/// Throws EvalError(division_by_zero) if y == 0. Target must be finite.
BigFloat div(const BigFloat& x, const BigFloat& y, ErrorExp target, bool* exact = nullptr);
/// k-th root, k >= 2. Throws EvalError(negative_radicand) for x < 0 and even
/// k. Target must be finite.
BigFloat root(const BigFloat& x, unsigned k, ErrorExp target, bool* exact = nullptr);
BigFloat neg(const BigFloat& x);

/// Releases MPFR's per-thread caches; call before a worker thread exits.
void release_thread_caches() noexcept;

}  // namespace dagreal
