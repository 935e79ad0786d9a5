#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "dagreal/bigfloat.hpp"

namespace dagreal {

/// Outward-rounded machine precision interval used as the floating-point
/// filter.
///
/// Represents [lo, hi] * 2^scale with double endpoints normalised so that
/// max(|lo|, |hi|) lies in [0.5, 1). The separate scale keeps huge and tiny
/// magnitudes representable; the precision is still that of a double.
/// Operations that cannot certify an enclosure (zero in a divisor, even root
/// of a range reaching below zero, non-finite intermediates) produce an invalid
/// interval instead of throwing.
class FilterInterval {
 public:
  FilterInterval() = default;  // invalid

  static FilterInterval invalid() { return {}; }
  static FilterInterval point(double v);
  /// Encloses [lo, hi]; both must be finite with lo <= hi.
  static FilterInterval from_bounds(double lo, double hi);
  static FilterInterval enclosing(const BigFloat& v);

  bool valid() const noexcept { return valid_; }
  double lo_mantissa() const noexcept { return lo_; }
  double hi_mantissa() const noexcept { return hi_; }
  std::int64_t scale() const noexcept { return scale_; }

  /// Endpoints as plain doubles (may round outward to +-inf or 0).
  double lower() const noexcept;
  double upper() const noexcept;

  bool contains(double v) const noexcept;
  bool is_zero() const noexcept { return valid_ && lo_ == 0.0 && hi_ == 0.0; }
  /// Certified sign, if the interval decides it.
  std::optional<int> sign() const noexcept;
  /// Upper bound U with |v| < 2^(U+1) for every v inside. Empty for invalid
  /// or zero intervals.
  std::optional<std::int64_t> msb_upper() const noexcept;
  /// Lower bound L with |v| >= 2^L for every v inside. Empty unless the
  /// interval excludes zero.
  std::optional<std::int64_t> msb_lower() const noexcept;

  std::string to_string() const;

  friend FilterInterval operator+(const FilterInterval& a, const FilterInterval& b);
  friend FilterInterval operator-(const FilterInterval& a, const FilterInterval& b);
  friend FilterInterval operator*(const FilterInterval& a, const FilterInterval& b);
  friend FilterInterval operator/(const FilterInterval& a, const FilterInterval& b);
  friend FilterInterval operator-(const FilterInterval& a);
  friend FilterInterval root(const FilterInterval& a, unsigned k);

 private:
  static FilterInterval normalized(double lo, double hi, std::int64_t scale);

  double lo_ = 0.0;
  double hi_ = 0.0;
  std::int64_t scale_ = 0;
  bool valid_ = false;
};

enum class IvOp { add, sub, mul, div, neg, root };

/// Generic dispatch; `b` is ignored for unary operations, `k` only used by root.
FilterInterval iv_op(IvOp op, const FilterInterval& a,
                     const FilterInterval& b = FilterInterval::invalid(), unsigned k = 2);

}  // namespace dagreal
