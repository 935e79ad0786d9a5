#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <string>

namespace dagreal {

// Finite exponents are kept inside [-kExpLimit, kExpLimit]; arithmetic on
// them saturates instead of wrapping.
inline constexpr std::int64_t kExpLimit = std::int64_t{1} << 42;

constexpr std::int64_t clamp_exp(std::int64_t e) noexcept {
  return e < -kExpLimit ? -kExpLimit : (e > kExpLimit ? kExpLimit : e);
}

constexpr std::int64_t sat_add(std::int64_t a, std::int64_t b) noexcept {
  return clamp_exp(clamp_exp(a) + clamp_exp(b));
}

constexpr std::int64_t sat_sub(std::int64_t a, std::int64_t b) noexcept {
  return clamp_exp(clamp_exp(a) - clamp_exp(b));
}

constexpr std::int64_t sat_mul(std::int64_t a, std::int64_t b) noexcept {
  std::int64_t r = 0;
  if (__builtin_mul_overflow(clamp_exp(a), clamp_exp(b), &r)) {
    return (a < 0) != (b < 0) ? -kExpLimit : kExpLimit;
  }
  return clamp_exp(r);
}

/// Floor and ceiling division for possibly negative numerators.
constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) noexcept {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

constexpr std::int64_t ceil_div(std::int64_t a, std::int64_t b) noexcept {
  return -floor_div(-a, b);
}

/// An absolute error bound 2^e, or EXACT (zero error). EXACT orders below
/// every finite exponent.
class ErrorExp {
 public:
  constexpr ErrorExp() noexcept = default;  // EXACT
  constexpr explicit ErrorExp(std::int64_t e) noexcept : e_(clamp_exp(e)) {}

  static constexpr ErrorExp exact() noexcept { return ErrorExp{}; }

  constexpr bool is_exact() const noexcept { return e_ == kExactRep; }
  constexpr bool is_finite() const noexcept { return !is_exact(); }
  constexpr std::int64_t exponent() const noexcept { return e_; }

  /// Shifts a finite bound; EXACT stays EXACT.
  constexpr ErrorExp shifted(std::int64_t d) const noexcept {
    return is_exact() ? *this : ErrorExp{sat_add(e_, d)};
  }

  friend constexpr auto operator<=>(ErrorExp, ErrorExp) noexcept = default;

  std::string to_string() const {
    return is_exact() ? std::string("EXACT") : std::to_string(e_);
  }

 private:
  static constexpr std::int64_t kExactRep = std::numeric_limits<std::int64_t>::min();
  std::int64_t e_ = kExactRep;
};

}  // namespace dagreal
