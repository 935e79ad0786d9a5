#pragma once

#include <stdexcept>
#include <string>

namespace dagreal {

enum class Errc {
  division_by_zero,
  negative_radicand,
  zero_denominator,
  iteration_limit,
  degree_overflow,
  non_finite_input,
  missing_magnitude_bound,
  precision_overflow,
};

const char* to_string(Errc code) noexcept;

/// Thrown for numeric failures detected while deciding or evaluating.
class EvalError : public std::runtime_error {
 public:
  EvalError(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace dagreal
