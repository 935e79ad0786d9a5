#pragma once

#include <cstdint>
#include <memory>

#include "dagreal/plan.hpp"
#include "dagreal/real.hpp"
#include "dagreal/restructure.hpp"
#include "dagreal/separation.hpp"
#include "dagreal/task_pool.hpp"

namespace dagreal {

struct EvalConfig {
  Strategy strategy = Strategy::none();
  unsigned threads = 0;  // 0: serial execution on the calling thread
  SeparationPolicy policy = SeparationPolicy::bfmss;
  /// Under assume_nonzero, give up (IterationLimit) once the error target
  /// would drop below 2^iteration_cap.
  std::int64_t iteration_cap = -(std::int64_t{1} << 20);
};

struct EvalStats {
  double restructure_ms = 0.0;
  double preprocess_ms = 0.0;  // bounds, separation loops and planning
  double execute_ms = 0.0;
  std::uint64_t plans = 0;
  std::uint64_t tasks = 0;
  std::uint64_t ready_peak = 0;
  OpCounts ops;
};

/// Accuracy-driven evaluation of dags.
///
/// The first decision on a dag restructures it (once) with the configured
/// strategy. Magnitude bounds needed for target propagation are gathered
/// serially; divisors and radicands are separated from zero by the same
/// sign loop that decide_sign uses. Bigfloat work is done serially or on a
/// task pool, with identical results.
class Evaluator {
 public:
  explicit Evaluator(EvalConfig cfg = {});
  ~Evaluator();

  Evaluator(const Evaluator&) = delete;
  Evaluator& operator=(const Evaluator&) = delete;

  const EvalConfig& config() const noexcept { return cfg_; }

  /// Exact sign of x.
  int decide_sign(const Real& x);
  /// Approximation with |value - x| <= 2^q.
  Approximation guarantee_absolute_error_two_to(const Real& x, std::int64_t q);

  /// Restructures (once) and establishes the magnitude bounds planning needs.
  void prepare(Node& root);

  const EvalStats& stats() const noexcept { return stats_; }
  void reset_stats() { stats_ = {}; }

 private:
  int sign_loop(Node& node);
  Approximation run_plan(Node& root, ErrorExp q);
  void ensure_restructured(Node& root);

  EvalConfig cfg_;
  std::unique_ptr<TaskPool> pool_;
  EvalStats stats_;
};

/// Sign of x with a default (serial, unrestructured) evaluator.
int decide_sign(const Real& x, SeparationPolicy policy = SeparationPolicy::bfmss);

}  // namespace dagreal
