#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dagreal/evaluator.hpp"

namespace dagreal::bench {

enum class Experiment { bincoeff, randops };

const char* to_string(Experiment e) noexcept;

struct Weights {
  std::uint32_t add = 1;
  std::uint32_t sub = 1;
  std::uint32_t mul = 1;
  std::uint32_t div = 1;

  std::uint64_t total() const { return std::uint64_t{add} + sub + mul + div; }
};

struct BenchConfig {
  Experiment experiment = Experiment::bincoeff;
  std::uint64_t n = 100;
  std::int64_t q = -50000;
  Strategy strategy = Strategy::none();
  unsigned threads = 4;
  Weights weights;
  std::uint64_t seed = 1;
  unsigned repeat = 25;
  std::optional<SeparationPolicy> sep_policy;  // default depends on the experiment

  SeparationPolicy effective_policy() const;
  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
};

struct BenchRecord {
  BenchConfig config;
  double wall_ms_mean = 0.0;
  double wall_ms_min = 0.0;
  double wall_ms_max = 0.0;
  // Per-phase means over the repeats. Construction is not part of wall time.
  double construct_ms = 0.0;
  double preprocess_ms = 0.0;
  double restructure_ms = 0.0;
  double execute_ms = 0.0;
  std::size_t nodes_before = 0;
  std::size_t nodes_after = 0;
  std::size_t depth_before = 0;
  std::size_t depth_after = 0;
  OpCounts ops;  // bigfloat operations of the last repeat
  std::uint64_t tasks = 0;
  std::uint64_t ready_peak = 0;
  BigFloat value;  // approximation from the last repeat
};

/// binom(sqrt(13), n) built like the classic iterative listing.
Real build_bincoeff(std::uint64_t n);

/// Deterministic random operation sequence starting at 1: each step applies
/// + - * / (chosen by weight) with sqrt(r), r exponential with mean one.
/// `chosen`, when given, receives how often each operator was picked.
Real build_randops(std::uint64_t n, const Weights& w, std::uint64_t seed,
                   OpCounts* chosen = nullptr);

/// Builds, evaluates to 2^q and measures `repeat` times (fresh dag each time).
BenchRecord run(const BenchConfig& cfg);
BenchRecord run_bincoeff(BenchConfig cfg);
BenchRecord run_randops(BenchConfig cfg);

std::string csv_header();
std::string csv_row(const BenchRecord& r);
/// Header plus one line per record, LF terminated.
std::string emit_csv(const std::vector<BenchRecord>& records);

}  // namespace dagreal::bench
