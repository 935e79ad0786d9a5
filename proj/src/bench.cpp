#include "dagreal/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace dagreal::bench {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Uniform integer in [0, n) without modulo bias.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % n;
}

// Exponential variate with mean one, strictly positive.
double exponential(std::mt19937_64& rng) {
  while (true) {
    const double u = std::ldexp(static_cast<double>((rng() >> 11) + 1), -53);  // (0, 1]
    const double r = -std::log(u);
    if (r != 0.0) return r;
  }
}

std::size_t operator_depth(const Real& x) { return dag_depth(*x.node()); }

}  // namespace

const char* to_string(Experiment e) noexcept {
  return e == Experiment::bincoeff ? "bincoeff" : "randops";
}

SeparationPolicy BenchConfig::effective_policy() const {
  if (sep_policy) return *sep_policy;
  return experiment == Experiment::randops ? SeparationPolicy::assume_nonzero
                                           : SeparationPolicy::bfmss;
}

void BenchConfig::validate() const {
  if (repeat == 0) throw std::invalid_argument("repeat must be at least 1");
  if (experiment == Experiment::bincoeff && n == 0) {
    throw std::invalid_argument("bincoeff needs n >= 1");
  }
  if (experiment == Experiment::randops && weights.total() == 0) {
    throw std::invalid_argument("operator weights must not all be zero");
  }
  if (q >= 0) throw std::invalid_argument("q must be negative");
}

Real build_bincoeff(std::uint64_t n) {
  const Real b = sqrt(Real(13));
  Real num(1);
  Real denom(1);
  for (std::uint64_t i = 0; i < n; ++i) {
    num *= b - Real(static_cast<std::int64_t>(i));
    denom *= Real(static_cast<std::int64_t>(i + 1));
  }
  return num / denom;
}

Real build_randops(std::uint64_t n, const Weights& w, std::uint64_t seed, OpCounts* chosen) {
  std::mt19937_64 rng(seed);
  const std::uint64_t total = w.total();
  if (total == 0 && n > 0) throw std::invalid_argument("operator weights must not all be zero");
  Real result(1);
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::uint64_t pick = uniform_below(rng, total);
    const Real operand = sqrt(Real(exponential(rng)));
    OpKind kind;
    if (pick < w.add) {
      kind = OpKind::add;
    } else if (pick < std::uint64_t{w.add} + w.sub) {
      kind = OpKind::sub;
    } else if (pick < std::uint64_t{w.add} + w.sub + w.mul) {
      kind = OpKind::mul;
    } else {
      kind = OpKind::div;
    }
    result = apply(kind, result, operand);
    if (chosen != nullptr) chosen->record(kind);
  }
  return result;
}

BenchRecord run(const BenchConfig& cfg) {
  cfg.validate();
  BenchRecord rec;
  rec.config = cfg;
  EvalConfig ec;
  ec.strategy = cfg.strategy;
  ec.threads = cfg.threads;
  ec.policy = cfg.effective_policy();
  Evaluator ev(ec);
  std::vector<double> walls;
  for (unsigned rep = 0; rep < cfg.repeat; ++rep) {
    auto t0 = Clock::now();
    const Real x = cfg.experiment == Experiment::bincoeff
                       ? build_bincoeff(cfg.n)
                       : build_randops(cfg.n, cfg.weights, cfg.seed);
    rec.construct_ms += ms_since(t0);
    rec.nodes_before = count_nodes(*x.node());
    rec.depth_before = operator_depth(x);
    ev.reset_stats();
    t0 = Clock::now();
    const Approximation a = ev.guarantee_absolute_error_two_to(x, cfg.q);
    walls.push_back(ms_since(t0));
    const EvalStats& s = ev.stats();
    rec.preprocess_ms += s.preprocess_ms;
    rec.restructure_ms += s.restructure_ms;
    rec.execute_ms += s.execute_ms;
    rec.nodes_after = count_nodes(*x.node());
    rec.depth_after = operator_depth(x);
    rec.ops = s.ops;
    rec.tasks = s.tasks;
    rec.ready_peak = s.ready_peak;
    rec.value = a.value;
  }
  const double reps = cfg.repeat;
  rec.construct_ms /= reps;
  rec.preprocess_ms /= reps;
  rec.restructure_ms /= reps;
  rec.execute_ms /= reps;
  rec.wall_ms_min = *std::min_element(walls.begin(), walls.end());
  rec.wall_ms_max = *std::max_element(walls.begin(), walls.end());
  double sum = 0.0;
  for (double w : walls) sum += w;
  rec.wall_ms_mean = std::clamp(sum / reps, rec.wall_ms_min, rec.wall_ms_max);
  return rec;
}

BenchRecord run_bincoeff(BenchConfig cfg) {
  cfg.experiment = Experiment::bincoeff;
  return run(cfg);
}

BenchRecord run_randops(BenchConfig cfg) {
  cfg.experiment = Experiment::randops;
  return run(cfg);
}

std::string csv_header() {
  return "experiment,n,q,strategy,threshold,threads,seed,repeat,wall_ms_mean,wall_ms_min,"
         "wall_ms_max,preprocess_ms,restructure_ms,execute_ms,nodes_before,nodes_after,"
         "depth_before,depth_after,n_add,n_sub,n_mul,n_div,n_root,tasks,ready_peak";
}

std::string csv_row(const BenchRecord& r) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.setf(std::ios::fixed);
  os.precision(3);
  const BenchConfig& c = r.config;
  os << to_string(c.experiment) << ',' << c.n << ',' << c.q << ',' << c.strategy.name() << ',';
  if (c.strategy.kind == Strategy::Kind::mtr_k) os << c.strategy.threshold;
  os << ',' << c.threads << ',' << c.seed << ',' << c.repeat << ',' << r.wall_ms_mean << ','
     << r.wall_ms_min << ',' << r.wall_ms_max << ',' << r.preprocess_ms << ','
     << r.restructure_ms << ',' << r.execute_ms << ',' << r.nodes_before << ',' << r.nodes_after
     << ',' << r.depth_before << ',' << r.depth_after << ',' << r.ops.add << ',' << r.ops.sub
     << ',' << r.ops.mul << ',' << r.ops.div << ',' << r.ops.root << ',' << r.tasks << ','
     << r.ready_peak;
  return os.str();
}

std::string emit_csv(const std::vector<BenchRecord>& records) {
  if (records.empty()) throw std::invalid_argument("emit_csv needs at least one record");
  std::string out = csv_header() + "\n";
  for (const auto& r : records) out += csv_row(r) + "\n";
  return out;
}

}  // namespace dagreal::bench
