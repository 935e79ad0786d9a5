// Acceptance runner: one line per criterion, exit status 1 when a gating
// criterion fails.
//
// Timing criteria (the speedup clause of 6, and 7, 8) only gate on hosts with
// at least four hardware threads. Elsewhere they still run and print their
// measured verdict, marked "not gating".

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "dagreal/bench.hpp"
#include "dagreal/errors.hpp"
#include "dagreal/evaluator.hpp"
#include "dagreal/operator_tree.hpp"
#include "dagreal/restructure.hpp"
#include "fixtures.hpp"
#include "oracle.hpp"

using namespace dagreal;
using bench::BenchConfig;
using bench::BenchRecord;
using bench::Experiment;
using bench::Weights;

namespace {

// Pinned tolerances.
constexpr std::int64_t kC1Q = -256;
constexpr mpfr_prec_t kC1OraclePrec = 512;
constexpr double kC1BudgetS = 120.0;
constexpr std::int64_t kC2Q = -1000;
constexpr double kC2BudgetS = 5.0;
constexpr double kC4Slack = 16.0;  // depth <= 2 log2 n + kC4Slack
constexpr std::uint64_t kC5Threshold = 5;
constexpr std::uint64_t kC5Huge = 1000000000;
constexpr double kC6MinSpeedup = 2.0;
constexpr double kC6BudgetS = 180.0;
constexpr double kC7FdivRatio = 2.0;
constexpr std::uint64_t kC8MinK = 1;
constexpr std::uint64_t kC8MaxK = 10;
constexpr double kC8Closeness = 0.10;
constexpr double kC9FilterShare = 0.95;
constexpr double kC9Magnitude = 1e-6;
constexpr unsigned kTimingCores = 4;

enum class Status { pass, fail, na };

struct Outcome {
  Status status = Status::pass;
  std::string detail;
  bool gating = true;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Outcome verdict(bool ok, std::string detail, bool gating = true) {
  return {ok ? Status::pass : Status::fail, std::move(detail), gating};
}

unsigned hw_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

bool timing_gates() { return hw_threads() >= kTimingCores; }

int oracle_sign(const Node& n) {
  for (mpfr_prec_t p = 128; p <= 65536; p *= 2) {
    const int s = oracle::enclose(n, p).sign();
    if (s != 0) return s;
  }
  return 0;
}

// Timed benchmark runs, cached by configuration.
class Timings {
 public:
  explicit Timings(unsigned repeat) : repeat_(repeat) {}

  double ms(Experiment e, std::uint64_t n, Strategy s, Weights w = {},
            std::optional<SeparationPolicy> policy = std::nullopt, unsigned threads = 4) {
    const auto key = std::make_tuple(static_cast<int>(e), n, static_cast<int>(s.kind),
                                     s.kind == Strategy::Kind::mtr_k ? s.threshold : 0, w.add,
                                     w.sub, w.mul, w.div, policy ? static_cast<int>(*policy) : -1,
                                     threads);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    BenchConfig c;
    c.experiment = e;
    c.n = n;
    c.q = -50000;
    c.strategy = s;
    c.threads = threads;
    c.weights = w;
    c.repeat = repeat_;
    c.seed = 1;
    c.sep_policy = policy;
    const BenchRecord r = bench::run(c);
    // Minimum over repeats: the least noisy estimate on a shared host.
    std::fprintf(stderr, "  [%s n=%llu %s%s t=%u] min %.0f ms, mean %.0f ms\n",
                 bench::to_string(e), static_cast<unsigned long long>(n), s.name().c_str(),
                 s.kind == Strategy::Kind::mtr_k ? ("(" + std::to_string(s.threshold) + ")").c_str()
                                                  : "",
                 threads, r.wall_ms_min, r.wall_ms_mean);
    cache_[key] = r.wall_ms_min;
    return r.wall_ms_min;
  }

 private:
  unsigned repeat_;
  std::map<std::tuple<int, std::uint64_t, int, std::uint64_t, std::uint32_t, std::uint32_t,
                      std::uint32_t, std::uint32_t, int, unsigned>,
           double>
      cache_;
};

// 1. Random dags against the interval oracle.
Outcome c1() {
  const auto t0 = Clock::now();
  const Strategy strategies[] = {Strategy::none(), Strategy::amb(), Strategy::mtr(),
                                 Strategy::mtr_k(5)};
  int checked = 0;
  int bad = 0;
  std::string first_bad;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const Real ref = bench::build_randops(500, Weights{}, seed);
    const oracle::Enclosure e = oracle::enclose_to(*ref.node(), kC1Q, kC1OraclePrec);
    for (const Strategy s : strategies) {
      for (unsigned threads : {1u, 4u}) {
        const Real x = bench::build_randops(500, Weights{}, seed);
        EvalConfig cfg;
        cfg.strategy = s;
        cfg.threads = threads;
        cfg.policy = SeparationPolicy::assume_nonzero;
        Evaluator ev(cfg);
        const Approximation a = ev.guarantee_absolute_error_two_to(x, kC1Q);
        ++checked;
        if (!oracle::within(a.value, e, kC1Q)) {
          if (bad++ == 0) {
            first_bad = "seed " + std::to_string(seed) + " " + s.name() + " t=" +
                        std::to_string(threads);
          }
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  std::string d = std::to_string(checked - bad) + "/" + std::to_string(checked) +
                  " within 2^-256, " + fmt("%.1f s", secs);
  if (bad) d += ", first mismatch " + first_bad;
  return verdict(bad == 0 && checked == 800 && secs < kC1BudgetS, d);
}

// 2. binom(sqrt 13, 50) to 1000 bits.
Outcome c2() {
  const Real ref = bench::build_bincoeff(50);
  const oracle::Enclosure e = oracle::enclose_to(*ref.node(), kC2Q, 4000);
  const auto t0 = Clock::now();
  const Real x = bench::build_bincoeff(50);
  const Approximation a = x.guarantee_absolute_error_two_to(kC2Q);
  const double secs = seconds_since(t0);
  const bool ok = oracle::within(a.value, e, kC2Q);
  return verdict(ok && secs < kC2BudgetS,
                 std::string(ok ? "matches" : "differs from") + " the 4000-bit enclosure, " +
                     fmt("%.3f s", secs) + ", value ~ " + fmt("%.17g", a.value.to_double()));
}

// 3. Node arithmetic of one Add incorporation.
Outcome c3() {
  const fixtures::IncorporateCounts c = fixtures::add_incorporation_counts();
  std::ostringstream d;
  d << "nontrivial C,D: +" << c.net_mul << " mul +" << c.net_add << " add; trivial: +"
    << c.trivial_created_mul << " mul";
  return verdict(c.net_mul == 2 && c.net_add == 1 && c.trivial_created_mul == 0, d.str());
}

// 4. Depth after AMB on products and MTR on sums.
Outcome c4() {
  bool ok = true;
  std::ostringstream d;
  for (unsigned k = 1; k <= 12; ++k) {
    const Real p = fixtures::chain(OpKind::mul, 1u << k, 1.0);
    const std::size_t before = count_nodes(*p.node());
    restructure(*p.node(), Strategy::amb());
    const std::size_t depth = operator_tree_depth(operator_tree_at(*p.node()));
    if (depth != k || count_nodes(*p.node()) != before) {
      ok = false;
      d << "amb k=" << k << " depth " << depth << "; ";
    }
  }
  d << "amb depth = k for k=1..12;";
  for (unsigned n : {64u, 256u, 1024u}) {
    const Real s = fixtures::chain(OpKind::add, n, 1.0);
    restructure(*s.node(), Strategy::mtr());
    const std::size_t depth = dag_depth(*s.node());
    const double bound = 2 * std::log2(n) + kC4Slack;
    ok = ok && static_cast<double>(depth) <= bound;
    d << " mtr n=" << n << " depth " << depth << " <= " << bound;
  }
  return verdict(ok, d.str());
}

// 5. Threshold split, counter reset, and MTR_K(huge) == MTR.
Outcome c5() {
  bool ok = true;
  std::ostringstream d;
  std::string splits;
  for (unsigned m = 0; m <= 10; ++m) {
    const fixtures::DivChain ch = fixtures::div_add_chain({m}, 40);
    const OperatorTree t = operator_tree_at(*ch.value.node());
    const PhiMap phi = count_operands(t);
    const bool split = raise(*t.root, phi, kC5Threshold).split == ch.divs[0];
    splits += split ? 'S' : '.';
    ok = ok && split == (m > kC5Threshold);
  }
  d << "inner split for m=0..10: " << splits;
  {
    // Two groups of 3 under a Div each: counter resets, no early split.
    const fixtures::DivChain ch = fixtures::div_add_chain({3, 3}, 60);
    const OperatorTree t = operator_tree_at(*ch.value.node());
    const PhiMap phi = count_operands(t);
    const RaiseResult r = raise(*t.root, phi, kC5Threshold);
    const bool reset = r.split != ch.divs[0] && r.split != ch.divs[1] &&
                       std::find(r.path.begin(), r.path.end(), ch.divs[0]) != r.path.end();
    ok = ok && reset;
    d << "; reset " << (reset ? "ok" : "broken");
  }
  std::mt19937_64 rng(505);
  int same = 0;
  for (int round = 0; round < 50; ++round) {
    const std::uint64_t seed = rng();
    std::mt19937_64 a(seed);
    std::mt19937_64 b(seed);
    const Real x = fixtures::random_operator_tree(a, 5 + seed % 300, false);
    const Real y = fixtures::random_operator_tree(b, 5 + seed % 300, false);
    restructure(*x.node(), Strategy::mtr());
    restructure(*y.node(), Strategy::mtr_k(kC5Huge));
    same += dump_dag(*x.node()) == dump_dag(*y.node());
  }
  ok = ok && same == 50;
  d << "; mtr-k(1e9) == mtr on " << same << "/50 trees";
  return verdict(ok, d.str());
}

// 6. Determinism across worker counts, and speedup.
std::vector<Outcome> c6(Timings& timings) {
  const auto t0 = Clock::now();
  bool same = true;
  std::ostringstream d;
  for (const Strategy s : {Strategy::amb(), Strategy::mtr()}) {
    std::optional<BigFloat> first;
    for (unsigned w : {1u, 2u, 4u, 8u}) {
      EvalConfig cfg;
      cfg.strategy = s;
      cfg.threads = w;
      Evaluator ev(cfg);
      const Real x = bench::build_bincoeff(10000);
      const Approximation a = ev.guarantee_absolute_error_two_to(x, -50000);
      if (!first) {
        first = a.value;
      } else {
        same = same && a.value == *first;
      }
    }
  }
  // Random dags with sharing, executed directly on pools of each size.
  std::mt19937_64 rng(606);
  for (int round = 0; round < 30 && same; ++round) {
    const std::uint64_t seed = rng();
    std::optional<BigFloat> first;
    for (unsigned w : {1u, 2u, 4u, 8u}) {
      std::mt19937_64 g(seed);
      const Real x = oracle::random_dag(g, 300, 0.3, true);
      Evaluator ev;
      ev.prepare(*x.node());
      const EvalPlan plan = assign_targets(*x.node(), ErrorExp(-400));
      const Approximation a = execute_parallel(plan, PoolConfig{w});
      if (!first) {
        first = a.value;
      } else {
        same = same && a.value == *first;
      }
    }
  }
  d << (same ? "bit-identical" : "DIFFERENT") << " for workers 1,2,4,8 (bincoeff amb/mtr, 30 dags)";
  std::vector<Outcome> out;
  out.push_back(verdict(same, d.str()));

  double best = 0.0;
  std::ostringstream sd;
  for (const Strategy s : {Strategy::amb(), Strategy::mtr()}) {
    const double t1 = timings.ms(Experiment::bincoeff, 10000, s, {}, std::nullopt, 1);
    const double t4 = timings.ms(Experiment::bincoeff, 10000, s, {}, std::nullopt, 4);
    best = std::max(best, t1 / t4);
    sd << s.name() << " " << fmt("%.0f", t1) << "/" << fmt("%.0f", t4) << " ms = "
       << fmt("%.2fx", t1 / t4) << "; ";
  }
  const double secs = seconds_since(t0);
  sd << fmt("%.0f s total", secs);
  if (!timing_gates()) {
    // Speedup is undefined without parallel hardware.
    out.push_back({Status::na,
                   sd.str() + " (needs >= 4 hardware threads, host has " +
                       std::to_string(hw_threads()) + ")",
                   false});
  } else {
    out.push_back(verdict(best >= kC6MinSpeedup && secs < kC6BudgetS, sd.str()));
  }
  return out;
}

// 7. Ordering of strategies on the random-operation benchmark.
std::vector<Outcome> c7(Timings& timings) {
  const bool gate = timing_gates();
  std::vector<Outcome> out;
  {
    const double def = timings.ms(Experiment::randops, 20000, Strategy::none());
    const double mtr = timings.ms(Experiment::randops, 20000, Strategy::mtr());
    const double mk = timings.ms(Experiment::randops, 20000, Strategy::mtr_k(5));
    out.push_back(verdict(mk < mtr && mtr < def,
                          "uniform: mtr-k(5) " + fmt("%.0f", mk) + " < mtr " + fmt("%.0f", mtr) +
                              " < def " + fmt("%.0f ms", def),
                          gate));
  }
  {
    const Weights w{1, 1, 1, 27};
    const auto pol = SeparationPolicy::assume_nonzero;
    const double def = timings.ms(Experiment::randops, 20000, Strategy::none(), w, pol);
    const double mtr = timings.ms(Experiment::randops, 20000, Strategy::mtr(), w, pol);
    out.push_back(verdict(kC7FdivRatio * mtr <= def,
                          "fdiv (1,1,1,27): def/mtr = " + fmt("%.0f", def) + "/" +
                              fmt("%.0f", mtr) + " = " + fmt("%.2f", def / mtr) + " >= 2",
                          gate));
  }
  {
    const Weights w{3, 3, 3, 1};
    const double mtr = timings.ms(Experiment::randops, 20000, Strategy::mtr(), w);
    const double mk = timings.ms(Experiment::randops, 20000, Strategy::mtr_k(5), w);
    out.push_back(verdict(mk < mtr,
                          "(3,3,3,1): mtr-k(5) " + fmt("%.0f", mk) + " < mtr " + fmt("%.0f ms", mtr),
                          gate));
  }
  return out;
}

// 8. Threshold sweep.
Outcome c8(Timings& timings) {
  std::vector<double> t;
  for (std::uint64_t k = 0; k <= 15; ++k) {
    t.push_back(timings.ms(Experiment::randops, 20000, Strategy::mtr_k(k)));
  }
  const double mtr = timings.ms(Experiment::randops, 20000, Strategy::mtr());
  const auto argmin = static_cast<std::uint64_t>(std::min_element(t.begin(), t.end()) - t.begin());
  const double rel = std::abs(t[15] - mtr) / mtr;
  std::ostringstream d;
  d << "argmin k=" << argmin << " (" << fmt("%.0f ms", t[argmin]) << "), k=15 "
    << fmt("%.0f", t[15]) << " vs mtr " << fmt("%.0f ms", mtr) << " (" << fmt("%.1f%%", 100 * rel)
    << ")";
  return verdict(argmin >= kC8MinK && argmin <= kC8MaxK && rel <= kC8Closeness, d.str(),
                 timing_gates());
}

// 9. Zero decisions, random signs, filter share.
Outcome c9() {
  const Real s2 = sqrt(Real(2));
  const Real s3 = sqrt(Real(3));
  const Real s5 = sqrt(Real(5));
  const Real s6 = sqrt(Real(6));
  const Real s7 = sqrt(Real(7));
  const std::vector<std::function<Real()>> zeros = {
      [&] { return s2 * s2 - Real(2); },
      [&] { return s3 * s3 - Real(3); },
      [&] { return s2 * s3 - s6; },
      [&] { return (s2 + s3) * (s2 + s3) - (Real(5) + Real(2) * s6); },
      [&] { return sqrt(Real(8)) - Real(2) * s2; },
      [&] { return sqrt(Real(3) + Real(2) * s2) - (Real(1) + s2); },
      [&] { const Real c = root(Real(2), 3); return c * c * c - Real(2); },
      [&] { return root(Real(-8), 3) + Real(2); },
      [&] { return (s5 - Real(1)) * (s5 + Real(1)) - Real(4); },
      [&] { return sqrt(Real(12)) - Real(2) * s3; },
      [&] { return Real(1) / (s2 - Real(1)) - (s2 + Real(1)); },
      [&] { return sqrt(Real(0.25)) - Real(0.5); },
      [&] { return s2 * s2 * s2 * s2 - Real(4); },
      [&] { return sqrt(sqrt(Real(16))) - Real(2); },
      [&] { return (s7 + s3) * (s7 - s3) - Real(4); },
      [&] { const Real r = sqrt(Real(1) / Real(3)); return r * r - Real(1) / Real(3); },
      [&] { return root(Real(32), 5) - Real(2); },
      [&] { return s2 * sqrt(Real(8)) - Real(4); },
      [&] { const Real a = Real(1) + s2; return a * a * a - (Real(7) + Real(5) * s2); },
      [&] { return sqrt(Real(5) + Real(2) * s6) - s2 - s3; },
  };
  int zero_ok = 0;
  for (const auto& z : zeros) {
    try {
      zero_ok += decide_sign(z(), SeparationPolicy::bfmss) == 0;
    } catch (const EvalError&) {
    }
  }

  std::mt19937_64 rng(909);
  int nonzero = 0;
  int sign_ok = 0;
  int large = 0;
  int filtered = 0;
  for (int guard = 0; nonzero < 10000 && guard < 100000; ++guard) {
    const Real x = oracle::random_dag(rng, 8, 0.3, guard % 2 == 1);
    const int want = oracle_sign(*x.node());
    if (want == 0) continue;
    Evaluator ev;
    int got = 0;
    try {
      got = ev.decide_sign(x);
    } catch (const EvalError&) {
      continue;  // a divisor that happens to vanish
    }
    ++nonzero;
    sign_ok += got == want;
    const oracle::Enclosure e = oracle::enclose(*x.node(), 256);
    const double lo = std::abs(mpfr_get_d(e.lo, MPFR_RNDN));
    const double hi = std::abs(mpfr_get_d(e.hi, MPFR_RNDN));
    if (e.sign() != 0 && std::min(lo, hi) > kC9Magnitude) {
      ++large;
      filtered += ev.stats().ops.total() == 0;
    }
  }
  const double share = large ? static_cast<double>(filtered) / large : 0.0;
  std::ostringstream d;
  d << zero_ok << "/20 zeros, " << sign_ok << "/" << nonzero << " signs, filter alone "
    << filtered << "/" << large << " = " << fmt("%.1f%%", 100 * share);
  return verdict(zero_ok == 20 && nonzero == 10000 && sign_ok == nonzero &&
                     share >= kC9FilterShare,
                 d.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::vector<int> only;
  unsigned repeat = 3;
  app.add_option("--only", only, "Criteria to run (default: all)")
      ->delimiter(',')
      ->check(CLI::Range(1, 9));
  app.add_option("--repeat", repeat, "Repeats per timed configuration")
      ->check(CLI::Range(1u, 1000u));
  CLI11_PARSE(app, argc, argv);

  const std::set<int> pick(only.begin(), only.end());
  auto want = [&pick](int c) { return pick.empty() || pick.count(c) != 0; };
  Timings timings(repeat);
  bool failed = false;

  auto print = [&failed](const std::string& label, const Outcome& o) {
    const char* s = o.status == Status::pass ? "PASS" : o.status == Status::fail ? "FAIL" : "N/A";
    std::string note;
    if (!o.gating && o.status == Status::fail) {
      note = " [not gating: " + std::to_string(hw_threads()) + " hardware threads]";
    }
    std::printf("criterion %-4s %-4s %s%s\n", label.c_str(), s, o.detail.c_str(), note.c_str());
    std::fflush(stdout);
    if (o.status == Status::fail && o.gating) failed = true;
  };
  auto guarded = [&](const std::string& label, auto f) {
    try {
      print(label, f());
    } catch (const std::exception& e) {
      print(label, {Status::fail, std::string("exception: ") + e.what(), true});
    }
  };

  if (want(1)) guarded("1", c1);
  if (want(2)) guarded("2", c2);
  if (want(3)) guarded("3", c3);
  if (want(4)) guarded("4", c4);
  if (want(5)) guarded("5", c5);
  if (want(6)) {
    try {
      const auto r = c6(timings);
      print("6a", r[0]);
      print("6b", r[1]);
    } catch (const std::exception& e) {
      print("6", {Status::fail, std::string("exception: ") + e.what(), true});
    }
  }
  if (want(7)) {
    try {
      const auto r = c7(timings);
      print("7a", r[0]);
      print("7b", r[1]);
      print("7c", r[2]);
    } catch (const std::exception& e) {
      print("7", {Status::fail, std::string("exception: ") + e.what(), true});
    }
  }
  if (want(8)) guarded("8", [&] { return c8(timings); });
  if (want(9)) guarded("9", c9);
  return failed ? 1 : 0;
}
