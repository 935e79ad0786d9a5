// Benchmark driver: builds the bincoeff / randops dags, evaluates them under a
// restructuring strategy and thread count, and writes CSV.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>

#include "dagreal/bench.hpp"
#include "dagreal/errors.hpp"

namespace {

constexpr int kExitNumeric = 2;
constexpr int kExitUsage = 64;

}  // namespace

int main(int argc, char** argv) {
  using namespace dagreal;
  using namespace dagreal::bench;

  CLI::App app{"Expression dag evaluation benchmark"};
  BenchConfig cfg;
  std::string experiment;
  std::string strategy = "def";
  std::uint64_t threshold = 5;
  std::string policy;
  std::string csv_path;
  std::optional<std::uint64_t> sweep_to;

  const std::map<std::string, Experiment> experiments{{"bincoeff", Experiment::bincoeff},
                                                      {"randops", Experiment::randops}};
  app.add_option("experiment", experiment, "bincoeff or randops")
      ->required()
      ->check(CLI::IsMember({"bincoeff", "randops"}));
  app.add_option("--n", cfg.n, "dag size parameter")->required();
  app.add_option("--q", cfg.q, "target error exponent")->capture_default_str();
  app.add_option("--strategy", strategy, "def|amb|mtr|mtr-k")
      ->check(CLI::IsMember({"def", "amb", "mtr", "mtr-k"}))
      ->capture_default_str();
  app.add_option("--threshold", threshold, "split threshold for mtr-k")->capture_default_str();
  app.add_option("--threads", cfg.threads, "worker threads, 0 = serial")->capture_default_str();
  app.add_option("--fadd", cfg.weights.add, "weight of +")->capture_default_str();
  app.add_option("--fsub", cfg.weights.sub, "weight of -")->capture_default_str();
  app.add_option("--fmul", cfg.weights.mul, "weight of *")->capture_default_str();
  app.add_option("--fdiv", cfg.weights.div, "weight of /")->capture_default_str();
  app.add_option("--seed", cfg.seed, "PRNG seed")->capture_default_str();
  app.add_option("--repeat", cfg.repeat, "runs per configuration")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--sep-policy", policy, "bfmss|assume-nonzero")
      ->check(CLI::IsMember({"bfmss", "assume-nonzero"}));
  app.add_option("--csv", csv_path, "output file (default stdout)");
  app.add_option("--sweep-to", sweep_to,
                 "with mtr-k: one row per threshold from --threshold to this value");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  cfg.experiment = experiments.at(experiment);
  if (strategy == "def") cfg.strategy = Strategy::none();
  if (strategy == "amb") cfg.strategy = Strategy::amb();
  if (strategy == "mtr") cfg.strategy = Strategy::mtr();
  if (strategy == "mtr-k") cfg.strategy = Strategy::mtr_k(threshold);
  if (!policy.empty()) {
    cfg.sep_policy =
        policy == "bfmss" ? SeparationPolicy::bfmss : SeparationPolicy::assume_nonzero;
  }
  if (sweep_to && (strategy != "mtr-k" || *sweep_to < threshold)) {
    std::cerr << "--sweep-to needs --strategy mtr-k and a value >= --threshold\n";
    return kExitUsage;
  }

  std::vector<BenchRecord> records;
  try {
    cfg.validate();
    const std::uint64_t last = sweep_to.value_or(threshold);
    for (std::uint64_t k = threshold; k <= last; ++k) {
      if (strategy == "mtr-k") cfg.strategy = Strategy::mtr_k(k);
      records.push_back(run(cfg));
      if (strategy != "mtr-k") break;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const EvalError& e) {
    std::cerr << "numeric error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return kExitNumeric;
  }

  const std::string csv = emit_csv(records);
  if (csv_path.empty()) {
    std::cout << csv;
  } else {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) {
      std::cerr << "cannot write " << csv_path << '\n';
      return kExitUsage;
    }
    out << csv;
  }
  return 0;
}
