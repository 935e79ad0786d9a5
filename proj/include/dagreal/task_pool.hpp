#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <thread>
#include <vector>

#include "dagreal/plan.hpp"

namespace dagreal {

struct PoolConfig {
  unsigned workers = 4;
};

struct ScheduleStats {
  std::uint64_t ready_peak = 0;
  std::uint64_t tasks_executed = 0;
  OpCounts ops;
  double execute_ms = 0.0;

  ScheduleStats& operator+=(const ScheduleStats& o);
};

/// Fixed set of worker threads executing plans. One task per dirty node; a
/// task becomes ready when all its dirty children are done. The calling
/// thread blocks while the workers run.
class TaskPool {
 public:
  explicit TaskPool(PoolConfig cfg = {});
  ~TaskPool();

  TaskPool(const TaskPool&) = delete;
  TaskPool& operator=(const TaskPool&) = delete;

  unsigned workers() const noexcept { return static_cast<unsigned>(threads_.size()); }

  /// Executes the plan's dirty nodes. Not reentrant: one plan at a time. On
  /// failure no further tasks start, running ones finish, and the first
  /// error is rethrown.
  Approximation execute(const EvalPlan& plan, ScheduleStats* stats = nullptr);

 private:
  struct Run;
  struct Item {
    Run* run;
    std::uint32_t task;
  };

  void worker_loop();
  void run_task(Run& run, std::uint32_t task);

  std::mutex mu_;
  std::condition_variable work_cv_;
  std::condition_variable done_cv_;
  std::deque<Item> queue_;
  bool stopping_ = false;
  std::vector<std::thread> threads_;
};

/// One-shot helper: runs `plan` on a temporary pool of cfg.workers threads.
Approximation execute_parallel(const EvalPlan& plan, PoolConfig cfg,
                               ScheduleStats* stats = nullptr);

}  // namespace dagreal
