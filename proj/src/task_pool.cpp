#include "dagreal/task_pool.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <memory>
#include <stdexcept>
#include <unordered_map>

namespace dagreal {

ScheduleStats& ScheduleStats::operator+=(const ScheduleStats& o) {
  ready_peak = std::max(ready_peak, o.ready_peak);
  tasks_executed += o.tasks_executed;
  ops += o.ops;
  execute_ms += o.execute_ms;
  return *this;
}

struct TaskPool::Run {
  struct Task {
    Node* node = nullptr;
    ErrorExp target;
    std::atomic<std::uint32_t> remaining{0};
    std::vector<std::uint32_t> parents;  // distinct dirty parents
  };

  explicit Run(std::size_t n) : tasks(n) {}

  std::vector<Task> tasks;
  std::size_t completed = 0;    // guarded by the pool mutex
  std::size_t outstanding = 0;  // queued or running; guarded by the pool mutex
  bool failed = false;          // guarded by the pool mutex
  std::exception_ptr error;
  std::uint64_t ready_peak = 0;
  OpCounts ops;
};

TaskPool::TaskPool(PoolConfig cfg) {
  if (cfg.workers == 0) throw std::invalid_argument("a task pool needs at least one worker");
  threads_.reserve(cfg.workers);
  for (unsigned i = 0; i < cfg.workers; ++i) threads_.emplace_back([this] { worker_loop(); });
}

TaskPool::~TaskPool() {
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
  }
  work_cv_.notify_all();
  for (auto& t : threads_) t.join();
}

void TaskPool::worker_loop() {
  while (true) {
    Item item{};
    {
      std::unique_lock lock(mu_);
      work_cv_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
      if (queue_.empty()) break;
      item = queue_.front();
      queue_.pop_front();
    }
    run_task(*item.run, item.task);
  }
  release_thread_caches();
}

void TaskPool::run_task(Run& run, std::uint32_t index) {
  Run::Task& task = run.tasks[index];
  std::exception_ptr error;
  try {
    compute_node(*task.node, task.target);
  } catch (...) {
    error = std::current_exception();
  }
  std::vector<std::uint32_t> ready;
  if (!error) {
    for (std::uint32_t p : task.parents) {
      if (run.tasks[p].remaining.fetch_sub(1, std::memory_order_acq_rel) == 1) ready.push_back(p);
    }
  }
  bool finished = false;
  std::size_t pushed = 0;
  {
    std::lock_guard lock(mu_);
    --run.outstanding;
    if (error) {
      if (!run.failed) {
        run.failed = true;
        run.error = error;
      }
      // Drop queued work; every queued item belongs to this run.
      run.outstanding -= queue_.size();
      queue_.clear();
    } else {
      ++run.completed;
      run.ops.record(task.node->kind());
      if (!run.failed) {
        for (std::uint32_t p : ready) queue_.push_back({&run, p});
        pushed = ready.size();
        run.outstanding += pushed;
        run.ready_peak = std::max<std::uint64_t>(run.ready_peak, queue_.size());
      }
    }
    finished = run.outstanding == 0;
  }
  // `run` may be gone once the lock is released and outstanding hit zero.
  if (pushed > 0) {
    if (pushed == 1) {
      work_cv_.notify_one();
    } else {
      work_cv_.notify_all();
    }
  }
  if (finished) done_cv_.notify_all();
}

Approximation TaskPool::execute(const EvalPlan& plan, ScheduleStats* stats) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = plan.dirty.size();
  if (n == 0) {
    if (stats != nullptr) *stats = {};
    return *plan.root->approx;
  }
  Run run(n);
  std::unordered_map<const Node*, std::uint32_t> index;
  index.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    run.tasks[i].node = plan.dirty[i];
    run.tasks[i].target = plan.target(plan.dirty[i]);
    index.emplace(plan.dirty[i], static_cast<std::uint32_t>(i));
  }
  // Dependencies: distinct dirty children. Trivial nodes read no children.
  for (std::size_t i = 0; i < n; ++i) {
    Node* node = plan.dirty[i];
    const Node* a = node->arity() > 0 ? node->child(0) : nullptr;
    const Node* b = node->arity() > 1 ? node->child(1) : nullptr;
    for (const Node* c : {a, b == a ? nullptr : b}) {
      if (c == nullptr) continue;
      auto it = index.find(c);
      if (it == index.end()) continue;
      run.tasks[it->second].parents.push_back(static_cast<std::uint32_t>(i));
      run.tasks[i].remaining.fetch_add(1, std::memory_order_relaxed);
    }
  }
  {
    std::lock_guard lock(mu_);
    for (std::size_t i = 0; i < n; ++i) {
      if (run.tasks[i].remaining.load(std::memory_order_relaxed) == 0) {
        queue_.push_back({&run, static_cast<std::uint32_t>(i)});
      }
    }
    run.outstanding = queue_.size();
    run.ready_peak = queue_.size();
  }
  work_cv_.notify_all();
  {
    std::unique_lock lock(mu_);
    done_cv_.wait(lock, [&run] { return run.outstanding == 0; });
  }
  if (run.failed) std::rethrow_exception(run.error);
  if (run.completed != n) throw std::logic_error("task pool finished with unexecuted tasks");
  if (stats != nullptr) {
    stats->ready_peak = run.ready_peak;
    stats->tasks_executed = run.completed;
    stats->ops = run.ops;
    stats->execute_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  return *plan.root->approx;
}

Approximation execute_parallel(const EvalPlan& plan, PoolConfig cfg, ScheduleStats* stats) {
  TaskPool pool(cfg);
  return pool.execute(plan, stats);
}

}  // namespace dagreal
