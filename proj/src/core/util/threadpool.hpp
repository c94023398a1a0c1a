#pragma once

#include <condition_variable>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace bspinn::util {

/// Fixed-size pool dispatching indexed tasks. Task partitioning is the
/// caller's job; results must not depend on which thread runs which task,
/// so that outputs are identical for any pool size.
class ThreadPool {
 public:
  /// threads == 0 picks hardware concurrency.
  explicit ThreadPool(unsigned threads = 0);
  ~ThreadPool();

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  unsigned size() const { return static_cast<unsigned>(workers_.size()) + 1; }

  /// Runs fn(0), ..., fn(n_tasks-1) across the pool and waits for all of
  /// them. The calling thread participates. Exceptions from tasks are
  /// rethrown (one of them) after the batch completes.
  void run(std::size_t n_tasks, const std::function<void(std::size_t)>& fn);

 private:
  void worker_loop();
  void work_on_batch();

  std::vector<std::thread> workers_;
  std::mutex mutex_;
  std::condition_variable wake_;
  std::condition_variable done_;

  const std::function<void(std::size_t)>* fn_ = nullptr;
  std::size_t n_tasks_ = 0;
  std::size_t next_task_ = 0;
  std::size_t in_flight_ = 0;
  std::uint64_t batch_id_ = 0;
  std::exception_ptr error_;
  bool stop_ = false;
};

}  // namespace bspinn::util
