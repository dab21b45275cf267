#pragma once

#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace hessflow::detail {

/// Fixed set of workers that split an index range per call and join before
/// returning. Chunk boundaries depend only on (count, size()), so per-index
/// work is independent of scheduling.
class WorkerPool {
 public:
  using Task = std::function<void(std::size_t begin, std::size_t end)>;

  explicit WorkerPool(unsigned threads);
  ~WorkerPool();

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  unsigned size() const noexcept { return static_cast<unsigned>(workers_.size()) + 1; }

  /// Runs task over [0, count). Rethrows the first exception raised by any chunk.
  void run(std::size_t count, const Task& task);

 private:
  void worker_loop(unsigned id);

  std::vector<std::thread> workers_;
  std::mutex mutex_;
  std::condition_variable start_cv_;
  std::condition_variable done_cv_;
  const Task* task_ = nullptr;
  std::size_t count_ = 0;
  std::size_t generation_ = 0;
  unsigned pending_ = 0;
  bool stop_ = false;
  std::exception_ptr error_;
};

/// Resolves a requested thread count: 0 means hardware concurrency.
unsigned resolve_threads(unsigned requested);

}  // namespace hessflow::detail
