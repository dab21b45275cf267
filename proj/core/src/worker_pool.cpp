#include "worker_pool.hpp"

#include <algorithm>

namespace hessflow::detail {

namespace {

std::pair<std::size_t, std::size_t> chunk(std::size_t count, unsigned parts, unsigned id) {
  const std::size_t base = count / parts;
  const std::size_t extra = count % parts;
  const std::size_t begin = id * base + std::min<std::size_t>(id, extra);
  return {begin, begin + base + (id < extra ? 1 : 0)};
}

}  // namespace

unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

WorkerPool::WorkerPool(unsigned threads) {
  const unsigned total = std::max(1u, threads);
  for (unsigned id = 1; id < total; ++id) workers_.emplace_back([this, id] { worker_loop(id); });
}

WorkerPool::~WorkerPool() {
  {
    std::lock_guard lock(mutex_);
    stop_ = true;
  }
  start_cv_.notify_all();
  for (auto& w : workers_) w.join();
}

void WorkerPool::run(std::size_t count, const Task& task) {
  if (workers_.empty()) {
    task(0, count);
    return;
  }
  {
    std::lock_guard lock(mutex_);
    task_ = &task;
    count_ = count;
    pending_ = static_cast<unsigned>(workers_.size());
    error_ = nullptr;
    ++generation_;
  }
  start_cv_.notify_all();

  std::exception_ptr local;
  try {
    const auto [b, e] = chunk(count, size(), 0);
    task(b, e);
  } catch (...) {
    local = std::current_exception();
  }

  std::unique_lock lock(mutex_);
  done_cv_.wait(lock, [this] { return pending_ == 0; });
  task_ = nullptr;
  if (local) std::rethrow_exception(local);
  if (error_) std::rethrow_exception(error_);
}

void WorkerPool::worker_loop(unsigned id) {
  std::size_t seen = 0;
  while (true) {
    const Task* task = nullptr;
    std::size_t count = 0;
    {
      std::unique_lock lock(mutex_);
      start_cv_.wait(lock, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
      task = task_;
      count = count_;
    }
    std::exception_ptr err;
    try {
      const auto [b, e] = chunk(count, size(), id);
      (*task)(b, e);
    } catch (...) {
      err = std::current_exception();
    }
    {
      std::lock_guard lock(mutex_);
      if (err && !error_) error_ = err;
      if (--pending_ == 0) done_cv_.notify_one();
    }
  }
}

}  // namespace hessflow::detail
