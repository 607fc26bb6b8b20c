#include "thetajoin/thread_pool.hpp"

#include <algorithm>
#include <exception>
#include <memory>

#include "thetajoin/errors.hpp"

namespace thetajoin {

ThreadPool::ThreadPool(std::size_t workers) {
  if (workers < 1) throw ParameterError("thread pool needs at least one worker");
  threads_.reserve(workers);
  for (std::size_t i = 0; i < workers; ++i) threads_.emplace_back([this] { loop(); });
}

ThreadPool::~ThreadPool() {
  {
    std::lock_guard lock(mu_);
    stop_ = true;
  }
  cv_.notify_all();
  for (auto& t : threads_) t.join();
}

void ThreadPool::submit(std::function<void()> task) {
  {
    std::lock_guard lock(mu_);
    queue_.push_back(std::move(task));
  }
  cv_.notify_one();
}

void ThreadPool::loop() {
  for (;;) {
    std::function<void()> task;
    {
      std::unique_lock lock(mu_);
      cv_.wait(lock, [this] { return stop_ || !queue_.empty(); });
      if (queue_.empty()) return;
      task = std::move(queue_.front());
      queue_.pop_front();
    }
    const auto now = ++running_;
    auto seen = max_running_.load();
    while (now > seen && !max_running_.compare_exchange_weak(seen, now)) {
    }
    task();
    --running_;
  }
}

void parallel_for(ThreadPool& pool, std::size_t count, std::size_t limit, const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  struct State {
    std::atomic<std::size_t> next{0};
    std::size_t live = 0;
    std::mutex mu;
    std::condition_variable done;
    std::exception_ptr error;
  };
  auto st = std::make_shared<State>();
  const std::size_t runners = std::min({count, std::max<std::size_t>(1, limit), pool.size()});
  st->live = runners;
  for (std::size_t r = 0; r < runners; ++r) {
    pool.submit([st, count, &fn] {
      for (;;) {
        const auto i = st->next.fetch_add(1);
        if (i >= count) break;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(st->mu);
          if (!st->error) st->error = std::current_exception();
          st->next.store(count);
        }
      }
      std::lock_guard lock(st->mu);
      if (--st->live == 0) st->done.notify_all();
    });
  }
  std::unique_lock lock(st->mu);
  st->done.wait(lock, [&] { return st->live == 0; });
  if (st->error) std::rethrow_exception(st->error);
}

}  // namespace thetajoin
