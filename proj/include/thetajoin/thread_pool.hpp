#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace thetajoin {

// Fixed set of workers; at most size() tasks ever run at once.
class ThreadPool {
 public:
  explicit ThreadPool(std::size_t workers);
  ~ThreadPool();
  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  std::size_t size() const { return threads_.size(); }
  void submit(std::function<void()> task);

  // Highest number of tasks observed running at the same moment.
  std::size_t max_concurrency() const { return max_running_.load(); }

 private:
  void loop();

  std::vector<std::thread> threads_;
  std::deque<std::function<void()>> queue_;
  std::mutex mu_;
  std::condition_variable cv_;
  bool stop_ = false;
  std::atomic<std::size_t> running_{0};
  std::atomic<std::size_t> max_running_{0};
};

// Runs fn(0..count-1) on the pool with at most `limit` in flight and waits
// for all of them. Must not be called from a pool worker. The first
// exception thrown by a task is rethrown here.
void parallel_for(ThreadPool& pool, std::size_t count, std::size_t limit, const std::function<void(std::size_t)>& fn);

}  // namespace thetajoin
