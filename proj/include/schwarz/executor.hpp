#pragma once

#include <cstddef>
#include <functional>
#include <memory>

namespace schwarz {

/// Fixed-size worker pool running index-parallel loops. Each index is handled
/// by exactly one thread, so per-index arithmetic is independent of the
/// thread count. Nested calls from inside a running loop execute serially.
class Executor {
 public:
  explicit Executor(std::size_t threads = 1);
  ~Executor();
  Executor(const Executor&) = delete;
  Executor& operator=(const Executor&) = delete;

  [[nodiscard]] std::size_t threads() const;

  /// Runs fn(0) ... fn(n-1). If any call throws, the exception of the lowest
  /// failing index is rethrown after all indices finish.
  void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Thread count from SCHWARZ_THREADS, or `fallback` when unset or invalid.
[[nodiscard]] std::size_t threads_from_env(std::size_t fallback);

}  // namespace schwarz
