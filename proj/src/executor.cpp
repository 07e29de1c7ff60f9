#include "schwarz/executor.hpp"

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace schwarz {

namespace {
thread_local bool inside_loop = false;
}

struct Executor::Impl {
  std::mutex mutex;
  std::condition_variable start;
  std::condition_variable done;
  std::vector<std::thread> workers;

  const std::function<void(std::size_t)>* job = nullptr;
  std::size_t count = 0;
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors;
  std::size_t busy = 0;
  std::uint64_t generation = 0;
  bool stop = false;

  void drain() {
    inside_loop = true;
    for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        (*job)(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
    inside_loop = false;
  }

  void worker_loop() {
    std::uint64_t seen = 0;
    for (;;) {
      {
        std::unique_lock lock(mutex);
        start.wait(lock, [&] { return stop || generation != seen; });
        if (stop) return;
        seen = generation;
      }
      drain();
      {
        std::lock_guard lock(mutex);
        if (--busy == 0) done.notify_one();
      }
    }
  }
};

Executor::Executor(std::size_t threads) : impl_(std::make_unique<Impl>()) {
  const std::size_t extra = threads > 1 ? threads - 1 : 0;
  for (std::size_t t = 0; t < extra; ++t) impl_->workers.emplace_back([this] { impl_->worker_loop(); });
}

Executor::~Executor() {
  {
    std::lock_guard lock(impl_->mutex);
    impl_->stop = true;
  }
  impl_->start.notify_all();
  for (auto& w : impl_->workers) w.join();
}

std::size_t Executor::threads() const { return impl_->workers.size() + 1; }

void Executor::parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  if (impl_->workers.empty() || inside_loop || n == 1) {
    std::exception_ptr first;
    for (std::size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        if (!first) first = std::current_exception();
      }
    }
    if (first) std::rethrow_exception(first);
    return;
  }

  {
    std::lock_guard lock(impl_->mutex);
    impl_->job = &fn;
    impl_->count = n;
    impl_->next.store(0);
    impl_->errors.assign(n, nullptr);
    impl_->busy = impl_->workers.size();
    ++impl_->generation;
  }
  impl_->start.notify_all();
  impl_->drain();
  {
    std::unique_lock lock(impl_->mutex);
    impl_->done.wait(lock, [&] { return impl_->busy == 0; });
    impl_->job = nullptr;
  }
  for (auto& e : impl_->errors)
    if (e) std::rethrow_exception(e);
}

std::size_t threads_from_env(std::size_t fallback) {
  const char* env = std::getenv("SCHWARZ_THREADS");
  if (env == nullptr) return fallback;
  try {
    const long v = std::stol(env);
    return v > 0 ? static_cast<std::size_t>(v) : fallback;
  } catch (...) {
    return fallback;
  }
}

}  // namespace schwarz
