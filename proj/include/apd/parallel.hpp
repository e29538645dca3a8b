#pragma once

// Static-partition parallel loop. Work items write disjoint outputs, so
// results never depend on the worker count.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace apd {

namespace detail {
inline std::atomic<unsigned>& thread_override() {
  static std::atomic<unsigned> value{0};
  return value;
}
}  // namespace detail

/// Worker count: explicit override, else APD_THREADS, else all cores.
inline unsigned worker_count() {
  if (unsigned t = detail::thread_override().load()) return t;
  if (const char* env = std::getenv("APD_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

inline void set_worker_count(unsigned threads) { detail::thread_override().store(threads); }

template <class Fn>
void parallel_for(std::size_t begin, std::size_t end, Fn&& fn, unsigned threads = worker_count()) {
  if (end <= begin) return;
  const std::size_t total = end - begin;
  threads = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), total));
  if (threads == 1) {
    for (std::size_t i = begin; i < end; ++i) fn(i);
    return;
  }
  // Interleaved blocks balance the cost when per-item work varies.
  constexpr std::size_t kBlock = 64;
  std::atomic<std::size_t> next{begin};
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (;;) {
          const std::size_t lo = next.fetch_add(kBlock);
          if (lo >= end) break;
          const std::size_t hi = std::min(end, lo + kBlock);
          for (std::size_t i = lo; i < hi; ++i) fn(i);
        }
      } catch (...) {
        errors[w] = std::current_exception();
        next.store(end);
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace apd
