#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace areal {

/// 0 means: AREAL_THREADS if set, otherwise the hardware concurrency.
inline unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("AREAL_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs work(item, state) for every item in [0, items) on up to `threads` workers,
/// each owning a state from make(). Items are handed out dynamically, so callers must
/// only combine the returned states with commutative, associative merges.
template <class State, class Make, class Work>
std::vector<State> parallel_states(std::size_t items, unsigned threads, Make make, Work work) {
  const unsigned workers = static_cast<unsigned>(
      std::max<std::size_t>(1, std::min<std::size_t>(resolve_threads(threads), items)));
  std::vector<State> states;
  states.reserve(workers);
  for (unsigned i = 0; i < workers; ++i) states.push_back(make());
  if (workers == 1) {
    for (std::size_t i = 0; i < items; ++i) work(i, states[0]);
    return states;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = next++; i < items; i = next++) work(i, states[w]);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = items;
        }
      });
  }
  if (failure) std::rethrow_exception(failure);
  return states;
}

}  // namespace areal
