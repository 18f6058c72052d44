#pragma once

#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace mixstab {

/// Worker count resolution: MIXSTAB_THREADS environment variable first, then
/// the caller's request (0 = auto), then hardware concurrency. Thread count
/// affects wall time only; outputs are assembled by index and stay identical.
inline unsigned resolve_thread_count(unsigned requested = 0) {
  if (const char* env = std::getenv("MIXSTAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1)
      throw std::invalid_argument("MIXSTAB_THREADS must be a positive integer, got \"" +
                                  std::string(env) + "\"");
    return static_cast<unsigned>(v);
  }
  if (requested >= 1) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw >= 1 ? hw : 1;
}

/// Runs f(i) for i in [0, count) on the given number of threads with a strided
/// schedule. f must only touch state owned by index i (write results[i]);
/// under that contract the outcome is independent of the thread count. The
/// first exception thrown by any worker is rethrown in the caller.
template <typename F>
void parallel_for_index(std::size_t count, unsigned threads, F&& f) {
  if (count == 0) return;
  const unsigned n = threads >= 1 ? threads : 1;
  if (n == 1 || count == 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  pool.reserve(n);
  for (unsigned t = 0; t < n; ++t) {
    pool.emplace_back([&, t]() {
      try {
        for (std::size_t i = t; i < count; i += n) f(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace mixstab
