// SPDX-License-Identifier: MIT
//
// Small shared utilities: locale-independent number formatting and a
// deterministic thread-pool-free parallel loop.

#ifndef PLASTLAB_UTIL_HPP
#define PLASTLAB_UTIL_HPP

#include <charconv>
#include <cstddef>
#include <exception>
#include <functional>
#include <stdexcept>
#include <string>
#include <system_error>
#include <thread>
#include <vector>

namespace plastlab {

// Formats a double with 17 significant digits using to_chars, which is
// locale-independent ('.' decimal separator) and round-trip exact.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v,
                           std::chars_format::general, 17);
  if (res.ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, res.ptr);
}

// Runs fn(i) for i in [0, n).  With jobs > 1, indices are distributed over
// worker threads round-robin; callers must write results into disjoint
// per-index slots so the outcome is independent of scheduling.  The first
// exception thrown by any task is rethrown on the calling thread.
inline void parallel_for(std::size_t n, int jobs,
                         const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  const std::size_t workers =
      jobs <= 1 ? 1 : std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (std::size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace plastlab

#endif  // PLASTLAB_UTIL_HPP
