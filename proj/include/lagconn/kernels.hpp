#pragma once

#include <cstddef>
#include <exception>
#include <vector>

namespace lagconn {

/// Serial is the reference path; Parallel distributes table entries with
/// OpenMP. Both write each entry to its own slot, so results are identical.
enum class ExecPolicy { Serial, Parallel };

ExecPolicy default_policy();
void set_default_policy(ExecPolicy policy);
int max_threads();

/// Calls fn(i) for i in [0, n). The first exception by index is rethrown.
template <class Fn>
void for_each_index(std::size_t n, Fn&& fn, ExecPolicy policy = default_policy()) {
  if (policy == ExecPolicy::Serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Fills out[i] = fn(i).
template <class T, class Fn>
std::vector<T> fill_table(std::size_t n, const T& init, Fn&& fn, ExecPolicy policy = default_policy()) {
  std::vector<T> out(n, init);
  for_each_index(n, [&](std::size_t i) { out[i] = fn(i); }, policy);
  return out;
}

}  // namespace lagconn
