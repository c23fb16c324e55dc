#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gas {

/// Selects the serial reference loop or the OpenMP loop for a kernel. Both
/// produce bit-identical results: work items own their random streams and
/// write to disjoint outputs, and reductions happen afterwards in index order.
enum class Execution { Serial, Parallel };

inline int worker_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

/// Runs body(i) for i in [0, n). The first exception thrown by any work item
/// is rethrown on the calling thread after the loop.
template <class Body>
void for_each_index(std::size_t n, Execution ex, Body&& body) {
  if (ex == Execution::Serial) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < count; ++i) {
    {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (error) continue;
    }
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace gas
