#ifndef SSMT_PARALLEL_HPP
#define SSMT_PARALLEL_HPP

#include <cstddef>
#include <exception>
#include <mutex>
#include <string_view>

namespace ssmt {

/// Every data-parallel kernel in the library has a plain serial loop and an
/// OpenMP loop over the same per-item body. The serial path is the reference
/// the parallel one is tested against; both produce bit-identical results.
enum class Backend { serial, openmp };

Backend parse_backend(std::string_view name);
std::string_view to_string(Backend backend);

/// Number of OpenMP threads the parallel backend would use (1 without OpenMP).
int max_threads();

namespace detail {

/// Runs body(i) for i in [0, n). Exceptions thrown inside the parallel region
/// are captured and the first one is rethrown after the loop.
template <class Body>
void for_each_index(std::size_t n, Backend backend, Body&& body) {
  if (backend == Backend::serial) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace detail
}  // namespace ssmt

#endif  // SSMT_PARALLEL_HPP
