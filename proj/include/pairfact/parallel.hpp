#ifndef PAIRFACT_PARALLEL_HPP
#define PAIRFACT_PARALLEL_HPP

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace pairfact {

// Runs fn(0..n-1) on up to `jobs` workers (0 = hardware concurrency). Tasks
// must be independent; results belong in caller-owned slots indexed by task,
// which keeps outputs identical for any worker count.
inline void parallel_for(std::size_t n, unsigned jobs,
                         const std::function<void(std::size_t)>& fn) {
  if (jobs == 0) jobs = std::thread::hardware_concurrency();
  if (jobs == 0) jobs = 1;
  if (n < 2 || jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  if (static_cast<std::size_t>(jobs) > n) jobs = static_cast<unsigned>(n);

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(jobs);
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (unsigned w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w]() {
      try {
        for (;;) {
          std::size_t i = next.fetch_add(1);
          if (i >= n) return;
          fn(i);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace pairfact

#endif  // PAIRFACT_PARALLEL_HPP
