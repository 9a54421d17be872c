#pragma once

// Index-ordered parallel map over independent jobs.  Results and the
// warnings raised inside jobs are returned in job order, so the output does
// not depend on the thread count.

#include "lpup/diagnostics.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace lpup {

/// Worker cap for parallel_map; 0 means hardware concurrency.
void set_max_threads(unsigned count);
unsigned max_threads();

template <class Result>
std::vector<Result> parallel_map(std::size_t count, const std::function<Result(std::size_t)>& job) {
  std::vector<std::optional<Result>> slots(count);
  std::vector<std::vector<std::string>> notes(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        slots[i].emplace(job(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
      notes[i] = take_warnings();
    }
  };
  unsigned workers = static_cast<unsigned>(std::min<std::size_t>(max_threads(), count));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  std::vector<Result> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    for (auto& n : notes[i]) warn(std::move(n));
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*slots[i]));
  }
  return out;
}

}  // namespace lpup
