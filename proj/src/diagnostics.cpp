#include "lpup/diagnostics.hpp"
#include "lpup/parallel.hpp"

#include <utility>

namespace lpup {

namespace {
thread_local std::vector<std::string> pending;
}

void warn(std::string message) { pending.push_back(std::move(message)); }

std::vector<std::string> take_warnings() { return std::exchange(pending, {}); }

}  // namespace lpup

namespace lpup {

namespace {
std::atomic<unsigned> g_max_threads{0};
}

void set_max_threads(unsigned count) { g_max_threads = count; }

unsigned max_threads() {
  unsigned n = g_max_threads.load();
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

}  // namespace lpup
