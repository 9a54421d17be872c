#include "fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace lpup::detail {

namespace {

// The FFTW planner is not thread-safe; plan execution on fresh arrays is.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int dim, std::size_t n, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::make_tuple(dim, n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    int dims[3] = {static_cast<int>(n), static_cast<int>(n), static_cast<int>(n)};
    std::size_t total = 1;
    for (int d = 0; d < dim; ++d) total *= n;
    auto* buffer = fftw_alloc_complex(total);
    fftw_plan plan = fftw_plan_dft(dim, dims, buffer, buffer,
                                   sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_free(buffer);
    if (!plan) throw std::runtime_error("FFTW planning failed");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, std::size_t, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

}  // namespace

void dft_inplace(std::span<cplx> data, int dim, std::size_t n, int sign) {
  fftw_plan plan = cache().get(dim, n, sign);
  auto* buffer = fftw_alloc_complex(data.size());
  std::memcpy(static_cast<void*>(buffer), static_cast<const void*>(data.data()), data.size() * sizeof(cplx));
  fftw_execute_dft(plan, buffer, buffer);
  std::memcpy(static_cast<void*>(data.data()), static_cast<const void*>(buffer), data.size() * sizeof(cplx));
  fftw_free(buffer);
}

}  // namespace lpup::detail
