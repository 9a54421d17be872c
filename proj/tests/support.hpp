#pragma once

#include "lpup/grid.hpp"
#include "lpup/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace testing {

using namespace lpup;

inline double rel_sup_error(const GridFunction& numeric, const GaussianPacket& exact) {
  GridFunction ref = exact.sample(numeric.grid());
  double err = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) err = std::max(err, std::abs(numeric[i] - ref[i]));
  return err / ref.max_abs();
}

inline double rel_l2_distance(const GridFunction& a, const GridFunction& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

inline GaussianPacket packet(int dim, cplx alpha, cplx amp = 1.0, std::vector<double> x0 = {},
                             std::vector<double> xi0 = {}) {
  GaussianPacket g;
  g.dim = dim;
  g.width = alpha;
  g.amplitude = amp;
  g.center = std::move(x0);
  g.modulation = std::move(xi0);
  return g;
}

// Sum of up to five random Gaussians, independent of the library corpus.
inline GridFunction random_bumps(const Grid& grid, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(1, 5);
  std::uniform_real_distribution<double> width(0.5, 2.0), pos(-grid.half_width / 4, grid.half_width / 4),
      amp(-1.0, 1.0);
  std::vector<GaussianPacket> parts(count(rng));
  for (auto& g : parts) {
    std::vector<double> c(grid.dim);
    for (auto& v : c) v = pos(rng);
    g = packet(grid.dim, width(rng), cplx(amp(rng), amp(rng)), c);
  }
  return GridFunction::sample(grid, [&](std::span<const double> x) {
    cplx s = 0.0;
    for (const auto& g : parts) s += g(x);
    return s;
  });
}

}  // namespace testing
