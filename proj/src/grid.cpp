#include "lpup/grid.hpp"
#include "lpup/trace.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lpup {

namespace {

constexpr std::size_t kMaxPoints[4] = {0, 4096, 512, 128};

double fractional_part(double x) { return x - std::floor(x); }

}  // namespace

double Grid::cell_volume() const { return std::pow(spacing(), dim); }

std::size_t Grid::size() const {
  std::size_t s = 1;
  for (int d = 0; d < dim; ++d) s *= points;
  return s;
}

std::array<std::size_t, 3> Grid::unravel(std::size_t flat) const {
  std::array<std::size_t, 3> idx{0, 0, 0};
  for (int d = dim - 1; d >= 0; --d) {
    idx[d] = flat % points;
    flat /= points;
  }
  return idx;
}

void Grid::point(std::size_t flat, std::span<double> x) const {
  auto idx = unravel(flat);
  for (int d = 0; d < dim; ++d) x[d] = coordinate(idx[d]);
}

Grid Grid::dual() const {
  return {dim, static_cast<double>(points) * kPi / (2.0 * half_width), points};
}

void Grid::validate() const {
  if (dim < 1 || dim > 3) throw std::invalid_argument("grid dimension must be 1, 2 or 3");
  if (!(half_width > 0) || !std::isfinite(half_width))
    throw std::invalid_argument("grid half-width must be positive");
  if (points < 4 || (points & (points - 1)) != 0)
    throw std::invalid_argument("points per axis must be a power of two >= 4");
  if (points > kMaxPoints[dim])
    throw std::invalid_argument("points per axis " + std::to_string(points) +
                                " exceeds the limit " + std::to_string(kMaxPoints[dim]) +
                                " for dimension " + std::to_string(dim));
}

bool same_grid(const Grid& a, const Grid& b) {
  return a.dim == b.dim && a.points == b.points &&
         std::abs(a.half_width - b.half_width) <= 1e-12 * std::max(a.half_width, b.half_width);
}

GridFunction::GridFunction(Grid grid, std::vector<cplx> samples)
    : grid_(grid), samples_(std::move(samples)) {
  grid_.validate();
  if (samples_.size() != grid_.size())
    throw std::invalid_argument("sample count does not match grid size");
  const std::size_t layer = std::max<std::size_t>(1, grid_.points / 32);
  const std::size_t n = grid_.points;
  auto edge = [&](std::size_t k) { return k < layer || k >= n - layer; };
  double boundary = 0.0, interior = 0.0;
  bool finite = true;
  std::array<std::size_t, 3> idx{0, 0, 0};
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    double m = std::abs(samples_[i]);
    finite = finite && std::isfinite(m);
    max_abs_ = std::max(max_abs_, m);
    bool on_boundary = false;
    for (int d = 0; d < grid_.dim; ++d) on_boundary = on_boundary || edge(idx[d]);
    if (on_boundary)
      boundary = std::max(boundary, m);
    else
      interior = std::max(interior, m);
    for (int d = grid_.dim - 1; d >= 0; --d) {
      if (++idx[d] < n) break;
      idx[d] = 0;
    }
  }
  if (interior > 0)
    tail_ratio_ = boundary / interior;
  else
    tail_ratio_ = boundary > 0 ? kInf : 0.0;
  if (!finite) max_abs_ = tail_ratio_ = std::numeric_limits<double>::quiet_NaN();
}

GridFunction GridFunction::zeros(const Grid& grid) {
  grid.validate();
  return GridFunction(grid, std::vector<cplx>(grid.size()));
}

GridFunction GridFunction::sample(const Grid& grid,
                                  const std::function<cplx(std::span<const double>)>& fn) {
  grid.validate();
  std::vector<cplx> out(grid.size());
  std::array<double, 3> x{};
  for (std::size_t i = 0; i < out.size(); ++i) {
    grid.point(i, x);
    out[i] = fn(std::span<const double>(x.data(), grid.dim));
  }
  return GridFunction(grid, std::move(out));
}

GridFunction GridFunction::map(const std::function<cplx(cplx)>& fn) const {
  std::vector<cplx> out(samples_.size());
  std::transform(samples_.begin(), samples_.end(), out.begin(), fn);
  return GridFunction(grid_, std::move(out));
}

GridFunction GridFunction::scaled(cplx factor) const {
  return map([factor](cplx z) { return factor * z; });
}

namespace {
template <class Op>
GridFunction combine(const GridFunction& a, const GridFunction& b, Op op) {
  if (!same_grid(a.grid(), b.grid())) throw std::invalid_argument("grid mismatch");
  std::vector<cplx> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = op(a[i], b[i]);
  return GridFunction(a.grid(), std::move(out));
}
}  // namespace

GridFunction operator+(const GridFunction& a, const GridFunction& b) {
  return combine(a, b, std::plus<>{});
}

GridFunction operator-(const GridFunction& a, const GridFunction& b) {
  return combine(a, b, std::minus<>{});
}

void validate_indicator(const IndicatorSet& omega, const Grid& grid) {
  if (const auto* ball = std::get_if<BallComplement>(&omega)) {
    if (!ball->center.empty() && ball->center.size() != static_cast<std::size_t>(grid.dim))
      throw std::invalid_argument("ball center dimension mismatch");
    if (!(ball->radius >= 0)) throw std::invalid_argument("ball radius must be >= 0");
  } else if (const auto* slabs = std::get_if<PeriodicSlabs>(&omega)) {
    if (!(slabs->period > 0)) throw std::invalid_argument("slab period must be positive");
    if (!(slabs->fill_fraction > 0 && slabs->fill_fraction <= 1))
      throw std::invalid_argument("slab fill fraction must lie in (0,1]");
    if (slabs->axis < 0 || slabs->axis >= grid.dim)
      throw std::invalid_argument("slab axis out of range");
  } else if (const auto* mask = std::get_if<ExplicitMask>(&omega)) {
    if (mask->mask.size() != grid.size())
      throw std::invalid_argument("mask shape does not match grid");
  }
}

bool contains(const IndicatorSet& omega, const Grid& grid, std::size_t flat) {
  std::array<double, 3> x{};
  grid.point(flat, x);
  return std::visit(
      [&](const auto& set) -> bool {
        using T = std::decay_t<decltype(set)>;
        if constexpr (std::is_same_v<T, FullSpace>) {
          return true;
        } else if constexpr (std::is_same_v<T, BallComplement>) {
          double r2 = 0;
          for (int d = 0; d < grid.dim; ++d) {
            double c = set.center.empty() ? 0.0 : set.center[d];
            r2 += (x[d] - c) * (x[d] - c);
          }
          return r2 > set.radius * set.radius;
        } else if constexpr (std::is_same_v<T, PeriodicSlabs>) {
          return fractional_part((x[set.axis] - set.offset) / set.period) < set.fill_fraction;
        } else {
          return set.mask[flat] != 0;
        }
      },
      omega);
}

std::vector<std::uint8_t> indicator_mask(const IndicatorSet& omega, const Grid& grid) {
  validate_indicator(omega, grid);
  std::vector<std::uint8_t> out(grid.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = contains(omega, grid, i) ? 1 : 0;
  return out;
}

void EvolutionTrace::validate() const {
  if (snapshots.empty()) throw std::invalid_argument("empty trace");
  if (times.size() != snapshots.size())
    throw std::invalid_argument("trace times and snapshots differ in length");
  for (std::size_t i = 1; i < times.size(); ++i) {
    double expected = times.front() + static_cast<double>(i) * dt;
    if (std::abs(times[i] - expected) > 1e-9 * std::max(1.0, std::abs(expected)))
      throw std::invalid_argument("trace time steps are not uniform");
    if (!same_grid(snapshots[i].grid(), snapshots.front().grid()))
      throw std::invalid_argument("trace snapshots live on different grids");
  }
}

}  // namespace lpup
