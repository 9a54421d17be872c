#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <variant>
#include <vector>

namespace lpup {

using cplx = std::complex<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi = 3.14159265358979323846;

/// Boundary-layer max relative to interior max above which a sampled
/// function is considered truncated.
inline constexpr double kTailTolerance = 1e-8;

/// Uniform periodic box grid [-L, L)^dim with N points per axis.
struct Grid {
  int dim = 1;
  double half_width = 1.0;
  std::size_t points = 64;

  double spacing() const { return 2.0 * half_width / static_cast<double>(points); }
  double cell_volume() const;
  std::size_t size() const;
  double coordinate(std::size_t axis_index) const {
    return -half_width + static_cast<double>(axis_index) * spacing();
  }
  /// Multi-index of a row-major flat index (unused axes are zero).
  std::array<std::size_t, 3> unravel(std::size_t flat) const;
  /// Fills `x` (size dim) with the coordinates of a flat index.
  void point(std::size_t flat, std::span<double> x) const;

  /// Frequency grid of the continuous transform: spacing π/L, half-width Nπ/(2L).
  Grid dual() const;

  /// Throws std::invalid_argument unless dim ∈ {1,2,3}, N a power of two
  /// within the per-dimension limit, and L > 0.
  void validate() const;
};

bool same_grid(const Grid& a, const Grid& b);

/// Complex samples on a Grid, row-major.  Immutable after construction.
class GridFunction {
 public:
  GridFunction(Grid grid, std::vector<cplx> samples);

  static GridFunction zeros(const Grid& grid);
  static GridFunction sample(const Grid& grid,
                             const std::function<cplx(std::span<const double>)>& fn);

  const Grid& grid() const { return grid_; }
  std::span<const cplx> samples() const { return samples_; }
  const cplx& operator[](std::size_t i) const { return samples_[i]; }
  std::size_t size() const { return samples_.size(); }

  /// NaN when any sample is not finite.
  double max_abs() const { return max_abs_; }
  /// Max |sample| on the boundary layer over the interior max.
  double tail_ratio() const { return tail_ratio_; }
  bool truncation_safe(double tolerance = kTailTolerance) const {
    return tail_ratio_ <= tolerance;
  }

  /// Pointwise transform into a new function on the same grid.
  GridFunction map(const std::function<cplx(cplx)>& fn) const;
  GridFunction scaled(cplx factor) const;

  friend GridFunction operator+(const GridFunction& a, const GridFunction& b);
  friend GridFunction operator-(const GridFunction& a, const GridFunction& b);

 private:
  Grid grid_;
  std::vector<cplx> samples_;
  double max_abs_ = 0.0;
  double tail_ratio_ = 0.0;
};

/// ‖|x - center|^weight_power f‖_{L^p}.  An empty center means the origin.
struct NormSpec {
  double p = 2.0;
  double weight_power = 0.0;
  std::vector<double> center;
};

struct FullSpace {};
struct BallComplement {
  std::vector<double> center;
  double radius = 1.0;
};
/// Slabs orthogonal to `axis`: x ∈ Ω iff frac((x_axis - offset)/period) < fill_fraction.
struct PeriodicSlabs {
  double period = 1.0;
  double fill_fraction = 0.5;
  double offset = 0.0;
  int axis = 0;
};
struct ExplicitMask {
  std::vector<std::uint8_t> mask;
};

using IndicatorSet = std::variant<FullSpace, BallComplement, PeriodicSlabs, ExplicitMask>;

/// Throws std::invalid_argument if Ω is incompatible with the grid.
void validate_indicator(const IndicatorSet& omega, const Grid& grid);
/// Membership of the grid point with flat index `flat`.
bool contains(const IndicatorSet& omega, const Grid& grid, std::size_t flat);
/// 0/1 mask of Ω over the grid.
std::vector<std::uint8_t> indicator_mask(const IndicatorSet& omega, const Grid& grid);

}  // namespace lpup
