#include "lpup/field.hpp"

#include "lpup/diagnostics.hpp"
#include "fft.hpp"

#include <boost/math/special_functions/bernoulli.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lpup {

namespace detail {

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kBlock = 64;
  if (values.size() <= kBlock) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  std::size_t half = values.size() / 2;
  return pairwise_sum(values.subspan(0, half)) + pairwise_sum(values.subspan(half));
}

std::vector<double> magnitudes(const GridFunction& f) {
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::abs(f[i]);
  return out;
}

double lp_norm_direct(std::span<const double> magnitudes, double p, double cell_volume) {
  double peak = *std::max_element(magnitudes.begin(), magnitudes.end());
  if (peak == 0.0) return 0.0;
  if (std::isinf(p)) return peak;
  std::vector<double> terms(magnitudes.size());
  for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = std::pow(magnitudes[i] / peak, p);
  return peak * std::pow(pairwise_sum(terms) * cell_volume, 1.0 / p);
}

double lp_norm_log_domain(std::span<const double> magnitudes, double p, double cell_volume) {
  std::vector<double> logs;
  logs.reserve(magnitudes.size());
  for (double m : magnitudes)
    if (m > 0) logs.push_back(p * std::log(m));
  if (logs.empty()) return 0.0;
  double top = *std::max_element(logs.begin(), logs.end());
  for (double& l : logs) l = std::exp(l - top);
  double log_integral = top + std::log(pairwise_sum(logs)) + std::log(cell_volume);
  return std::exp(log_integral / p);
}

double hurwitz_zeta(double z, double q) {
  // Euler-Maclaurin with a shifted tail; valid for any real z ≠ 1.
  constexpr int kShift = 24, kTerms = 10;
  double sum = 0.0;
  for (int k = 0; k < kShift; ++k) sum += std::pow(k + q, -z);
  const double x = kShift + q;
  sum += std::pow(x, 1.0 - z) / (z - 1.0) + 0.5 * std::pow(x, -z);
  double rising = z;  // (z)_{2j-1}
  double factorial = 2.0;
  for (int j = 1; j <= kTerms; ++j) {
    sum += boost::math::bernoulli_b2n<double>(j) / factorial * rising * std::pow(x, -z - 2 * j + 1);
    rising *= (z + 2 * j - 1) * (z + 2 * j);
    factorial *= (2.0 * j + 1) * (2.0 * j + 2);
  }
  return sum;
}

double singular_weight_correction(std::span<const double> values, const Grid& grid, double center,
                                  double s) {
  // Sum minus integral of |x - c|^s g(x) on the uniform grid, to order h^{3+s}
  // (generalised Euler-Maclaurin expansion about the singular point).
  const double h = grid.spacing();
  const double pos = (center - grid.coordinate(0)) / h;
  const auto j0 = static_cast<long>(std::floor(pos));
  constexpr long kStencil = 3;
  if (j0 - kStencil + 1 < 0 || j0 + kStencil >= static_cast<long>(values.size())) return 0.0;
  double theta = static_cast<double>(j0 + 1) - pos;  // distance to the right node, in cells
  double theta_left = pos - static_cast<double>(j0);
  if (theta_left == 0.0) theta_left = 1.0;  // the node at c carries weight 0
  if (theta == 0.0) theta = 1.0;

  // Fornberg weights for g, g', g'' at c from the six nearest nodes.
  constexpr int kNodes = 2 * kStencil;
  double nodes[kNodes];
  for (int k = 0; k < kNodes; ++k) nodes[k] = static_cast<double>(j0 - kStencil + 1 + k) - pos;
  double w[3][kNodes] = {};
  double c1 = 1.0, c4 = nodes[0];
  w[0][0] = 1.0;
  for (int i = 1; i < kNodes; ++i) {
    int mn = std::min(i, 2);
    double c2 = 1.0, c5 = c4;
    c4 = nodes[i];
    for (int j = 0; j < i; ++j) {
      double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) w[k][i] = c1 * (k * w[k - 1][i - 1] - c5 * w[k][i - 1]) / c2;
        w[0][i] = -c1 * c5 * w[0][i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k) w[k][j] = (c4 * w[k][j] - k * w[k - 1][j]) / c3;
      w[0][j] = c4 * w[0][j] / c3;
    }
    c1 = c2;
  }
  double derivs[3] = {0.0, 0.0, 0.0};
  for (int m = 0; m < 3; ++m) {
    for (int k = 0; k < kNodes; ++k) derivs[m] += w[m][k] * values[j0 - kStencil + 1 + k];
    derivs[m] /= std::pow(h, m);
  }
  double err = 0.0, factorial = 1.0;
  for (int m = 0; m < 3; ++m) {
    if (m > 0) factorial *= m;
    double sign = (m % 2 == 0) ? 1.0 : -1.0;
    double zeta = hurwitz_zeta(-s - m, theta) + sign * hurwitz_zeta(-s - m, theta_left);
    err += std::pow(h, 1.0 + s + m) * zeta * derivs[m] / factorial;
  }
  return err;
}

}  // namespace detail

namespace {

void check_exponent(double p) {
  if (!(p > 0)) throw std::invalid_argument("norm exponent must be positive, got " + std::to_string(p));
}

void check_tail(const GridFunction& f, const char* what) {
  if (!f.truncation_safe())
    warn(std::string(what) + ": boundary layer ratio " + std::to_string(f.tail_ratio()) +
         " exceeds truncation tolerance");
}

double norm_of(std::span<const double> mags, double p, double cell_volume) {
  if (mags.empty()) throw std::invalid_argument("empty function");
  if (p < 0.25) return detail::lp_norm_log_domain(mags, p, cell_volume);
  return detail::lp_norm_direct(mags, p, cell_volume);
}

double center_coord(const std::vector<double>& center, int d) {
  return center.empty() ? 0.0 : center[d];
}

// Sign pattern (-1)^{Σ indices} used to centre the DFT on the symmetric box.
void alternate_signs(std::vector<cplx>& data, const Grid& grid) {
  // N is even, so the parity flips with every flat index inside a row and
  // rows start with the parity of their row index sum.
  const std::size_t n = grid.points;
  for (std::size_t row = 0; row < data.size() / n; ++row) {
    std::size_t parity = 0;
    for (std::size_t r = row; r > 0; r /= n) parity += r % n;
    cplx* line = data.data() + row * n;
    for (std::size_t k = parity & 1U; k < n; k += 2) line[k] = -line[k];
  }
}

}  // namespace

double lp_norm(const GridFunction& f, double p) {
  check_exponent(p);
  check_tail(f, "lp_norm");
  auto mags = detail::magnitudes(f);
  return norm_of(mags, p, f.grid().cell_volume());
}

double weighted_norm(const GridFunction& f, const NormSpec& spec) {
  check_exponent(spec.p);
  if (!(spec.weight_power >= 0)) throw std::invalid_argument("weight power must be >= 0");
  const Grid& g = f.grid();
  if (!spec.center.empty() && spec.center.size() != static_cast<std::size_t>(g.dim))
    throw std::invalid_argument("norm center dimension mismatch");
  check_tail(f, "weighted_norm");
  std::vector<double> mags(f.size());
  std::array<double, 3> x{};
  for (std::size_t i = 0; i < mags.size(); ++i) {
    double m = std::abs(f[i]);
    if (spec.weight_power != 0.0) {
      g.point(i, x);
      double r2 = 0;
      for (int d = 0; d < g.dim; ++d) {
        double dx = x[d] - center_coord(spec.center, d);
        r2 += dx * dx;
      }
      m *= std::pow(r2, 0.5 * spec.weight_power);
    }
    mags[i] = m;
  }
  const double s = spec.weight_power * spec.p;
  const bool smooth_weight = s == 0.0 || (std::fmod(s, 2.0) == 0.0);
  if (g.dim != 1 || std::isinf(spec.p) || spec.p < 0.25 || smooth_weight)
    return norm_of(mags, spec.p, g.cell_volume());

  // 1-D: remove the leading error terms of the kink at the center.
  double peak = *std::max_element(mags.begin(), mags.end());
  if (peak == 0.0) return 0.0;
  std::vector<double> terms(mags.size()), plain(f.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    terms[i] = std::pow(mags[i] / peak, spec.p);
    plain[i] = std::pow(std::abs(f[i]) / peak, spec.p);
  }
  double integral = detail::pairwise_sum(terms) * g.spacing() -
                    detail::singular_weight_correction(plain, g, center_coord(spec.center, 0), s);
  return peak * std::pow(std::max(integral, 0.0), 1.0 / spec.p);
}

double h0_ratio(const GridFunction& f, double q) {
  double denom = lp_norm(f, q);
  if (denom == 0.0) throw std::invalid_argument("h0_ratio of the zero function");
  return lp_norm(f, 1.0) / denom;
}

double h1_ratio(const GridFunction& f, double r, double q) {
  double denom = lp_norm(f, q);
  if (denom == 0.0) throw std::invalid_argument("h1_ratio of the zero function");
  return weighted_norm(f, {2.0, r, {}}) / denom;
}

GridFunction fourier(const GridFunction& f) {
  const Grid& g = f.grid();
  check_tail(f, "fourier");
  std::vector<cplx> data(f.samples().begin(), f.samples().end());
  alternate_signs(data, g);
  detail::dft_inplace(data, g.dim, g.points, -1);
  alternate_signs(data, g);
  const double scale = g.cell_volume();
  for (auto& z : data) z *= scale;
  return GridFunction(g.dual(), std::move(data));
}

GridFunction inverse_fourier(const GridFunction& ghat) {
  const Grid& g = ghat.grid();
  std::vector<cplx> data(ghat.samples().begin(), ghat.samples().end());
  alternate_signs(data, g);
  detail::dft_inplace(data, g.dim, g.points, +1);
  alternate_signs(data, g);
  const double scale = std::pow(g.spacing() / (2.0 * kPi), g.dim);
  for (auto& z : data) z *= scale;
  return GridFunction(g.dual(), std::move(data));
}

GridFunction apply_multiplier_values(const GridFunction& f, std::span<const cplx> m) {
  if (m.size() != f.size()) throw std::invalid_argument("multiplier size does not match grid");
  const Grid& g = f.grid();
  std::vector<cplx> data(f.samples().begin(), f.samples().end());
  alternate_signs(data, g);
  detail::dft_inplace(data, g.dim, g.points, -1);
  // The sign pattern commutes with pointwise multiplication, and the forward
  // and inverse scale factors combine to 1/N^dim.
  const double scale = 1.0 / static_cast<double>(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) data[i] *= m[i] * scale;
  detail::dft_inplace(data, g.dim, g.points, +1);
  alternate_signs(data, g);
  return GridFunction(g, std::move(data));
}

std::vector<double> frequency_magnitudes(const Grid& grid) {
  Grid dual = grid.dual();
  std::vector<double> out(dual.size());
  std::array<double, 3> xi{};
  for (std::size_t i = 0; i < out.size(); ++i) {
    dual.point(i, xi);
    double r2 = 0;
    for (int d = 0; d < dual.dim; ++d) r2 += xi[d] * xi[d];
    out[i] = std::sqrt(r2);
  }
  return out;
}

GridFunction apply_multiplier(const GridFunction& f,
                              const std::function<cplx(std::span<const double>)>& m) {
  Grid dual = f.grid().dual();
  std::vector<cplx> values(dual.size());
  std::array<double, 3> xi{};
  for (std::size_t i = 0; i < values.size(); ++i) {
    dual.point(i, xi);
    values[i] = m(std::span<const double>(xi.data(), dual.dim));
  }
  return apply_multiplier_values(f, values);
}

GridFunction apply_radial_multiplier(const GridFunction& f, const std::function<cplx(double)>& m) {
  auto radii = frequency_magnitudes(f.grid());
  std::vector<cplx> values(radii.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = m(radii[i]);
  return apply_multiplier_values(f, values);
}

double lp_bump(double r) {
  if (r <= 1.0) return 1.0;
  if (r >= 1.1) return 0.0;
  double s = (1.1 - r) / 0.1;
  return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

double littlewood_paley_multiplier(double xi_abs, double n_dyadic) {
  return lp_bump(xi_abs / n_dyadic) - lp_bump(2.0 * xi_abs / n_dyadic);
}

bool lp_resolvable(const Grid& grid, double n_dyadic) {
  if (!(n_dyadic > 0)) return false;
  double exponent = std::log2(n_dyadic);
  if (std::abs(exponent - std::round(exponent)) > 1e-12) return false;
  Grid dual = grid.dual();
  return 0.5 * n_dyadic >= 2.0 * dual.spacing() && 1.1 * n_dyadic <= dual.half_width;
}

GridFunction lp_project(const GridFunction& f, double n_dyadic) {
  if (!lp_resolvable(f.grid(), n_dyadic))
    throw std::invalid_argument("dyadic frequency " + std::to_string(n_dyadic) +
                                " is not a resolvable power of two on this grid");
  return apply_radial_multiplier(
      f, [n_dyadic](double r) { return cplx(littlewood_paley_multiplier(r, n_dyadic)); });
}

GridFunction restrict_to(const GridFunction& f, const IndicatorSet& omega) {
  auto mask = indicator_mask(omega, f.grid());
  std::vector<cplx> out(f.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = mask[i] ? f[i] : cplx(0.0);
  return GridFunction(f.grid(), std::move(out));
}

double spacetime_norm(const EvolutionTrace& trace, const NormSpec& spec, const IndicatorSet& omega,
                      TimeWindow window) {
  check_exponent(spec.p);
  trace.validate();
  const Grid& g = trace.grid();
  if (!spec.center.empty() && spec.center.size() != static_cast<std::size_t>(g.dim + 1))
    throw std::invalid_argument("spacetime center must have 1 + dim coordinates");
  if (!(window.end > window.begin)) throw std::invalid_argument("empty time window");
  const double tol = 1e-9 * std::max(1.0, std::abs(window.end));
  if (window.begin < trace.times.front() - tol || window.end > trace.times.back() + tol)
    throw std::invalid_argument("window exceeds trace");
  auto locate = [&](double t) {
    double pos = (t - trace.times.front()) / trace.dt;
    auto i = static_cast<std::size_t>(std::llround(pos));
    if (std::abs(trace.times[i] - t) > tol)
      throw std::invalid_argument("window endpoint does not fall on a trace sample");
    return i;
  };
  const std::size_t first = locate(window.begin), last = locate(window.end);

  auto mask = indicator_mask(omega, g);
  const double t0 = spec.center.empty() ? 0.0 : spec.center[0];
  std::array<double, 3> x{};
  // Weighted magnitudes per time slice.
  std::vector<std::vector<double>> slices;
  double peak = 0.0;
  for (std::size_t s = first; s <= last; ++s) {
    const GridFunction& u = trace.snapshots[s];
    check_tail(u, "spacetime_norm");
    double dt0 = trace.times[s] - t0;
    std::vector<double> mags(u.size(), 0.0);
    for (std::size_t i = 0; i < mags.size(); ++i) {
      if (!mask[i]) continue;
      double m = std::abs(u[i]);
      if (spec.weight_power != 0.0) {
        g.point(i, x);
        double r2 = dt0 * dt0;
        for (int d = 0; d < g.dim; ++d) {
          double dx = x[d] - (spec.center.empty() ? 0.0 : spec.center[d + 1]);
          r2 += dx * dx;
        }
        m *= std::pow(r2, 0.5 * spec.weight_power);
      }
      mags[i] = m;
      peak = std::max(peak, m);
    }
    slices.push_back(std::move(mags));
  }
  if (peak == 0.0 || std::isinf(spec.p)) return peak;

  std::vector<double> slice_integrals(slices.size());
  for (std::size_t s = 0; s < slices.size(); ++s) {
    for (double& m : slices[s]) m = std::pow(m / peak, spec.p);
    double w = (s == 0 || s + 1 == slices.size()) ? 0.5 : 1.0;
    slice_integrals[s] = w * detail::pairwise_sum(slices[s]) * g.cell_volume();
  }
  double integral = detail::pairwise_sum(slice_integrals) * trace.dt;
  return peak * std::pow(integral, 1.0 / spec.p);
}

}  // namespace lpup
