#include "lpup/oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace lpup {

namespace {

const cplx I(0.0, 1.0);

// (sqrt(z))^dim on the principal branch; valid while Re z > 0.
cplx principal_power(cplx z, int dim) {
  cplx root = std::sqrt(z);
  cplx r = 1.0;
  for (int d = 0; d < dim; ++d) r *= root;
  return r;
}

std::vector<double> padded(const std::vector<double>& v, int dim) {
  return v.empty() ? std::vector<double>(dim, 0.0) : v;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

void GaussianPacket::validate() const {
  if (dim < 1 || dim > 3) throw std::invalid_argument("packet dimension must be 1, 2 or 3");
  if (!(width.real() > 0)) throw std::invalid_argument("packet width must have Re α > 0");
  if (!center.empty() && center.size() != static_cast<std::size_t>(dim))
    throw std::invalid_argument("packet center dimension mismatch");
  if (!modulation.empty() && modulation.size() != static_cast<std::size_t>(dim))
    throw std::invalid_argument("packet modulation dimension mismatch");
}

cplx GaussianPacket::operator()(std::span<const double> x) const {
  double r2 = 0.0, phase = 0.0;
  for (int d = 0; d < dim; ++d) {
    double dx = x[d] - center_coord(d);
    r2 += dx * dx;
    phase += modulation_coord(d) * x[d];
  }
  return amplitude * std::exp(I * phase - width * r2);
}

GridFunction GaussianPacket::sample(const Grid& grid) const {
  validate();
  if (grid.dim != dim) throw std::invalid_argument("grid and packet dimensions differ");
  return GridFunction::sample(grid, [this](std::span<const double> x) { return (*this)(x); });
}

GaussianPacket dilate(const GaussianPacket& g, double lambda) {
  g.validate();
  if (!(lambda > 0)) throw std::invalid_argument("dilation factor must be positive");
  GaussianPacket out = g;
  out.width = g.width * lambda * lambda;
  for (auto& c : out.center) c /= lambda;
  for (auto& m : out.modulation) m *= lambda;
  return out;
}

GaussianPacket gaussian_fourier(const GaussianPacket& g) {
  g.validate();
  auto x0 = padded(g.center, g.dim);
  auto xi0 = padded(g.modulation, g.dim);
  GaussianPacket out;
  out.dim = g.dim;
  out.width = 1.0 / (4.0 * g.width);
  out.amplitude = g.amplitude * principal_power(kPi / g.width, g.dim) * std::exp(I * dot(xi0, x0));
  out.center = xi0;
  out.modulation = x0;
  for (auto& m : out.modulation) m = -m;
  return out;
}

double gaussian_lp(const GaussianPacket& g, double p) {
  g.validate();
  if (!(p > 0)) throw std::invalid_argument("norm exponent must be positive");
  double c = std::abs(g.amplitude);
  if (std::isinf(p)) return c;
  return c * std::pow(kPi / (p * g.width.real()), g.dim / (2.0 * p));
}

double gaussian_moment(const GaussianPacket& g, double b, double a) {
  g.validate();
  if (!(a > 0) || !(b >= 0)) throw std::invalid_argument("moment needs a > 0 and b >= 0");
  double c = std::abs(g.amplitude);
  double w = g.width.real();
  if (std::isinf(a)) {
    if (b == 0.0) return c;
    return c * std::pow(b / (2.0 * w * std::exp(1.0)), b / 2.0);
  }
  double s = (a * b + g.dim) / 2.0;
  double log_integral = std::log(unit_sphere_area(g.dim)) + std::lgamma(s) - std::log(2.0) -
                        s * std::log(a * w);
  return c * std::exp(log_integral / a);
}

GaussianPacket gaussian_schrodinger(const GaussianPacket& g, double t) {
  g.validate();
  auto xi0 = padded(g.modulation, g.dim);
  cplx beta = 1.0 / (4.0 * g.width) + I * t;
  GaussianPacket out = g;
  out.width = g.width / (1.0 + 4.0 * I * g.width * t);
  out.amplitude = g.amplitude *
                  principal_power(kPi / g.width, g.dim) * principal_power(kPi / beta, g.dim) /
                  std::pow(2.0 * kPi, g.dim) * std::exp(-I * t * dot(xi0, xi0));
  out.center = padded(g.center, g.dim);
  for (int d = 0; d < g.dim; ++d) out.center[d] += 2.0 * t * xi0[d];
  return out;
}

GaussianPacket gaussian_heat(const GaussianPacket& g, double t) {
  g.validate();
  if (t < 0) throw std::invalid_argument("heat flow requires t >= 0");
  for (double m : g.modulation)
    if (m != 0.0) throw std::invalid_argument("heat oracle requires an unmodulated packet");
  cplx beta = 1.0 / (4.0 * g.width) + t;
  GaussianPacket out = g;
  out.width = g.width / (1.0 + 4.0 * g.width * t);
  out.amplitude = g.amplitude * principal_power(kPi / g.width, g.dim) *
                  principal_power(kPi / beta, g.dim) / std::pow(2.0 * kPi, g.dim);
  return out;
}

double gaussian_moment_growth_exponent(double a, double b, int dim) {
  double inv_a = std::isinf(a) ? 0.0 : 1.0 / a;
  return dim * (inv_a + b / dim - 0.5);
}

double unit_sphere_area(int dim) { return 2.0 * std::pow(kPi, dim / 2.0) / std::tgamma(dim / 2.0); }

double unit_ball_volume(int dim) { return std::pow(kPi, dim / 2.0) / std::tgamma(dim / 2.0 + 1.0); }

}  // namespace lpup
