#pragma once

// Closed-form Gaussian analytics used as ground truth for the numerical
// field and propagator code.  No quadrature happens here.

#include "lpup/grid.hpp"

#include <span>
#include <vector>

namespace lpup {

/// c · e^{iξ_0·x} · e^{-α|x - x_0|²} with Re α > 0.
struct GaussianPacket {
  int dim = 1;
  cplx amplitude = 1.0;
  cplx width = 1.0;
  std::vector<double> center;      // empty: origin
  std::vector<double> modulation;  // empty: zero

  void validate() const;
  cplx operator()(std::span<const double> x) const;
  GridFunction sample(const Grid& grid) const;

  double center_coord(int d) const { return center.empty() ? 0.0 : center[d]; }
  double modulation_coord(int d) const { return modulation.empty() ? 0.0 : modulation[d]; }
};

/// Packet of x ↦ g(λx).
GaussianPacket dilate(const GaussianPacket& g, double lambda);

/// Exact transform under f̂(ξ) = ∫ e^{-ix·ξ} f(x) dx.
GaussianPacket gaussian_fourier(const GaussianPacket& g);

/// |c| (π/(p Re α))^{dim/(2p)}; |c| at p = ∞.
double gaussian_lp(const GaussianPacket& g, double p);

/// ‖|x - x_0|^b g‖_{L^a} about the packet center.
double gaussian_moment(const GaussianPacket& g, double b, double a);

/// e^{itΔ} g (multiplier e^{-it|ξ|²}).
GaussianPacket gaussian_schrodinger(const GaussianPacket& g, double t);

/// e^{tΔ} g for t ≥ 0; the packet must be unmodulated.
GaussianPacket gaussian_heat(const GaussianPacket& g, double t);

/// dim·(1/a + b/dim - 1/2), the large-|t| power of ‖|x|^b e^{itΔ}g‖_{L^a}.
double gaussian_moment_growth_exponent(double a, double b, int dim);

/// Surface measure of the unit sphere in R^dim (2 for dim = 1).
double unit_sphere_area(int dim);
/// Volume of the unit ball in R^dim.
double unit_ball_volume(int dim);

}  // namespace lpup
