#pragma once

// Norms, localisation ratios, the continuous-convention Fourier transform
// f̂(ξ) = ∫ e^{-ix·ξ} f(x) dx, Littlewood-Paley projections, set restriction
// and spacetime norms over sampled functions.

#include "lpup/grid.hpp"
#include "lpup/trace.hpp"

#include <functional>
#include <span>

namespace lpup {

/// (Σ |f|^p h^dim)^{1/p}, or max |f| for p = ∞.  Uses log-domain
/// accumulation for p < 1/4.
double lp_norm(const GridFunction& f, double p);
double weighted_norm(const GridFunction& f, const NormSpec& spec);

/// ‖f‖_1 / ‖f‖_q.
double h0_ratio(const GridFunction& f, double q);
/// ‖|x|^r f‖_2 / ‖f‖_q.
double h1_ratio(const GridFunction& f, double r, double q);

GridFunction fourier(const GridFunction& f);
GridFunction inverse_fourier(const GridFunction& g);

/// Multiplies f̂ by m(ξ) and transforms back.
GridFunction apply_multiplier(const GridFunction& f,
                              const std::function<cplx(std::span<const double>)>& m);
GridFunction apply_radial_multiplier(const GridFunction& f,
                                     const std::function<cplx(double)>& m);
/// Multiplier given by its values on the dual grid (row-major).
GridFunction apply_multiplier_values(const GridFunction& f, std::span<const cplx> m);
/// |ξ| at every point of grid.dual().
std::vector<double> frequency_magnitudes(const Grid& grid);

/// Radial bump: 1 on [0,1], 0 on [11/10, ∞), quintic smoothstep between.
double lp_bump(double r);
/// φ(|ξ|/N) - φ(2|ξ|/N).
double littlewood_paley_multiplier(double xi_abs, double n_dyadic);
/// True when the annulus N/2 ≤ |ξ| ≤ 11N/10 sits inside the frequency grid
/// with at least two frequency cells below it.
bool lp_resolvable(const Grid& grid, double n_dyadic);
GridFunction lp_project(const GridFunction& f, double n_dyadic);

GridFunction restrict_to(const GridFunction& f, const IndicatorSet& omega);

struct TimeWindow {
  double begin = 0.0;
  double end = 1.0;
};

/// L^p norm over [begin,end] × Ω with weight |(t - t_0, x - x_1)|^b; the
/// NormSpec center is (t_0, x_1...) of size 1 + dim.  Trapezoid rule in
/// time; the window must start and end on trace samples.
double spacetime_norm(const EvolutionTrace& trace, const NormSpec& spec,
                      const IndicatorSet& omega, TimeWindow window);

namespace detail {
double pairwise_sum(std::span<const double> values);
double lp_norm_direct(std::span<const double> magnitudes, double p, double cell_volume);
double lp_norm_log_domain(std::span<const double> magnitudes, double p, double cell_volume);
std::vector<double> magnitudes(const GridFunction& f);
/// ζ(z, q) = Σ_{k≥0} (k+q)^{-z}, analytically continued; q ∈ (0, 1].
double hurwitz_zeta(double z, double q);
/// Riemann sum minus integral of |x - c|^s g(x) over a 1-D grid, through
/// g'' at c.  `values` are samples of the smooth factor g.
double singular_weight_correction(std::span<const double> values, const Grid& grid,
                                  double center, double s);
}  // namespace detail

}  // namespace lpup
