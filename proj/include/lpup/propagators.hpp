#pragma once

// Spectral evolution: free Schrödinger, heat, half-wave and wave flows as
// Fourier multipliers, the projected wave energy, and the nonlinear
// Schrödinger equation i u_t + Δu + φ|u|^{m-1}u = 0 by Strang splitting and
// by Picard iteration of the Duhamel map.

#include "lpup/grid.hpp"
#include "lpup/trace.hpp"

#include <vector>

namespace lpup {

/// e^{itΔ}u0, multiplier e^{-it|ξ|²}.
GridFunction schrodinger_evolve(const GridFunction& u0, double t);

/// e^{itΔ}u0 for t > 0 via the exact identity
///   u(t,x) = (4πit)^{-dim/2} e^{i|x|²/4t} F[e^{i|y|²/4t} u0](x/2t).
/// The result lives on the grid x = 2tξ of half-width t·Nπ/L, so it reaches
/// large times without enlarging the input grid.
GridFunction schrodinger_far_field(const GridFunction& u0, double t);

/// e^{tΔ}u0 for t ≥ 0.
GridFunction heat_evolve(const GridFunction& u0, double t);

/// e^{sign·it√(-Δ)}u0, multiplier e^{sign·it|ξ|}; sign is +1 or -1.
GridFunction half_wave_evolve(const GridFunction& u0, double t, int sign);

struct WaveState {
  GridFunction u;
  GridFunction ut;
};

/// Solution of u_tt = Δu at time t from (u, u_t) at time 0.
WaveState wave_solve(const WaveState& state0, double t);
/// ‖√(-Δ)u‖² + ‖u_t‖².
double wave_energy(const WaveState& state);

/// |√(-Δ)P_N u(t)| + |∂_t P_N u(t)|.
GridFunction projected_energy_density(const WaveState& state0, double t, double n_dyadic);
/// ‖√(-Δ)P_N u(t)‖² + ‖∂_t P_N u(t)‖², conserved in t.
double projected_energy(const WaveState& state0, double t, double n_dyadic);

enum class LinearFlow { schrodinger, heat };

/// Snapshots at t_begin + j·dt, j < count; every time is computed
/// independently from u0.
EvolutionTrace linear_trace(LinearFlow flow, const GridFunction& u0, double t_begin, double dt,
                            std::size_t count);

/// Real coefficient φ(t,x) of the nonlinearity.
struct PotentialSpec {
  enum class Family { zero, separable, constant_in_space };
  Family family = Family::zero;
  double coupling = 0.0;      // c
  double decay = 2.0;         // σ in (1+|t|)^{-σ}
  double growth_power = 0.0;  // β in |t|^β
  std::vector<double> profile;  // g(x) on the evolution grid (separable only)
  double order = 3.0;           // m

  /// c |t|^β (1+|t|)^{-σ}.
  double time_factor(double t) const;
  /// φ(t, x_i).
  double value(double t, std::size_t i) const;
  /// Throws std::invalid_argument unless m > 1 and the profile matches the grid.
  void validate(const Grid& grid) const;
};

/// Separable potential whose L^r_x norm is |t|^{dim·m/2·(1-2/p)}(1+|t|)^{-σ}
/// times a constant.
PotentialSpec separable_potential(double coupling, double sigma, int dim, double p, double m,
                                  const GridFunction& profile);

/// Strang splitting over [0, T] with step dt; every `stride`-th state is
/// stored.  Throws NumericalFailure when the step does not resolve the
/// phase rotation or the sup norm grows by more than 10⁶.
EvolutionTrace nls_split_step(const GridFunction& u0, const PotentialSpec& pot, double T,
                              double dt, std::size_t stride = 1);

/// max over samples t ≥ t_min of t^{dim/2·(1-2/p)}‖u(t)‖_p.
double xp_norm(const EvolutionTrace& trace, double p, double t_min);

struct PicardResult {
  EvolutionTrace trace;
  std::vector<double> distances;  // d_k = ‖f_{k+1} - f_k‖_{X_p}
  bool contracting = true;
  std::size_t iterations = 0;
};

/// Picard iteration of T f = e^{itΔ}u0 + i∫_0^t e^{i(t-s)Δ}φ|f|^{m-1}f ds
/// from f_0 = e^{itΔ}u0.  Stops after `iterations` steps, when d_k = 0, or
/// when d_{k+1}/d_k ≥ 1 three times in a row (contracting = false).
PicardResult duhamel_picard(const GridFunction& u0, const PotentialSpec& pot, double T, double dt,
                            std::size_t iterations, double p);

namespace detail {
/// One exact nonlinear substep u·e^{iφ(t)|u|^{m-1}τ}.
GridFunction nonlinear_rotation(const GridFunction& u, const PotentialSpec& pot, double t, double tau);
}  // namespace detail

}  // namespace lpup
