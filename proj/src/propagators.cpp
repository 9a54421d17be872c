#include "lpup/propagators.hpp"

#include "lpup/diagnostics.hpp"
#include "lpup/field.hpp"
#include "lpup/parallel.hpp"
#include "lpup/params.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lpup {

namespace {

const cplx I(0.0, 1.0);

GridFunction checked(GridFunction u, const char* what) {
  if (!u.truncation_safe())
    warn(std::string(what) + ": evolved state reaches the boundary layer (ratio " +
         std::to_string(u.tail_ratio()) + "); enlarge L");
  return u;
}

std::vector<cplx> radial_values(const Grid& grid, const std::function<cplx(double)>& m) {
  auto radii = frequency_magnitudes(grid);
  std::vector<cplx> out(radii.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = m(radii[i]);
  return out;
}

double sup_radius(const Grid& grid) { return grid.dual().half_width * std::sqrt(grid.dim); }

}  // namespace

GridFunction schrodinger_evolve(const GridFunction& u0, double t) {
  return checked(apply_radial_multiplier(u0, [t](double r) { return std::exp(-I * t * r * r); }),
                 "schrodinger_evolve");
}

GridFunction schrodinger_far_field(const GridFunction& u0, double t) {
  if (!(t > 0)) throw std::invalid_argument("far-field evaluation needs t > 0");
  const Grid& g = u0.grid();
  // The chirp's local frequency L/2t must stay inside the frequency grid.
  if (g.half_width / (2.0 * t) > 0.5 * g.dual().half_width)
    warn("schrodinger_far_field: chirp under-resolved at t = " + std::to_string(t));
  std::array<double, 3> y{};
  std::vector<cplx> chirped(u0.size());
  for (std::size_t i = 0; i < chirped.size(); ++i) {
    g.point(i, y);
    double r2 = 0;
    for (int d = 0; d < g.dim; ++d) r2 += y[d] * y[d];
    chirped[i] = u0[i] * std::exp(I * r2 / (4.0 * t));
  }
  GridFunction transformed = fourier(GridFunction(g, std::move(chirped)));
  Grid out_grid{g.dim, 2.0 * t * transformed.grid().half_width, g.points};
  const cplx prefactor = std::pow(std::sqrt(4.0 * kPi * I * t), -g.dim);
  std::vector<cplx> out(transformed.size());
  std::array<double, 3> x{};
  for (std::size_t i = 0; i < out.size(); ++i) {
    out_grid.point(i, x);
    double r2 = 0;
    for (int d = 0; d < g.dim; ++d) r2 += x[d] * x[d];
    out[i] = prefactor * std::exp(I * r2 / (4.0 * t)) * transformed[i];
  }
  return checked(GridFunction(out_grid, std::move(out)), "schrodinger_far_field");
}

GridFunction heat_evolve(const GridFunction& u0, double t) {
  if (t < 0) throw std::invalid_argument("heat flow requires t >= 0");
  return checked(apply_radial_multiplier(u0, [t](double r) { return cplx(std::exp(-t * r * r)); }),
                 "heat_evolve");
}

GridFunction half_wave_evolve(const GridFunction& u0, double t, int sign) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("half-wave sign must be +1 or -1");
  return checked(
      apply_radial_multiplier(u0, [t, sign](double r) { return std::exp(I * (sign * t * r)); }),
      "half_wave_evolve");
}

WaveState wave_solve(const WaveState& state0, double t) {
  if (!same_grid(state0.u.grid(), state0.ut.grid()))
    throw std::invalid_argument("wave data on different grids");
  const Grid& g = state0.u.grid();
  const double tiny = 1e-12 * sup_radius(g);
  auto cos_m = radial_values(g, [t](double r) { return cplx(std::cos(t * r)); });
  auto sinc_m = radial_values(g, [t, tiny](double r) {
    return cplx(r < tiny ? t : std::sin(t * r) / r);
  });
  auto dsin_m = radial_values(g, [t](double r) { return cplx(-r * std::sin(t * r)); });
  GridFunction u = apply_multiplier_values(state0.u, cos_m) + apply_multiplier_values(state0.ut, sinc_m);
  GridFunction ut = apply_multiplier_values(state0.u, dsin_m) + apply_multiplier_values(state0.ut, cos_m);
  return {checked(std::move(u), "wave_solve"), std::move(ut)};
}

double wave_energy(const WaveState& state) {
  auto grad = apply_radial_multiplier(state.u, [](double r) { return cplx(r); });
  double a = lp_norm(grad, 2.0), b = lp_norm(state.ut, 2.0);
  return a * a + b * b;
}

namespace {

std::pair<GridFunction, GridFunction> projected_parts(const WaveState& state0, double t,
                                                      double n_dyadic) {
  if (!lp_resolvable(state0.u.grid(), n_dyadic))
    throw std::invalid_argument("dyadic frequency " + std::to_string(n_dyadic) +
                                " is not resolvable on this grid");
  WaveState s = wave_solve(state0, t);
  auto a = apply_radial_multiplier(
      s.u, [n_dyadic](double r) { return cplx(r * littlewood_paley_multiplier(r, n_dyadic)); });
  auto b = lp_project(s.ut, n_dyadic);
  return {std::move(a), std::move(b)};
}

}  // namespace

GridFunction projected_energy_density(const WaveState& state0, double t, double n_dyadic) {
  auto [a, b] = projected_parts(state0, t, n_dyadic);
  std::vector<cplx> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::abs(a[i]) + std::abs(b[i]);
  return GridFunction(a.grid(), std::move(out));
}

double projected_energy(const WaveState& state0, double t, double n_dyadic) {
  auto [a, b] = projected_parts(state0, t, n_dyadic);
  double x = lp_norm(a, 2.0), y = lp_norm(b, 2.0);
  return x * x + y * y;
}

EvolutionTrace linear_trace(LinearFlow flow, const GridFunction& u0, double t_begin, double dt,
                            std::size_t count) {
  if (count == 0) throw std::invalid_argument("empty trace requested");
  if (!(dt > 0)) throw std::invalid_argument("trace step must be positive");
  EvolutionTrace tr;
  tr.equation = flow == LinearFlow::schrodinger ? "schrodinger" : "heat";
  tr.method = "fourier-multiplier";
  tr.dt = dt;
  for (std::size_t j = 0; j < count; ++j) tr.times.push_back(t_begin + static_cast<double>(j) * dt);
  tr.snapshots = parallel_map<GridFunction>(count, [&](std::size_t j) {
    double t = tr.times[j];
    return flow == LinearFlow::schrodinger ? schrodinger_evolve(u0, t) : heat_evolve(u0, t);
  });
  return tr;
}

double PotentialSpec::time_factor(double t) const {
  double at = std::abs(t);
  double grow = growth_power == 0.0 ? 1.0 : std::pow(at, growth_power);
  return coupling * grow * std::pow(1.0 + at, -decay);
}

double PotentialSpec::value(double t, std::size_t i) const {
  switch (family) {
    case Family::zero:
      return 0.0;
    case Family::separable:
      return time_factor(t) * profile[i];
    case Family::constant_in_space:
      return time_factor(t);
  }
  return 0.0;
}

void PotentialSpec::validate(const Grid& grid) const {
  if (!(order > 1)) throw std::invalid_argument("nonlinearity order m must exceed 1");
  if (!std::isfinite(coupling) || !std::isfinite(decay) || !(growth_power >= 0))
    throw std::invalid_argument("potential parameters must be finite with growth power >= 0");
  if (family == Family::separable && profile.size() != grid.size())
    throw std::invalid_argument("potential profile does not match the grid");
}

PotentialSpec separable_potential(double coupling, double sigma, int dim, double p, double m,
                                  const GridFunction& profile) {
  PotentialSpec pot;
  pot.family = PotentialSpec::Family::separable;
  pot.coupling = coupling;
  pot.decay = sigma;
  pot.order = m;
  double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
  pot.growth_power = dim * m / 2.0 * (1.0 - 2.0 * inv_p);
  pot.profile.resize(profile.size());
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (profile[i].imag() != 0.0) throw std::invalid_argument("potential profile must be real");
    pot.profile[i] = profile[i].real();
  }
  return pot;
}

namespace {

double profile_sup(const PotentialSpec& pot) {
  switch (pot.family) {
    case PotentialSpec::Family::zero:
      return 0.0;
    case PotentialSpec::Family::separable: {
      double s = 0.0;
      for (double v : pot.profile) s = std::max(s, std::abs(v));
      return s;
    }
    case PotentialSpec::Family::constant_in_space:
      return 1.0;
  }
  return 0.0;
}

std::size_t step_count(double T, double dt) {
  if (!(T > 0) || !(dt > 0)) throw std::invalid_argument("window and step must be positive");
  auto M = static_cast<std::size_t>(std::llround(T / dt));
  if (M == 0 || std::abs(static_cast<double>(M) * dt - T) > 1e-9 * T)
    throw std::invalid_argument("step does not divide the window");
  return M;
}

// u ← u·e^{iφ|u|^{m-1}τ} with φ taken at time t.
void rotate(std::vector<cplx>& u, const PotentialSpec& pot, double t, double tau) {
  if (pot.family == PotentialSpec::Family::zero) return;
  const double e = pot.order - 1.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    double phase = pot.value(t, i) * std::pow(std::abs(u[i]), e) * tau;
    u[i] *= std::polar(1.0, phase);
  }
}

}  // namespace

GridFunction detail::nonlinear_rotation(const GridFunction& u, const PotentialSpec& pot, double t,
                                        double tau) {
  pot.validate(u.grid());
  std::vector<cplx> w(u.samples().begin(), u.samples().end());
  rotate(w, pot, t, tau);
  return GridFunction(u.grid(), std::move(w));
}

EvolutionTrace nls_split_step(const GridFunction& u0, const PotentialSpec& pot, double T, double dt,
                              std::size_t stride) {
  const Grid& g = u0.grid();
  pot.validate(g);
  if (stride == 0) throw std::invalid_argument("snapshot stride must be positive");
  const std::size_t M = step_count(T, dt);
  if (M % stride != 0) throw std::invalid_argument("snapshot stride must divide the step count");

  const double u_sup = u0.max_abs();
  double phi_sup = 0.0;
  for (std::size_t j = 0; j <= 4 * M; ++j)
    phi_sup = std::max(phi_sup, std::abs(pot.time_factor(0.25 * dt * static_cast<double>(j))));
  phi_sup *= profile_sup(pot);
  const double rotation = dt * phi_sup * std::pow(u_sup, pot.order - 1.0);
  if (rotation >= 0.1)
    throw NumericalFailure("time step does not resolve the nonlinear phase (dt·‖φ‖∞·‖u‖∞^{m-1} = " +
                           std::to_string(rotation) + " >= 0.1)");

  auto linear = radial_values(g, [dt](double r) { return std::exp(-I * dt * r * r); });
  EvolutionTrace tr;
  tr.equation = "nls";
  tr.method = "strang-split-step";
  tr.dt = dt * static_cast<double>(stride);
  tr.times.push_back(0.0);
  tr.snapshots.push_back(u0);

  GridFunction u = u0;
  for (std::size_t j = 0; j < M; ++j) {
    const double t = dt * static_cast<double>(j);
    std::vector<cplx> w(u.samples().begin(), u.samples().end());
    rotate(w, pot, t + 0.25 * dt, 0.5 * dt);
    u = apply_multiplier_values(GridFunction(g, std::move(w)), linear);
    w.assign(u.samples().begin(), u.samples().end());
    rotate(w, pot, t + 0.75 * dt, 0.5 * dt);
    u = GridFunction(g, std::move(w));
    if (!(u.max_abs() <= 1e6 * u_sup))
      throw NumericalFailure("blow-up guard: sup norm grew beyond 1e6 times its initial value at t = " +
                             std::to_string(t + dt));
    if ((j + 1) % stride == 0) {
      tr.times.push_back(dt * static_cast<double>(j + 1));
      tr.snapshots.push_back(checked(u, "nls_split_step"));
    }
  }
  return tr;
}

double xp_norm(const EvolutionTrace& trace, double p, double t_min) {
  if (!(p > 2)) throw std::invalid_argument("X_p norm needs p > 2");
  if (!(t_min > 0)) throw std::invalid_argument("X_p norm needs t_min > 0");
  trace.validate();
  const double w = trace.grid().dim / 2.0 * (1.0 - (std::isinf(p) ? 0.0 : 2.0 / p));
  double best = -1.0;
  for (std::size_t j = 0; j < trace.times.size(); ++j) {
    double t = trace.times[j];
    if (t < t_min * (1 - 1e-12)) continue;
    best = std::max(best, std::pow(std::abs(t), w) * lp_norm(trace.snapshots[j], p));
  }
  if (best < 0) throw std::invalid_argument("no trace samples at or after t_min");
  return best;
}

PicardResult duhamel_picard(const GridFunction& u0, const PotentialSpec& pot, double T, double dt,
                            std::size_t iterations, double p) {
  const Grid& g = u0.grid();
  pot.validate(g);
  if (pot.family != PotentialSpec::Family::zero && !eta_condition_check(pot.decay))
    throw std::invalid_argument("decay exponent sigma must exceed 1 for the contraction argument");
  if (!(p > 2)) throw std::invalid_argument("X_p norm needs p > 2");
  const std::size_t M = step_count(T, dt);
  const std::size_t nodes = 2 * M + 1;  // τ_i = i·dt/2
  auto half = radial_values(g, [dt](double r) { return std::exp(-I * 0.5 * dt * r * r); });
  auto tau = [dt](std::size_t i) { return 0.5 * dt * static_cast<double>(i); };

  std::vector<GridFunction> free = parallel_map<GridFunction>(nodes, [&](std::size_t i) {
    return i == 0 ? u0 : schrodinger_evolve(u0, tau(i));
  });
  const double e = pot.order - 1.0;
  auto nonlinear = [&](const GridFunction& f, double t) {
    std::vector<cplx> out(f.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = pot.value(t, i) * std::pow(std::abs(f[i]), e) * f[i];
    return out;
  };
  auto axpy = [](const GridFunction& base, const std::vector<cplx>& n, cplx scale) {
    std::vector<cplx> out(base.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = base[i] + scale * n[i];
    return GridFunction(base.grid(), std::move(out));
  };

  const double weight = g.dim / 2.0 * (1.0 - (std::isinf(p) ? 0.0 : 2.0 / p));
  auto distance = [&](const std::vector<GridFunction>& a, const std::vector<GridFunction>& b) {
    double best = 0.0;
    for (std::size_t j = 1; j <= M; ++j) {
      double t = dt * static_cast<double>(j);
      best = std::max(best, std::pow(t, weight) * lp_norm(a[2 * j] - b[2 * j], p));
    }
    return best;
  };

  PicardResult result;
  std::vector<GridFunction> current = free;
  std::size_t rising = 0;
  for (std::size_t k = 0; k < iterations; ++k) {
    std::vector<GridFunction> next;
    next.reserve(nodes);
    next.push_back(u0);
    GridFunction D = GridFunction::zeros(g);
    for (std::size_t j = 0; j < M; ++j) {
      auto n_left = nonlinear(current[2 * j], tau(2 * j));
      auto n_mid = nonlinear(current[2 * j + 1], tau(2 * j + 1));
      GridFunction odd = apply_multiplier_values(axpy(D, n_left, I * 0.5 * dt), half);
      GridFunction shifted = apply_multiplier_values(D, half);
      D = apply_multiplier_values(axpy(shifted, n_mid, I * dt), half);
      next.push_back(free[2 * j + 1] + odd);
      next.push_back(free[2 * j + 2] + D);
    }
    double d = distance(next, current);
    result.distances.push_back(d);
    result.iterations = k + 1;
    current = std::move(next);
    if (d == 0.0) break;
    if (result.distances.size() >= 2) {
      const auto n = result.distances.size();
      rising = result.distances[n - 1] >= result.distances[n - 2] ? rising + 1 : 0;
      if (rising >= 3) {
        result.contracting = false;
        warn("duhamel_picard: no contraction; the data are too large for this potential");
        break;
      }
    }
  }

  result.trace.equation = "nls";
  result.trace.method = "duhamel-picard";
  result.trace.dt = dt;
  for (std::size_t j = 0; j <= M; ++j) {
    result.trace.times.push_back(dt * static_cast<double>(j));
    result.trace.snapshots.push_back(checked(current[2 * j], "duhamel_picard"));
  }
  return result;
}

}  // namespace lpup
