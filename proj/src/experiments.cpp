#include "lpup/experiments.hpp"

#include "lpup/diagnostics.hpp"
#include "lpup/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace lpup {

namespace {

NormSpec moment_spec(const SideParams& side, const std::vector<double>& center) {
  return {side.a.to_double(), to_double(side.b), center};
}

std::string joined_violations(const Verdict& v) {
  std::string out;
  for (const auto& s : v.violations()) out += (out.empty() ? "" : "; ") + s;
  return out;
}

void require(const Verdict& v, const char* what) {
  if (!v.admissible())
    throw std::invalid_argument(std::string(what) + " inadmissible: " + joined_violations(v));
}

Json cplx_json(cplx z) { return Json::array({z.real(), z.imag()}); }

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::size_t step_count(double T, double dt) {
  if (!(T > 0) || !(dt > 0)) throw std::invalid_argument("T and dt must be positive");
  double steps = T / dt;
  auto m = static_cast<std::size_t>(std::llround(steps));
  if (m == 0 || std::abs(steps - static_cast<double>(m)) > 1e-9 * steps)
    throw std::invalid_argument("T must be an integer multiple of dt");
  return m;
}

double relative_error(double measured, double predicted) {
  return predicted == 0.0 ? std::abs(measured) : std::abs(measured - predicted) / std::abs(predicted);
}

}  // namespace

// ---------------------------------------------------------------------------
// Records

std::string Series::to_csv() const {
  std::ostringstream out;
  for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_g17(row[c]);
    out << '\n';
  }
  return out.str();
}

void ExperimentRecord::predict(const std::string& name, double value, const std::string& formula) {
  predicted[name] = Json{{"value", value}, {"formula", formula}};
}

Json ExperimentRecord::to_json() const {
  Json j;
  j["tag"] = tag;
  j["params"] = params;
  j["measured"] = measured;
  j["predicted"] = predicted;
  j["ok"] = ok;
  j["tolerances"] = tolerances;
  j["provenance"] = provenance;
  return j;
}

std::string ExperimentRecord::dump() const { return to_json().dump(2) + "\n"; }

Json grid_json(const Grid& grid) {
  return Json{{"dim", grid.dim}, {"half_width", grid.half_width}, {"points", grid.points}};
}

Json side_json(const SideParams& side) {
  return Json{{"n", side.n}, {"a", side.a.str()}, {"b", to_string(side.b)}, {"k", side.k.str()}};
}

Json warning_summary(const std::vector<std::string>& warnings) {
  Json out = Json::array();
  std::vector<std::string> sources;
  for (const auto& w : warnings) {
    std::string source = w.substr(0, w.find(':'));
    auto it = std::find(sources.begin(), sources.end(), source);
    if (it == sources.end()) {
      sources.push_back(source);
      out.push_back(Json{{"source", source}, {"count", 1}, {"first", w}});
    } else {
      auto& entry = out[static_cast<std::size_t>(it - sources.begin())];
      entry["count"] = entry["count"].get<int>() + 1;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Test functions

GridFunction PacketSum::sample(const Grid& grid) const {
  if (parts.empty()) throw std::invalid_argument("empty packet sum");
  std::vector<cplx> out(grid.size(), cplx(0.0));
  std::vector<double> x(static_cast<std::size_t>(grid.dim));
  for (std::size_t i = 0; i < out.size(); ++i) {
    grid.point(i, x);
    for (const auto& g : parts) out[i] += g(x);
  }
  return GridFunction(grid, std::move(out));
}

Json PacketSum::to_json() const {
  Json list = Json::array();
  for (const auto& g : parts) {
    list.push_back(Json{{"amplitude", cplx_json(g.amplitude)},
                        {"width", cplx_json(g.width)},
                        {"center", g.center},
                        {"modulation", g.modulation}});
  }
  return list;
}

PacketSum random_packet_sum(int dim, double half_width, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(1, 5);
  std::uniform_real_distribution<double> width(0.5, 2.0), pos(-0.5 * half_width, 0.5 * half_width),
      modulus(0.1, 1.0), phase(-kPi, kPi);
  PacketSum sum;
  int k = count(rng);
  for (int j = 0; j < k; ++j) {
    GaussianPacket g;
    g.dim = dim;
    g.width = width(rng);
    g.center.resize(static_cast<std::size_t>(dim));
    for (auto& c : g.center) c = pos(rng);
    g.amplitude = std::polar(modulus(rng), phase(rng));
    sum.parts.push_back(std::move(g));
  }
  return sum;
}

GridFunction annular_packet(const Grid& grid, double radius, double sigma) {
  if (!(radius > 0) || !(sigma > 0)) throw std::invalid_argument("annulus radius and width must be positive");
  auto spectrum = GridFunction::sample(grid.dual(), [&](std::span<const double> xi) {
    double r2 = 0;
    for (double c : xi) r2 += c * c;
    double dr = std::sqrt(r2) - radius;
    return cplx(std::exp(-dr * dr / (2.0 * sigma * sigma)));
  });
  return inverse_fourier(spectrum);
}

std::vector<PacketSum> PacketFamily::members(const Grid& grid) const {
  grid.validate();
  if (dim != grid.dim) throw std::invalid_argument("family dimension differs from grid");
  std::mt19937_64 rng(seed);
  std::vector<PacketSum> out;
  switch (kind) {
    case Kind::gaussian_sweep:
      for (double w : widths) {
        GaussianPacket g;
        g.dim = dim;
        g.width = w;
        out.push_back(PacketSum{{g}});
      }
      break;
    case Kind::translated: {
      if (widths.empty()) throw std::invalid_argument("translated family needs a width");
      std::uniform_real_distribution<double> pos(-spread, spread);
      PacketSum sum;
      for (std::size_t k = 0; k < count; ++k) {
        GaussianPacket g;
        g.dim = dim;
        g.width = widths.front();
        g.center.resize(static_cast<std::size_t>(dim));
        for (auto& c : g.center) c = pos(rng);
        sum.parts.push_back(std::move(g));
      }
      out.push_back(std::move(sum));
      break;
    }
    case Kind::random_corpus:
      for (std::size_t k = 0; k < count; ++k) out.push_back(random_packet_sum(dim, grid.half_width, rng));
      break;
  }
  auto safe = parallel_map<int>(out.size(), [&](std::size_t i) {
    for (const auto& g : out[i].parts) g.validate();
    return out[i].sample(grid).truncation_safe() ? 1 : 0;
  });
  for (std::size_t i = 0; i < safe.size(); ++i)
    if (!safe[i])
      throw std::invalid_argument("family member " + std::to_string(i) +
                                  " is not truncation-safe on the grid");
  return out;
}

Json PacketFamily::to_json() const {
  static const char* names[] = {"gaussian_sweep", "translated", "random_corpus"};
  return Json{{"kind", names[static_cast<int>(kind)]},
              {"dim", dim},
              {"widths", widths},
              {"count", count},
              {"spread", spread},
              {"seed", seed}};
}

// ---------------------------------------------------------------------------
// Products and lemmas

ProductResult up_product(const GridFunction& f, const SideParams& side1, const SideParams& side2,
                         const std::vector<double>& x0, const std::vector<double>& xi0,
                         bool check) {
  const int n = f.grid().dim;
  if (side1.n != n || side2.n != n) throw std::invalid_argument("side dimension differs from grid");
  if (check) require(thm2_admissible(n, side1, side2), "Fourier-pair product");
  if (!(f.max_abs() > 0)) throw std::invalid_argument("zero function");
  GridFunction fhat = fourier(f);
  ProductResult r;
  r.factor1 = weighted_norm(f, moment_spec(side1, x0)) / lp_norm(f, side1.k.to_double());
  r.factor2 = weighted_norm(fhat, moment_spec(side2, xi0)) / lp_norm(fhat, side2.k.to_double());
  r.exponent1 = to_double(localization_exponent(side2));
  r.exponent2 = to_double(localization_exponent(side1));
  r.product = std::pow(r.factor1, r.exponent1) * std::pow(r.factor2, r.exponent2);
  return r;
}

Lemma1Result lemma1_check(const GridFunction& f, const Index& a, const Rational& b,
                          const Rational& s, const Index& p, const std::vector<double>& x0,
                          double tolerance) {
  const Grid& g = f.grid();
  const int n = g.dim;
  require(lemma1_admissible(n, a, b, s, p), "moment lemma");
  if (!(f.max_abs() > 0)) throw std::invalid_argument("zero function");
  const double pd = p.to_double(), sd = to_double(s), bd = to_double(b);
  const double ps_conj = s == 1 ? kInf : pd * sd / (sd - 1.0);

  const double norm_p = lp_norm(f, pd);
  const double norm_ps = lp_norm(f, ps_conj);
  Lemma1Result r;
  r.threshold = std::pow(unit_ball_volume(n), -1.0 / n) *
                std::pow(norm_p / (std::pow(2.0, 1.0 / pd) * norm_ps), pd * sd / n);
  const double T = r.threshold;

  double W;
  if (a == p) {
    W = std::pow(T, -bd * pd);
  } else {
    const double r_exp = a.is_infinite() ? 1.0 : a.to_double() / (a.to_double() - pd);
    W = std::pow(unit_sphere_area(n) / (bd * pd * r_exp - n), 1.0 / r_exp) *
        std::pow(T, n / r_exp - bd * pd);
  }
  r.half_mass = 0.5 * std::pow(norm_p, pd);
  r.rhs = std::pow(r.half_mass / W, 1.0 / pd);
  r.lhs = weighted_norm(f, {a.to_double(), bd, x0});
  r.ok = r.lhs >= r.rhs * (1.0 - tolerance);

  // Direct quadrature of the half-mass step.
  std::vector<double> inside;
  std::size_t count = 0;
  std::vector<double> x(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < f.size(); ++i) {
    g.point(i, x);
    double r2 = 0;
    for (int d = 0; d < n; ++d) {
      double dx = x[d] - (x0.empty() ? 0.0 : x0[d]);
      r2 += dx * dx;
    }
    if (r2 <= T * T) {
      inside.push_back(std::pow(std::abs(f[i]), pd));
      ++count;
    }
  }
  r.inner_mass = detail::pairwise_sum(inside) * g.cell_volume();
  const double ball_ratio = count * g.cell_volume() / (unit_ball_volume(n) * std::pow(T, n));
  r.inner_bound = r.half_mass * std::pow(std::max(1.0, ball_ratio), 1.0 / sd);
  r.half_mass_ok = r.inner_mass <= r.inner_bound * (1.0 + 1e-12);
  return r;
}

Lemma2Result lemma2_check(const GridFunction& f, const Index& k, const Index& p, const Index& q,
                          const Index& m, double tolerance) {
  require(lemma2_admissible(k, p, q, m), "norm-ratio lemma");
  if (!(f.max_abs() > 0)) throw std::invalid_argument("zero function");
  const double exponent =
      to_double((p.reciprocal() - k.reciprocal()) / (q.reciprocal() - m.reciprocal()));
  Lemma2Result r;
  r.lhs = lp_norm(f, p.to_double()) / lp_norm(f, k.to_double());
  r.rhs = std::pow(lp_norm(f, q.to_double()) / lp_norm(f, m.to_double()), exponent);
  r.ok = r.lhs >= r.rhs * (1.0 - tolerance);
  return r;
}

CorpusSummary lemma_corpus_sweep(const Grid& grid, const std::vector<PacketSum>& corpus,
                                 const std::optional<Lemma1Spec>& lemma1,
                                 const std::vector<Lemma2Tuple>& lemma2) {
  if (lemma1) require(lemma1_admissible(grid.dim, lemma1->a, lemma1->b, lemma1->s, lemma1->p), "moment lemma");
  for (const auto& t : lemma2) require(lemma2_admissible(t.k, t.p, t.q, t.m), "norm-ratio lemma");
  struct Outcome {
    bool l1_ok = true;
    bool half_ok = true;
    double l1_ratio = kInf;
    double half_ratio = 0.0;
    bool l2_ok = true;
    double l2_ratio = kInf;
  };
  auto outcomes = parallel_map<Outcome>(corpus.size(), [&](std::size_t i) {
    GridFunction f = corpus[i].sample(grid);
    Outcome o;
    if (lemma1) {
      auto r = lemma1_check(f, lemma1->a, lemma1->b, lemma1->s, lemma1->p);
      o.l1_ok = r.ok;
      o.half_ok = r.half_mass_ok;
      o.l1_ratio = r.lhs / r.rhs;
      o.half_ratio = r.inner_mass / r.inner_bound;
    }
    for (const auto& t : lemma2) {
      auto r = lemma2_check(f, t.k, t.p, t.q, t.m);
      o.l2_ok = o.l2_ok && r.ok;
      o.l2_ratio = std::min(o.l2_ratio, r.lhs / r.rhs);
    }
    return o;
  });
  CorpusSummary sum;
  sum.members = corpus.size();
  sum.lemma1_min_ratio = lemma1 ? kInf : 0.0;
  sum.lemma2_min_ratio = lemma2.empty() ? 0.0 : kInf;
  for (const auto& o : outcomes) {
    sum.lemma1_violations += !o.l1_ok;
    sum.half_mass_violations += !o.half_ok;
    sum.lemma2_violations += !o.l2_ok;
    if (lemma1) sum.lemma1_min_ratio = std::min(sum.lemma1_min_ratio, o.l1_ratio);
    sum.half_mass_max_ratio = std::max(sum.half_mass_max_ratio, o.half_ratio);
    if (!lemma2.empty()) sum.lemma2_min_ratio = std::min(sum.lemma2_min_ratio, o.l2_ratio);
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Growth fits

PowerFit fit_power_law(const std::vector<double>& times, const std::vector<double>& values) {
  if (times.size() != values.size() || times.size() < 2)
    throw std::invalid_argument("power fit needs at least two (t, value) pairs");
  const double count = static_cast<double>(times.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] > 0) || !(values[i] > 0))
      throw std::invalid_argument("power fit needs positive times and values");
    sx += std::log(times[i]);
    sy += std::log(values[i]);
  }
  const double mx = sx / count, my = sy / count;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    double dx = std::log(times[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(values[i]) - my);
  }
  if (sxx == 0) throw std::invalid_argument("power fit needs distinct times");
  PowerFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.times = times;
  fit.values = values;
  return fit;
}

std::vector<double> geometric_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0) || !(hi > lo) || count < 2) throw std::invalid_argument("bad geometric grid");
  std::vector<double> t(count);
  for (std::size_t i = 0; i < count; ++i)
    t[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(count - 1));
  t.back() = hi;
  return t;
}

std::pair<double, std::string> predicted_growth(LinearFlow flow, double a, double b, int dim) {
  if (flow == LinearFlow::schrodinger)
    return {gaussian_moment_growth_exponent(a, b, dim), "dim*(1/a+b/dim-1/2)"};
  const double inv_a = std::isinf(a) ? 0.0 : 1.0 / a;
  return {0.5 * b + 0.5 * dim * inv_a - 0.5 * dim, "gaussian heat scaling b/2+dim/(2a)-dim/2"};
}

namespace {

GrowthResult finish_fit(std::vector<double> times, std::vector<double> values,
                        std::vector<double> excluded, std::pair<double, std::string> prediction) {
  if (times.size() < 2)
    throw NumericalFailure("fewer than two untruncated samples; enlarge the grid");
  GrowthResult r;
  r.fit = fit_power_law(times, values);
  r.fit.excluded = std::move(excluded);
  r.predicted = prediction.first;
  r.formula = std::move(prediction.second);
  r.rel_err = relative_error(r.fit.slope, r.predicted);
  return r;
}

}  // namespace

GrowthResult moment_growth_fit(LinearFlow flow, const GaussianPacket& g, double a, double b,
                               const std::vector<double>& times) {
  g.validate();
  for (int d = 0; d < g.dim; ++d)
    if (g.modulation_coord(d) != 0.0)
      throw std::invalid_argument("analytic moment trace needs an unmodulated packet");
  std::vector<double> values;
  for (double t : times) {
    GaussianPacket gt = flow == LinearFlow::schrodinger ? gaussian_schrodinger(g, t) : gaussian_heat(g, t);
    values.push_back(gaussian_moment(gt, b, a));
  }
  return finish_fit(times, std::move(values), {}, predicted_growth(flow, a, b, g.dim));
}

GrowthResult moment_growth_fit(LinearFlow flow, TraceMethod method, const GridFunction& u0,
                               double a, double b, const std::vector<double>& x0,
                               const std::vector<double>& times) {
  if (method == TraceMethod::analytic)
    throw std::invalid_argument("analytic traces take a Gaussian packet");
  if (method == TraceMethod::far_field && flow != LinearFlow::schrodinger)
    throw std::invalid_argument("far-field traces exist only for the Schrödinger flow");
  if (!u0.truncation_safe()) throw NumericalFailure("initial data is truncated; enlarge the grid");
  const Grid& g = u0.grid();
  auto samples = parallel_map<std::pair<bool, double>>(times.size(), [&](std::size_t i) {
    const double t = times[i];
    GridFunction u = u0;
    if (method == TraceMethod::far_field) {
      if (g.half_width / (2.0 * t) > 0.5 * g.dual().half_width) return std::make_pair(false, 0.0);
      u = schrodinger_far_field(u0, t);
    } else {
      u = flow == LinearFlow::schrodinger ? schrodinger_evolve(u0, t) : heat_evolve(u0, t);
    }
    if (!u.truncation_safe()) return std::make_pair(false, 0.0);
    return std::make_pair(true, weighted_norm(u, {a, b, x0}));
  });
  std::vector<double> kept_t, kept_v, excluded;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (samples[i].first) {
      kept_t.push_back(times[i]);
      kept_v.push_back(samples[i].second);
    } else {
      excluded.push_back(times[i]);
    }
  }
  return finish_fit(std::move(kept_t), std::move(kept_v), std::move(excluded),
                    predicted_growth(flow, a, b, g.dim));
}

GrowthResult trace_growth_fit(const EvolutionTrace& trace, double a, double b,
                              const std::vector<double>& x0, double t_lo, double t_hi) {
  trace.validate();
  const double tol = 1e-9 * std::max(1.0, std::abs(t_hi));
  std::vector<std::size_t> picked;
  for (std::size_t i = 0; i < trace.times.size(); ++i)
    if (trace.times[i] > 0 && trace.times[i] >= t_lo - tol && trace.times[i] <= t_hi + tol)
      picked.push_back(i);
  auto samples = parallel_map<std::pair<bool, double>>(picked.size(), [&](std::size_t j) {
    const GridFunction& u = trace.snapshots[picked[j]];
    if (!u.truncation_safe()) return std::make_pair(false, 0.0);
    return std::make_pair(true, weighted_norm(u, {a, b, x0}));
  });
  std::vector<double> kept_t, kept_v, excluded;
  for (std::size_t j = 0; j < picked.size(); ++j) {
    double t = trace.times[picked[j]];
    if (samples[j].first) {
      kept_t.push_back(t);
      kept_v.push_back(samples[j].second);
    } else {
      excluded.push_back(t);
    }
  }
  return finish_fit(std::move(kept_t), std::move(kept_v), std::move(excluded),
                    predicted_growth(LinearFlow::schrodinger, a, b, trace.grid().dim));
}

WaveGrowthResult wave_energy_growth(const WaveState& state0, double n_dyadic, double a, double b,
                                    const std::vector<double>& times) {
  const Grid& g = state0.u.grid();
  if (!lp_resolvable(g, n_dyadic))
    throw std::invalid_argument("dyadic annulus not resolved by the grid");
  struct Sample {
    bool safe;
    double moment;
    double energy;
  };
  auto samples = parallel_map<Sample>(times.size(), [&](std::size_t i) {
    GridFunction density = projected_energy_density(state0, times[i], n_dyadic);
    double energy = projected_energy(state0, times[i], n_dyadic);
    if (!density.truncation_safe()) return Sample{false, 0.0, energy};
    return Sample{true, weighted_norm(density, {a, b, {}}), energy};
  });
  WaveGrowthResult r;
  std::vector<double> kept_t, kept_v, excluded;
  for (std::size_t i = 0; i < times.size(); ++i) {
    r.energies.push_back(samples[i].energy);
    if (samples[i].safe) {
      kept_t.push_back(times[i]);
      kept_v.push_back(samples[i].moment);
    } else {
      excluded.push_back(times[i]);
    }
  }
  if (kept_t.size() < 2) throw NumericalFailure("fewer than two untruncated samples; enlarge the grid");
  r.fit = fit_power_law(kept_t, kept_v);
  r.fit.excluded = std::move(excluded);
  const double inv_a = std::isinf(a) ? 0.0 : 1.0 / a;
  r.predicted_lower = (g.dim - 1) * (inv_a + b / g.dim - 0.5);
  r.ok = r.fit.slope >= r.predicted_lower - 0.05;
  for (double e : r.energies)
    r.energy_drift = std::max(r.energy_drift, std::abs(e - r.energies.front()) / r.energies.front());
  return r;
}

// ---------------------------------------------------------------------------
// Observability

double schrodinger_observability(const GridFunction& u0, const IndicatorSet& omega, double T,
                                 double dt) {
  validate_indicator(omega, u0.grid());
  const std::size_t steps = step_count(T, dt);
  const double norm0 = lp_norm(u0, 2.0);
  if (!(norm0 > 0)) throw std::invalid_argument("zero function");
  EvolutionTrace trace = linear_trace(LinearFlow::schrodinger, u0, 0.0, dt, steps + 1);
  return spacetime_norm(trace, {2.0, 0.0, {}}, omega, {0.0, trace.times.back()}) / norm0;
}

FamilyInfimum schrodinger_observability_family(const std::vector<GridFunction>& family,
                                               const IndicatorSet& omega, double T, double dt) {
  if (family.empty()) throw std::invalid_argument("empty family");
  FamilyInfimum r;
  for (const auto& f : family) r.values.push_back(schrodinger_observability(f, omega, T, dt));
  auto it = std::min_element(r.values.begin(), r.values.end());
  r.value = *it;
  r.argmin = static_cast<std::size_t>(it - r.values.begin());
  return r;
}

GridFunction band_limit(const GridFunction& f, double R) {
  if (!(R > 0)) throw std::invalid_argument("band limit must be positive");
  return apply_radial_multiplier(f, [R](double r) { return cplx(r < R ? 1.0 : 0.0); });
}

bool thickness_check(const IndicatorSet& omega, const Grid& grid, double side, double gamma) {
  grid.validate();
  validate_indicator(omega, grid);
  const double h = grid.spacing();
  const auto cells = static_cast<std::size_t>(std::llround(side / h));
  if (cells < 2 || cells > grid.points)
    throw std::invalid_argument("cube side not resolved by the grid");
  const auto mask = indicator_mask(omega, grid);
  const std::size_t n = grid.points, m = n + 1;
  const int dim = grid.dim;
  // Summed-volume table with a zero border.
  std::size_t total = 1;
  for (int d = 0; d < dim; ++d) total *= m;
  std::vector<std::int64_t> sat(total, 0);
  std::array<std::size_t, 3> stride{1, 1, 1};
  for (int d = dim - 2; d >= 0; --d) stride[d] = stride[d + 1] * m;
  for (std::size_t flat = 0; flat < mask.size(); ++flat) {
    auto idx = grid.unravel(flat);
    std::size_t pos = 0;
    for (int d = 0; d < dim; ++d) pos += (idx[d] + 1) * stride[d];
    sat[pos] = mask[flat];
  }
  for (int d = 0; d < dim; ++d)
    for (std::size_t pos = 0; pos < total; ++pos)
      if ((pos / stride[d]) % m > 0) sat[pos] += sat[pos - stride[d]];

  const double needed = gamma * std::pow(static_cast<double>(cells), dim);
  const std::size_t starts = n - cells + 1;
  std::size_t cubes = 1;
  for (int d = 0; d < dim; ++d) cubes *= starts;
  for (std::size_t c = 0; c < cubes; ++c) {
    std::array<std::size_t, 3> lo{};
    std::size_t rest = c;
    for (int d = dim - 1; d >= 0; --d) {
      lo[d] = rest % starts;
      rest /= starts;
    }
    std::int64_t sum = 0;
    for (unsigned corner = 0; corner < (1u << dim); ++corner) {
      std::size_t pos = 0;
      int flips = 0;
      for (int d = 0; d < dim; ++d) {
        bool high = corner & (1u << d);
        pos += (high ? lo[d] + cells : lo[d]) * stride[d];
        if (!high) ++flips;
      }
      sum += (flips % 2 ? -1 : 1) * sat[pos];
    }
    if (static_cast<double>(sum) < needed) return false;
  }
  return true;
}

HeatObservability heat_observability(const GridFunction& u0, double R, const IndicatorSet& omega,
                                     double T, double dt, double thick_side, double gamma) {
  if (!thickness_check(omega, u0.grid(), thick_side, gamma))
    throw std::invalid_argument("observation set is not thick at the given side and density");
  HeatObservability r;
  r.initial_norm = lp_norm(u0, 2.0);
  if (!(r.initial_norm > 0)) throw std::invalid_argument("zero function");
  const double leak = lp_norm(u0 - band_limit(u0, R), 2.0);
  if (leak > 1e-12 * r.initial_norm) throw std::invalid_argument("data is not band-limited to |xi| < R");
  const std::size_t steps = step_count(T, dt);
  EvolutionTrace trace = linear_trace(LinearFlow::heat, u0, 0.0, dt, steps + 1);
  r.ratio = spacetime_norm(trace, {2.0, 0.0, {}}, omega, {0.0, trace.times.back()}) / r.initial_norm;
  r.floor = std::exp(-T * R * R);
  r.final_norm = lp_norm(heat_evolve(u0, T), 2.0);
  r.intermediate_ok = r.final_norm >= r.floor * r.initial_norm * (1.0 - 1e-10);
  return r;
}

SpacetimeProduct thm5_product(LinearFlow flow, const GridFunction& u0, const IndicatorSet& omega,
                              double T, double dt, const SideParams& side1,
                              const SideParams& side2, const std::vector<double>& center1,
                              const std::vector<double>& center2, double R) {
  const int n = u0.grid().dim;
  if (side1.n != n || side2.n != n + 1)
    throw std::invalid_argument("spacetime product needs side dimensions (dim, dim+1)");
  require(thm5_admissible(n, side1, side2), "spacetime product");
  validate_indicator(omega, u0.grid());
  if (!(u0.max_abs() > 0)) throw std::invalid_argument("zero function");
  const std::size_t steps = step_count(T, dt);
  EvolutionTrace trace = linear_trace(flow, u0, 0.0, dt, steps + 1);
  const TimeWindow window{0.0, trace.times.back()};
  SpacetimeProduct r;
  r.factor1 = weighted_norm(u0, moment_spec(side1, center1)) / lp_norm(u0, side1.k.to_double());
  r.factor2 = spacetime_norm(trace, moment_spec(side2, center2), omega, window) /
              spacetime_norm(trace, {side2.k.to_double(), 0.0, {}}, omega, window);
  r.exponent1 = to_double(localization_exponent(side2));
  r.exponent2 = to_double(localization_exponent(side1));
  r.product = std::pow(r.factor1, r.exponent1) * std::pow(r.factor2, r.exponent2);
  if (flow == LinearFlow::heat) r.floor = std::exp(-T * R * R * r.exponent1 * r.exponent2);
  return r;
}

// ---------------------------------------------------------------------------
// Minimizer

ParametricFamily gaussian_width_family(const Grid& grid) {
  ParametricFamily fam;
  fam.tag = "gaussian_width";
  fam.lower = {std::log(0.25)};
  fam.upper = {std::log(4.0)};
  fam.start = {0.0};
  fam.build = [grid](std::span<const double> theta) {
    GaussianPacket g;
    g.dim = grid.dim;
    g.width = std::exp(theta[0]);
    return g.sample(grid);
  };
  return fam;
}

ParametricFamily translated_bumps_family(const Grid& grid, std::size_t bumps, std::uint64_t seed,
                                         double max_spread) {
  if (bumps == 0) throw std::invalid_argument("need at least one bump");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<std::vector<double>> directions(bumps, std::vector<double>(static_cast<std::size_t>(grid.dim)));
  for (auto& d : directions)
    for (auto& c : d) c = unit(rng);
  ParametricFamily fam;
  fam.tag = "translated_bumps";
  fam.lower = {0.0, std::log(0.5)};
  fam.upper = {max_spread, std::log(4.0)};
  fam.start = {0.0, 0.0};
  fam.build = [grid, directions](std::span<const double> theta) {
    PacketSum sum;
    for (const auto& d : directions) {
      GaussianPacket g;
      g.dim = grid.dim;
      g.width = std::exp(theta[1]);
      g.center.resize(d.size());
      for (std::size_t i = 0; i < d.size(); ++i) g.center[i] = theta[0] * d[i];
      sum.parts.push_back(std::move(g));
    }
    return sum.sample(grid);
  };
  return fam;
}

MinimizerResult product_minimizer(const ParametricFamily& family,
                                  const std::function<double(const GridFunction&)>& objective,
                                  std::size_t budget, std::uint64_t seed) {
  const std::size_t dims = family.start.size();
  if (dims == 0 || family.lower.size() != dims || family.upper.size() != dims)
    throw std::invalid_argument("family bounds do not match its parameter vector");
  for (std::size_t i = 0; i < dims; ++i)
    if (!(family.lower[i] <= family.upper[i])) throw std::invalid_argument("empty parameter range");
  if (budget == 0) throw std::invalid_argument("budget must be positive");

  std::mt19937_64 rng(seed);
  MinimizerResult r;
  r.best = kInf;
  auto clamp = [&](std::vector<double>& x) {
    for (std::size_t i = 0; i < dims; ++i) x[i] = std::clamp(x[i], family.lower[i], family.upper[i]);
  };
  auto evaluate = [&](const std::vector<double>& x) {
    double v = objective(family.build(x));
    ++r.evaluations;
    if (v < r.best) {
      r.best = v;
      r.argmin = x;
    }
    r.trajectory.push_back(r.best);
    return v;
  };
  auto initial_steps = [&] {
    std::vector<double> s(dims);
    for (std::size_t i = 0; i < dims; ++i) s[i] = 0.25 * (family.upper[i] - family.lower[i]);
    return s;
  };

  std::vector<double> x = family.start;
  clamp(x);
  double fx = evaluate(x);
  std::vector<double> step = initial_steps();
  while (r.evaluations < budget) {
    bool improved = false;
    for (std::size_t i = 0; i < dims && !improved && r.evaluations < budget; ++i) {
      for (int dir : {1, -1}) {
        if (r.evaluations >= budget) break;
        std::vector<double> y = x;
        y[i] += dir * step[i];
        clamp(y);
        if (y[i] == x[i]) continue;
        double fy = evaluate(y);
        if (fy < fx) {
          x = std::move(y);
          fx = fy;
          improved = true;
          break;
        }
      }
    }
    if (improved || r.evaluations >= budget) continue;
    bool converged = true;
    for (std::size_t i = 0; i < dims; ++i) {
      step[i] *= 0.5;
      double range = family.upper[i] - family.lower[i];
      if (step[i] > 1e-3 * range) converged = false;
    }
    if (converged) {
      for (std::size_t i = 0; i < dims; ++i)
        x[i] = std::uniform_real_distribution<double>(family.lower[i], family.upper[i])(rng);
      fx = evaluate(x);
      step = initial_steps();
    }
  }
  r.budget_exhausted = true;
  return r;
}

}  // namespace lpup
