#include "lpup/cli.hpp"

#include "lpup/diagnostics.hpp"
#include "lpup/io.hpp"
#include "lpup/parallel.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

namespace lpup::cli {

namespace {

constexpr const char* kVersion = "1.0.0";

// ---------------------------------------------------------------------------
// Config access

const Json& need(const Json& j, const std::string& key) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError("missing key '" + key + "'");
  return j.at(key);
}

double number(const Json& v, const std::string& what) {
  if (!v.is_number()) throw ConfigError("'" + what + "' must be a number");
  return v.get<double>();
}

double number(const Json& j, const std::string& key, double fallback) {
  return j.contains(key) ? number(j.at(key), key) : fallback;
}

std::size_t count(const Json& j, const std::string& key, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_number_unsigned()) throw ConfigError("'" + key + "' must be a non-negative integer");
  return v.get<std::size_t>();
}

std::string text(const Json& j, const std::string& key, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) throw ConfigError("'" + key + "' must be a string");
  return j.at(key).get<std::string>();
}

std::vector<double> vec(const Json& j, const std::string& key) {
  if (!j.contains(key)) return {};
  const Json& v = j.at(key);
  if (!v.is_array()) throw ConfigError("'" + key + "' must be an array");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(number(x, key));
  return out;
}

// Numbers are taken through their shortest decimal form, so 0.25 is 1/4.
std::string exact_text(const Json& v, const std::string& what) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return v.dump();
  throw ConfigError("'" + what + "' must be a number or a string");
}

Rational rational(const Json& v, const std::string& what) {
  try {
    return parse_rational(exact_text(v, what));
  } catch (const std::exception& e) {
    throw ConfigError("'" + what + "': " + e.what());
  }
}

Index index(const Json& v, const std::string& what) {
  try {
    return Index::parse(exact_text(v, what));
  } catch (const std::exception& e) {
    throw ConfigError("'" + what + "': " + e.what());
  }
}

SideParams side(const Json& j, int n) {
  SideParams s;
  s.n = n;
  s.a = index(need(j, "a"), "a");
  s.b = rational(need(j, "b"), "b");
  s.k = index(need(j, "k"), "k");
  return s;
}

LinearFlow flow(const Json& j) {
  std::string f = text(j, "flow", "schrodinger");
  if (f == "schrodinger") return LinearFlow::schrodinger;
  if (f == "heat") return LinearFlow::heat;
  throw ConfigError("unknown flow '" + f + "'");
}

std::vector<double> times(const Json& j) {
  const Json& t = need(j, "times");
  double lo = number(need(t, "lo"), "times.lo");
  double hi = number(need(t, "hi"), "times.hi");
  std::size_t c = count(t, "count", 12);
  if (!(lo > 0) || !(hi > lo) || c < 2) throw ConfigError("times need 0 < lo < hi and count >= 2");
  return geometric_grid(lo, hi, c);
}

IndicatorSet omega(const Json& j) {
  if (!j.contains("omega")) return FullSpace{};
  const Json& o = j.at("omega");
  std::string kind = text(o, "kind", "full");
  if (kind == "full") return FullSpace{};
  if (kind == "ball_complement") return BallComplement{vec(o, "center"), number(o, "radius", 1.0)};
  if (kind == "slabs") {
    PeriodicSlabs s;
    s.period = number(o, "period", 1.0);
    s.fill_fraction = number(o, "fill", 0.5);
    s.offset = number(o, "offset", 0.0);
    s.axis = static_cast<int>(count(o, "axis", 0));
    return s;
  }
  throw ConfigError("unknown omega kind '" + kind + "'");
}

struct DataSpec {
  std::string kind = "gaussian";
  GaussianPacket packet;
  double radius = 0.0;
  double sigma = 0.0;
  std::uint64_t seed = 0;

  bool plain_gaussian() const {
    if (kind != "gaussian" || packet.width.imag() != 0.0) return false;
    for (int d = 0; d < packet.dim; ++d)
      if (packet.center_coord(d) != 0.0 || packet.modulation_coord(d) != 0.0) return false;
    return true;
  }

  GridFunction sample(const Grid& grid) const {
    if (kind == "annular") return annular_packet(grid, radius, sigma);
    if (kind == "random") {
      std::mt19937_64 rng(seed);
      return random_packet_sum(grid.dim, grid.half_width, rng).sample(grid);
    }
    return packet.sample(grid);
  }
};

DataSpec data(const Json& j, const Grid& grid, std::uint64_t seed) {
  DataSpec d;
  if (!j.contains("data")) {
    d.packet.dim = grid.dim;
    return d;
  }
  const Json& s = j.at("data");
  d.kind = text(s, "kind", "gaussian");
  if (d.kind == "gaussian") {
    GaussianPacket& g = d.packet;
    g.dim = grid.dim;
    g.width = number(s, "width", 1.0);
    g.amplitude = number(s, "amplitude", 1.0);
    g.center = vec(s, "center");
    g.modulation = vec(s, "modulation");
    try {
      g.validate();
    } catch (const std::exception& e) {
      throw ConfigError(std::string("data: ") + e.what());
    }
    double lambda = number(s, "dilation", 1.0);
    if (!(lambda > 0)) throw ConfigError("data.dilation must be positive");
    g = dilate(g, lambda);
  } else if (d.kind == "annular") {
    d.radius = number(need(s, "radius"), "data.radius");
    d.sigma = number(need(s, "sigma"), "data.sigma");
    if (!(d.radius > 0) || !(d.sigma > 0)) throw ConfigError("annular data need positive radius and sigma");
  } else if (d.kind == "random") {
    d.seed = seed;
  } else {
    throw ConfigError("unknown data kind '" + d.kind + "'");
  }
  return d;
}

GridFunction safe_sample(const DataSpec& d, const Grid& grid) {
  GridFunction f = d.sample(grid);
  if (!f.truncation_safe())
    throw NumericalFailure("initial data truncated at the box boundary (tail ratio " +
                           std::to_string(f.tail_ratio()) + ")");
  return f;
}

// ---------------------------------------------------------------------------
// Plans

struct Plan {
  std::vector<std::pair<std::string, Verdict>> checks;
  bool open_endpoint = false;
  std::vector<std::string> superseded;  // groups that do not decide an open endpoint
  bool probe = false;  // run even when the hypotheses fail
  std::function<void(ExperimentRecord&)> run;

  bool decisive(const std::string& name) const {
    return std::find(superseded.begin(), superseded.end(), name) == superseded.end();
  }
  bool admissible() const {
    for (const auto& [name, v] : checks)
      if (decisive(name) && !v.admissible()) return false;
    return true;
  }
};

Verdict single(const std::string& statement, const std::string& violation, bool holds) {
  Verdict v;
  v.conditions.push_back({statement, violation, holds});
  return v;
}

class Tolerances {
 public:
  Tolerances(const Json& overrides, ExperimentRecord& record) : overrides_(overrides), record_(record) {}

  double operator()(const std::string& name, double fallback) {
    double v = number(overrides_, name, fallback);
    record_.tolerances[name] = v;
    return v;
  }

 private:
  const Json& overrides_;
  ExperimentRecord& record_;
};

// Both sides in the form a = k = p, b = 1 with the same p.
std::optional<Index> heisenberg_form(const SideParams& s1, const SideParams& s2) {
  auto form = [](const SideParams& s) { return s.b == 1 && s.a == s.k; };
  if (form(s1) && form(s2) && s1.a == s2.a) return s1.a;
  return std::nullopt;
}

void add_heisenberg(Plan& plan, int n, const SideParams& s1, const SideParams& s2) {
  auto p = heisenberg_form(s1, s2);
  if (!p) return;
  Status st = heisenberg_lp_status(n, *p);
  if (st == Status::unknown) {
    // The strict Fourier-pair range stops short of the endpoint.
    plan.open_endpoint = true;
    plan.superseded.push_back("Fourier-pair product");
  }
  plan.checks.emplace_back(
      "L^p Heisenberg form",
      single(st == Status::holds ? "p = " + p->str() + " below 2n/(n-1)"
                                 : "p = " + p->str() + " is an open endpoint (2n/(n-1) or inf)",
             "p above 2n/(n-1): the product inequality fails", st != Status::fails));
}

Plan plan_up_product(const RunConfig& c) {
  const int n = c.grid.dim;
  const Json& p = c.params;
  SideParams s1 = side(need(p, "side1"), n);
  SideParams s2 = side(need(p, "side2"), n);
  DataSpec d = data(p, c.grid, c.seed);
  auto x0 = vec(p, "x0");
  auto xi0 = vec(p, "xi0");
  Plan plan;
  plan.checks.emplace_back("Fourier-pair product", thm2_admissible(n, s1, s2));
  add_heisenberg(plan, n, s1, s2);
  plan.run = [=, grid = c.grid, tol_in = c.tolerances](ExperimentRecord& r) {
    Tolerances tol(tol_in, r);
    GridFunction f = safe_sample(d, grid);
    ProductResult res = up_product(f, s1, s2, x0, xi0);
    r.measured = Json{{"product", res.product},
                      {"factor1", res.factor1},
                      {"factor2", res.factor2},
                      {"exponent1", res.exponent1},
                      {"exponent2", res.exponent2}};
    auto two = [](const SideParams& s) { return s.a == Index(2) && s.k == Index(2) && s.b == 1; };
    r.ok = std::isfinite(res.product) && res.product > 0;
    if (d.plain_gaussian() && two(s1) && two(s2) && x0.empty() && xi0.empty()) {
      double pred = std::pow(n / 2.0, 1.0 / n);
      r.predict("product", pred, "centered gaussian (n/2)^(1/n)");
      double rel = std::abs(res.product - pred) / pred;
      r.measured["rel_err"] = rel;
      r.ok = r.ok && rel <= tol("product_rel", 5e-3);
    }
  };
  return plan;
}

Plan plan_lemma_corpus(const RunConfig& c) {
  const int n = c.grid.dim;
  const Json& p = c.params;
  PacketFamily fam;
  fam.kind = PacketFamily::Kind::random_corpus;
  fam.dim = n;
  fam.count = count(p, "members", 100);
  fam.seed = c.seed;
  Plan plan;
  std::optional<Lemma1Spec> l1;
  if (p.contains("lemma1")) {
    const Json& j = p.at("lemma1");
    l1 = Lemma1Spec{index(need(j, "a"), "a"), rational(need(j, "b"), "b"), rational(need(j, "s"), "s"),
                    index(need(j, "p"), "p")};
    plan.checks.emplace_back("moment lemma", lemma1_admissible(n, l1->a, l1->b, l1->s, l1->p));
  }
  std::vector<Lemma2Tuple> l2;
  if (p.contains("lemma2")) {
    for (const auto& t : p.at("lemma2")) {
      if (!t.is_array() || t.size() != 4) throw ConfigError("lemma2 entries are [k, p, q, m]");
      l2.push_back({index(t[0], "k"), index(t[1], "p"), index(t[2], "q"), index(t[3], "m")});
      const auto& b = l2.back();
      plan.checks.emplace_back("norm-ratio lemma (" + b.k.str() + "," + b.p.str() + "," + b.q.str() + "," +
                                   b.m.str() + ")",
                               lemma2_admissible(b.k, b.p, b.q, b.m));
    }
  }
  if (!l1 && l2.empty()) throw ConfigError("lemma_corpus needs 'lemma1' and/or 'lemma2'");
  plan.run = [=, grid = c.grid](ExperimentRecord& r) {
    CorpusSummary s = lemma_corpus_sweep(grid, fam.members(grid), l1, l2);
    r.measured = Json{{"members", s.members},
                      {"lemma1_violations", s.lemma1_violations},
                      {"half_mass_violations", s.half_mass_violations},
                      {"lemma2_violations", s.lemma2_violations},
                      {"lemma1_min_ratio", s.lemma1_min_ratio},
                      {"half_mass_max_ratio", s.half_mass_max_ratio},
                      {"lemma2_min_ratio", s.lemma2_min_ratio}};
    r.ok = s.lemma1_violations == 0 && s.half_mass_violations == 0 && s.lemma2_violations == 0;
  };
  return plan;
}

Series fit_series(const PowerFit& fit, const std::string& value_column) {
  Series s{"trace", {"t", value_column}, {}};
  for (std::size_t i = 0; i < fit.times.size(); ++i) s.rows.push_back({fit.times[i], fit.values[i]});
  return s;
}

void store_fit(ExperimentRecord& r, const GrowthResult& g) {
  r.measured = Json{{"slope", g.fit.slope},
                    {"intercept", g.fit.intercept},
                    {"rel_err", g.rel_err},
                    {"samples", g.fit.times.size()},
                    {"excluded_times", g.fit.excluded}};
  r.predict("slope", g.predicted, g.formula);
  r.series.push_back(fit_series(g.fit, "moment"));
}

Plan plan_moment_growth(const RunConfig& c) {
  const int n = c.grid.dim;
  const Json& p = c.params;
  LinearFlow fl = flow(p);
  Index a = index(need(p, "a"), "a");
  Rational b = rational(need(p, "b"), "b");
  std::string method = text(p, "method", "analytic");
  TraceMethod m;
  if (method == "analytic") m = TraceMethod::analytic;
  else if (method == "multiplier") m = TraceMethod::multiplier;
  else if (method == "far_field") m = TraceMethod::far_field;
  else throw ConfigError("unknown method '" + method + "'");
  DataSpec d = data(p, c.grid, c.seed);
  if (m == TraceMethod::analytic && d.kind != "gaussian") throw ConfigError("analytic traces need gaussian data");
  auto t = times(p);
  auto x0 = vec(p, "center");
  Plan plan;
  plan.checks.emplace_back("moment growth", moment_growth_admissible(n, a, b));
  plan.run = [=, grid = c.grid, tol_in = c.tolerances](ExperimentRecord& r) {
    Tolerances tol(tol_in, r);
    GrowthResult g = m == TraceMethod::analytic
                         ? moment_growth_fit(fl, d.packet, a.to_double(), to_double(b), t)
                         : moment_growth_fit(fl, m, safe_sample(d, grid), a.to_double(), to_double(b), x0, t);
    store_fit(r, g);
    r.ok = g.rel_err <= tol("slope_rel", 1e-2);
  };
  return plan;
}

Plan plan_wave(const RunConfig& c) {
  const int n = c.grid.dim;
  const Json& p = c.params;
  Index a = index(need(p, "a"), "a");
  Rational b = rational(need(p, "b"), "b");
  double nd = number(p, "n_dyadic", 1.0);
  DataSpec d = data(p, c.grid, c.seed);
  auto t = times(p);
  Plan plan;
  plan.checks.emplace_back("projected wave moment", moment_growth_admissible(n, a, b));
  plan.checks.emplace_back("dyadic annulus",
                           single("annulus N/2..11N/10 resolved by the grid", "annulus not resolved by the grid",
                                  lp_resolvable(c.grid, nd)));
  plan.run = [=, grid = c.grid, tol_in = c.tolerances](ExperimentRecord& r) {
    Tolerances tol(tol_in, r);
    GridFunction u = safe_sample(d, grid);
    WaveGrowthResult w = wave_energy_growth({u, GridFunction::zeros(grid)}, nd, a.to_double(), to_double(b), t);
    r.measured = Json{{"slope", w.fit.slope},
                      {"energy_drift", w.energy_drift},
                      {"samples", w.fit.times.size()},
                      {"excluded_times", w.fit.excluded}};
    r.predict("slope_lower", w.predicted_lower, "(dim-1)*(1/a+b/dim-1/2)");
    r.series.push_back(fit_series(w.fit, "moment"));
    Series e{"energy", {"t", "projected_energy"}, {}};
    for (std::size_t i = 0; i < t.size(); ++i) e.rows.push_back({t[i], w.energies[i]});
    r.series.push_back(std::move(e));
    r.ok = w.fit.slope >= w.predicted_lower - tol("slope_margin", 0.05) &&
           w.energy_drift <= tol("energy_drift", 1e-6);
  };
  return plan;
}

Verdict window_verdict(double T, double dt) {
  Verdict v;
  v.conditions.push_back({"T > 0", "T not positive", T > 0});
  double steps = T / dt;
  bool whole = dt > 0 && std::abs(steps - std::round(steps)) <= 1e-9 * steps && std::round(steps) >= 1;
  v.conditions.push_back({"T a whole multiple of dt", "T not a whole multiple of dt", whole});
  return v;
}

Plan plan_schrodinger_observability(const RunConfig& c) {
  const Json& p = c.params;
  IndicatorSet om = omega(p);
  double T = number(need(p, "T"), "T");
  double dt = number(p, "dt", T / 64);
  std::vector<DataSpec> family;
  if (p.contains("family")) {
    for (const auto& member : p.at("family")) family.push_back(data(Json{{"data", member}}, c.grid, c.seed));
    if (family.empty()) throw ConfigError("empty family");
  } else {
    family.push_back(data(p, c.grid, c.seed));
  }
  Plan plan;
  plan.checks.emplace_back("time window", window_verdict(T, dt));
  plan.run = [=, grid = c.grid, tol_in = c.tolerances](ExperimentRecord& r) {
    Tolerances tol(tol_in, r);
    validate_indicator(om, grid);
    std::vector<GridFunction> fs;
    for (const auto& d : family) fs.push_back(safe_sample(d, grid));
    FamilyInfimum inf = schrodinger_observability_family(fs, om, T, dt);
    r.measured = Json{{"ratio", inf.value}, {"argmin", inf.argmin}};
    Series s{"family", {"member", "ratio"}, {}};
    for (std::size_t i = 0; i < inf.values.size(); ++i) s.rows.push_back({static_cast<double>(i), inf.values[i]});
    r.series.push_back(std::move(s));
    r.ok = inf.value > 0;
    if (std::holds_alternative<FullSpace>(om)) {
      r.predict("ratio", std::sqrt(T), "sqrt(T)");
      double rel = std::abs(inf.value - std::sqrt(T)) / std::sqrt(T);
      r.measured["rel_err"] = rel;
      r.ok = rel <= tol("ratio_rel", 1e-6);
    }
  };
  return plan;
}

Plan plan_heat_observability(const RunConfig& c) {
  const Json& p = c.params;
  IndicatorSet om = omega(p);
  double T = number(need(p, "T"), "T");
  double dt = number(p, "dt", T / 64);
  double R = number(need(p, "R"), "R");
  const Json& th = need(p, "thick");
  double side_len = number(need(th, "side"), "thick.side");
  double gamma = number(need(th, "gamma"), "thick.gamma");
  DataSpec d = data(p, c.grid, c.seed);
  Plan plan;
  plan.checks.emplace_back("time window", window_verdict(T, dt));
  plan.checks.emplace_back("band limit", single("R > 0", "R not positive", R > 0));
  try {
    validate_indicator(om, c.grid);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("omega: ") + e.what());
  }
  plan.checks.emplace_back("thick set", single("omega is (" + std::to_string(side_len) + ", " +
                                                   std::to_string(gamma) + ")-thick",
                                               "omega not thick", thickness_check(om, c.grid, side_len, gamma)));
  plan.run = [=, grid = c.grid](ExperimentRecord& r) {
    GridFunction u0 = band_limit(safe_sample(d, grid), R);
    HeatObservability h = heat_observability(u0, R, om, T, dt, side_len, gamma);
    r.measured = Json{{"ratio", h.ratio},
                      {"floor", h.floor},
                      {"ratio_over_floor", h.ratio / h.floor},
                      {"final_norm", h.final_norm},
                      {"initial_norm", h.initial_norm}};
    r.predict("final_norm_lower", h.floor * h.initial_norm, "exp(-T*R^2)*|u0|_2");
    r.tolerances["intermediate_rel"] = 1e-10;
    r.ok = h.intermediate_ok;
  };
  return plan;
}

Plan plan_thickness(const RunConfig& c) {
  const Json& p = c.params;
  IndicatorSet om = omega(p);
  double side_len = number(need(p, "side"), "side");
  double gamma = number(need(p, "gamma"), "gamma");
  Plan plan;
  plan.checks.emplace_back("thickness query", single("0 < gamma <= 1 and side > 0", "bad side or density",
                                                     side_len > 0 && gamma > 0 && gamma <= 1));
  plan.run = [=, grid = c.grid](ExperimentRecord& r) {
    bool thick = thickness_check(om, grid, side_len, gamma);
    r.measured = Json{{"thick", thick}};
    r.ok = thick;
  };
  return plan;
}

Plan plan_thm5(const RunConfig& c) {
  const int n = c.grid.dim;
  const Json& p = c.params;
  LinearFlow fl = flow(p);
  IndicatorSet om = omega(p);
  double T = number(need(p, "T"), "T");
  double dt = number(p, "dt", T / 64);
  SideParams s1 = side(need(p, "side1"), n);
  SideParams s2 = side(need(p, "side2"), n + 1);
  auto c1 = vec(p, "center1");
  auto c2 = vec(p, "center2");
  double R = number(p, "R", 0.0);
  DataSpec d = data(p, c.grid, c.seed);
  Plan plan;
  plan.checks.emplace_back("spacetime product", thm5_admissible(n, s1, s2));
  plan.checks.emplace_back("time window", window_verdict(T, dt));
  plan.run = [=, grid = c.grid](ExperimentRecord& r) {
    GridFunction u0 = safe_sample(d, grid);
    if (fl == LinearFlow::heat && R > 0) u0 = band_limit(u0, R);
    SpacetimeProduct s = thm5_product(fl, u0, om, T, dt, s1, s2, c1, c2, R);
    r.measured = Json{{"product", s.product},
                      {"factor1", s.factor1},
                      {"factor2", s.factor2},
                      {"exponent1", s.exponent1},
                      {"exponent2", s.exponent2},
                      {"floor", s.floor}};
    r.ok = std::isfinite(s.product) && s.product > 0;
  };
  return plan;
}

Plan plan_minimizer(const RunConfig& c) {
  const int n = c.grid.dim;
  const Json& p = c.params;
  SideParams s1 = side(need(p, "side1"), n);
  SideParams s2 = side(need(p, "side2"), n);
  std::string family = text(p, "family", "gaussian_width");
  if (family != "gaussian_width" && family != "translated_bumps")
    throw ConfigError("unknown family '" + family + "'");
  std::size_t bumps = count(p, "bumps", 2);
  double max_spread = number(p, "max_spread", 4.0);
  std::size_t budget = count(p, "budget", 40);
  if (budget == 0) throw ConfigError("budget must be positive");
  Plan plan;
  plan.probe = p.value("probe", false);
  plan.checks.emplace_back("Fourier-pair product", thm2_admissible(n, s1, s2));
  add_heisenberg(plan, n, s1, s2);
  plan.run = [=, grid = c.grid, seed = c.seed](ExperimentRecord& r) {
    ParametricFamily fam = family == "gaussian_width" ? gaussian_width_family(grid)
                                                      : translated_bumps_family(grid, bumps, seed, max_spread);
    auto objective = [&](const GridFunction& f) {
      if (!f.truncation_safe()) throw NumericalFailure("family member truncated at the box boundary");
      return up_product(f, s1, s2, {}, {}, false).product;
    };
    MinimizerResult m = product_minimizer(fam, objective, budget, seed);
    r.measured = Json{{"best", m.best},
                      {"argmin", m.argmin},
                      {"evaluations", m.evaluations},
                      {"budget_exhausted", m.budget_exhausted}};
    Series s{"trajectory", {"evaluation", "best"}, {}};
    for (std::size_t i = 0; i < m.trajectory.size(); ++i)
      s.rows.push_back({static_cast<double>(i + 1), m.trajectory[i]});
    r.series.push_back(std::move(s));
    r.ok = std::isfinite(m.best);
  };
  return plan;
}

Plan plan_nls(const RunConfig& c) {
  const int n = c.grid.dim;
  const Json& p = c.params;
  DataSpec d = data(p, c.grid, c.seed);
  const Json& pj = need(p, "potential");
  double coupling = number(pj, "coupling", 1.0);
  double sigma = number(pj, "decay", 2.0);
  Rational m = rational(pj.contains("order") ? pj.at("order") : Json(3), "order");
  Index xp = index(pj.contains("p") ? pj.at("p") : Json("inf"), "p");
  double profile_width = number(pj, "profile_width", 0.05);
  double T = number(need(p, "T"), "T");
  double dt = number(need(p, "dt"), "dt");
  std::size_t stride = count(p, "stride", 1);
  Index a = index(need(p, "a"), "a");
  Rational b = rational(need(p, "b"), "b");
  const Json& fit = need(p, "fit");
  double t_lo = number(need(fit, "t_lo"), "fit.t_lo");
  double t_hi = number(need(fit, "t_hi"), "fit.t_hi");
  std::optional<std::pair<double, std::size_t>> picard;
  if (p.contains("picard")) {
    const Json& q = p.at("picard");
    picard = std::make_pair(number(need(q, "T"), "picard.T"), count(q, "iterations", 6));
  }
  Plan plan;
  plan.checks.emplace_back("X_p contraction", lemma4_admissible(n, xp, m));
  plan.checks.emplace_back("moment growth", moment_growth_admissible(n, a, b));
  plan.checks.emplace_back("decay", single("sigma = " + std::to_string(sigma) + " > 1", "sigma not above 1",
                                           eta_condition_check(sigma)));
  plan.checks.emplace_back("time window", window_verdict(T, dt));
  plan.run = [=, grid = c.grid, tol_in = c.tolerances](ExperimentRecord& r) {
    Tolerances tol(tol_in, r);
    GridFunction u0 = safe_sample(d, grid);
    GaussianPacket prof;
    prof.dim = grid.dim;
    prof.width = profile_width;
    PotentialSpec pot = separable_potential(coupling, sigma, grid.dim, xp.to_double(), to_double(m), prof.sample(grid));
    EvolutionTrace tr = nls_split_step(u0, pot, T, dt, stride);
    double m0 = lp_norm(u0, 2.0);
    double drift = 0.0;
    Series mass{"mass", {"t", "mass"}, {}};
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      double mi = lp_norm(tr.snapshots[i], 2.0);
      drift = std::max(drift, std::abs(mi - m0) / m0);
      mass.rows.push_back({tr.times[i], mi});
    }
    GrowthResult g = trace_growth_fit(tr, a.to_double(), to_double(b), {}, t_lo, t_hi);
    store_fit(r, g);
    r.measured["mass_drift"] = drift;
    r.series.push_back(std::move(mass));
    r.ok = drift <= tol("mass_drift", 1e-8) && g.rel_err <= tol("slope_rel", 2e-2);
    if (picard) {
      PicardResult pr = duhamel_picard(u0, pot, picard->first, dt, picard->second, xp.to_double());
      double worst = 0.0;
      for (std::size_t k = 1; k + 1 < pr.distances.size(); ++k)
        if (pr.distances[k] > 1e-15) worst = std::max(worst, pr.distances[k + 1] / pr.distances[k]);
      EvolutionTrace ref = nls_split_step(u0, pot, picard->first, dt, 1);
      const GridFunction& a1 = pr.trace.snapshots.back();
      const GridFunction& b1 = ref.snapshots.back();
      double agree = lp_norm(a1 - b1, 2.0) / lp_norm(b1, 2.0);
      r.measured["picard_iterations"] = pr.iterations;
      r.measured["picard_contracting"] = pr.contracting;
      r.measured["picard_worst_ratio"] = worst;
      r.measured["picard_split_step_distance"] = agree;
      Series ds{"picard", {"iteration", "distance"}, {}};
      for (std::size_t k = 0; k < pr.distances.size(); ++k)
        ds.rows.push_back({static_cast<double>(k), pr.distances[k]});
      r.series.push_back(std::move(ds));
      r.ok = r.ok && pr.contracting && worst < tol("picard_ratio", 0.5) && agree <= tol("picard_agreement", 1e-3);
    }
  };
  return plan;
}

const std::map<std::string, std::function<Plan(const RunConfig&)>>& planners() {
  static const std::map<std::string, std::function<Plan(const RunConfig&)>> table = {
      {"up_product", plan_up_product},
      {"lemma_corpus", plan_lemma_corpus},
      {"moment_growth", plan_moment_growth},
      {"wave_energy_growth", plan_wave},
      {"schrodinger_observability", plan_schrodinger_observability},
      {"heat_observability", plan_heat_observability},
      {"thickness", plan_thickness},
      {"thm5_product", plan_thm5},
      {"product_minimizer", plan_minimizer},
      {"nls", plan_nls},
  };
  return table;
}

Plan make_plan(const RunConfig& c) {
  auto it = planners().find(c.experiment);
  if (it == planners().end()) throw ConfigError("unknown experiment '" + c.experiment + "'");
  try {
    return it->second(c);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

std::string violations_text(const Plan& plan) {
  std::string out;
  for (const auto& [name, v] : plan.checks)
    if (plan.decisive(name))
      for (const auto& s : v.violations()) out += (out.empty() ? "" : "; ") + name + ": " + s;
  return out;
}

std::string six(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

std::string summary(const ExperimentRecord& r, double seconds) {
  std::ostringstream s;
  s << r.tag << ": " << (r.ok ? "PASS" : "FAIL");
  for (const auto& [key, value] : r.measured.items()) {
    if (value.is_number_float()) s << ' ' << key << '=' << six(value.get<double>());
    else if (value.is_number_integer() || value.is_boolean()) s << ' ' << key << '=' << value.dump();
  }
  s << " runtime=" << six(seconds) << "s";
  return s.str();
}

std::filesystem::path resolve_out(const std::string& flag, const RunConfig& config) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("LPUP_OUT_DIR"); env && *env) return env;
  if (!config.output_dir.empty()) return config.output_dir;
  return ".";
}

Json* walk(Json& doc, const std::string& axis) {
  Json* node = &doc;
  std::size_t pos = 0;
  while (true) {
    std::size_t dot = axis.find('.', pos);
    std::string key = axis.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    if (key.empty()) throw ConfigError("bad axis '" + axis + "'");
    if (!node->is_object()) throw ConfigError("axis '" + axis + "' does not name an object path");
    node = &(*node)[key];
    if (dot == std::string::npos) return node;
    pos = dot + 1;
  }
}

Json axis_value(const std::string& raw) {
  Json v = Json::parse(raw, nullptr, false);
  if (v.is_discarded()) return raw;
  return v;
}

std::string member_dir(std::size_t i, const std::string& raw) {
  std::string safe;
  for (char ch : raw) safe.push_back(std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '-' ? ch : '_');
  std::ostringstream s;
  s << std::setw(3) << std::setfill('0') << i << '_' << safe;
  return s.str();
}

}  // namespace

// ---------------------------------------------------------------------------

Json RunConfig::to_json() const {
  return Json{{"experiment", experiment},
              {"grid", grid_json(grid)},
              {"params", params},
              {"seed", seed},
              {"tolerances", tolerances}};
}

std::vector<std::string> experiment_tags() {
  std::vector<std::string> out;
  for (const auto& [tag, fn] : planners()) out.push_back(tag);
  return out;
}

RunConfig parse_config(const Json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig c;
  const Json& e = need(doc, "experiment");
  if (!e.is_string()) throw ConfigError("'experiment' must be a string");
  c.experiment = e.get<std::string>();
  if (!planners().count(c.experiment)) throw ConfigError("unknown experiment '" + c.experiment + "'");
  const Json& g = need(doc, "grid");
  c.grid.dim = static_cast<int>(count(g, "dim", 1));
  c.grid.half_width = number(need(g, "half_width"), "grid.half_width");
  c.grid.points = count(g, "points", 0);
  try {
    c.grid.validate();
  } catch (const std::exception& ex) {
    throw ConfigError(std::string("grid: ") + ex.what());
  }
  if (doc.contains("params")) {
    c.params = doc.at("params");
    if (!c.params.is_object()) throw ConfigError("'params' must be an object");
  }
  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned()) throw ConfigError("'seed' must be a non-negative integer");
    c.seed = doc.at("seed").get<std::uint64_t>();
  }
  c.output_dir = text(doc, "output_dir", "");
  if (doc.contains("tolerances")) {
    c.tolerances = doc.at("tolerances");
    if (!c.tolerances.is_object()) throw ConfigError("'tolerances' must be an object");
    for (const auto& [k, v] : c.tolerances.items())
      if (!v.is_number()) throw ConfigError("tolerance '" + k + "' must be a number");
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  Json doc = Json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw ConfigError("config " + path.string() + " is not valid JSON");
  return parse_config(doc);
}

int check_params(const RunConfig& config, std::ostream& out) {
  Plan plan = make_plan(config);
  for (const auto& [name, v] : plan.checks) {
    out << name << (plan.decisive(name) ? "" : " (not decisive at the open endpoint)") << '\n';
    for (const auto& cond : v.conditions)
      out << "  [" << (cond.holds ? "ok" : "violated") << "] " << (cond.holds ? cond.statement : cond.violation)
          << '\n';
  }
  if (!plan.admissible()) {
    out << "VIOLATION: " << violations_text(plan) << '\n';
    return ExitCode::violation;
  }
  if (plan.open_endpoint) {
    out << "UNKNOWN (open endpoint)\n";
    return ExitCode::unknown;
  }
  out << "ADMISSIBLE\n";
  return ExitCode::ok;
}

RunOutcome run(const RunConfig& config, const std::filesystem::path& out_dir) {
  RunOutcome o;
  Plan plan;
  try {
    plan = make_plan(config);
  } catch (const std::exception& e) {
    o.code = ExitCode::usage;
    o.message = e.what();
    return o;
  }
  if (!plan.probe) {
    if (!plan.admissible()) {
      o.code = ExitCode::violation;
      o.message = "hypothesis violated: " + violations_text(plan);
      return o;
    }
    if (plan.open_endpoint) {
      o.code = ExitCode::unknown;
      o.message = "UNKNOWN (open endpoint); set \"probe\": true to run anyway";
      return o;
    }
  }
  ExperimentRecord r;
  r.tag = config.experiment;
  r.params = config.to_json();
  take_warnings();
  auto start = std::chrono::steady_clock::now();
  try {
    plan.run(r);
  } catch (const NumericalFailure& e) {
    take_warnings();
    o.code = ExitCode::numerical;
    o.message = std::string("numerical failure: ") + e.what() +
                "; enlarge the grid (larger half_width, more points) or shorten the time window";
    return o;
  } catch (const std::exception& e) {
    take_warnings();
    o.code = ExitCode::usage;
    o.message = std::string("invalid configuration: ") + e.what();
    return o;
  }
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.measured["warnings"] = warning_summary(take_warnings());
  r.provenance = Json{{"program", "lpup"},
                      {"version", kVersion},
                      {"seed", config.seed},
                      {"admissible", plan.admissible()},
                      {"open_endpoint", plan.open_endpoint}};
  try {
    o.path = write_record(out_dir, r);
  } catch (const std::exception& e) {
    o.code = ExitCode::usage;
    o.message = std::string("cannot write record: ") + e.what();
    return o;
  }
  o.message = summary(r, seconds);
  o.code = r.ok ? ExitCode::ok : ExitCode::violation;
  o.record = std::move(r);
  return o;
}

int sweep(const Json& doc, const std::string& axis, const std::vector<std::string>& values,
          const std::filesystem::path& out_dir, std::ostream& out, std::ostream& err) {
  if (values.empty()) {
    out << "empty sweep, nothing to do\n";
    return ExitCode::ok;
  }
  Json members = Json::array();
  int worst = ExitCode::ok;
  for (std::size_t i = 0; i < values.size(); ++i) {
    Json member = doc;
    std::string dir = member_dir(i, values[i]);
    RunOutcome o;
    try {
      *walk(member, axis) = axis_value(values[i]);
      o = run(parse_config(member), out_dir / dir);
    } catch (const std::exception& e) {
      o.code = ExitCode::usage;
      o.message = e.what();
    }
    (o.code == ExitCode::ok ? out : err) << axis << '=' << values[i] << ": " << o.message << '\n';
    Json entry{{"value", values[i]}, {"exit_code", o.code}, {"directory", dir}};
    entry["record"] = o.path.empty() ? Json(nullptr) : Json(o.path.filename().string());
    if (o.code != ExitCode::ok) entry["message"] = o.message;
    members.push_back(std::move(entry));
    worst = std::max(worst, o.code);
  }
  std::filesystem::create_directories(out_dir);
  std::ofstream(out_dir / "sweep.json") << Json{{"axis", axis}, {"members", members}}.dump(2) << '\n';
  return worst;
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"L^p uncertainty experiments"};
  app.require_subcommand(1);
  std::string config_path, out_flag, axis, values;
  unsigned threads = 0;
  std::optional<std::uint64_t> seed;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment config (JSON)")->required();
    sub->add_option("--out", out_flag, "output directory");
    sub->add_option("--threads", threads, "worker cap (0 = all cores)");
    sub->add_option("--seed", seed, "overrides the config seed");
  };
  CLI::App* check = app.add_subcommand("check-params", "print each hypothesis with its verdict");
  CLI::App* runner = app.add_subcommand("run", "run one experiment and write its record");
  CLI::App* sweeper = app.add_subcommand("sweep", "run an experiment across a parameter axis");
  common(check);
  common(runner);
  common(sweeper);
  sweeper->add_option("--axis", axis, "dotted path into the config, e.g. params.R")->required();
  sweeper->add_option("--values", values, "comma-separated values")->required();
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return ExitCode::ok;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return ExitCode::usage;
  }

  if (!threads) {
    if (const char* env = std::getenv("LPUP_THREADS"); env && *env) {
      try {
        threads = static_cast<unsigned>(std::stoul(env));
      } catch (const std::exception&) {
        err << "LPUP_THREADS must be a non-negative integer\n";
        return ExitCode::usage;
      }
    }
  }
  set_max_threads(threads);

  try {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot open config " + config_path);
    Json doc = Json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw ConfigError("config " + config_path + " is not valid JSON");
    if (seed) doc["seed"] = *seed;
    RunConfig config = parse_config(doc);
    if (check->parsed()) return check_params(config, out);
    std::filesystem::path dir = resolve_out(out_flag, config);
    if (runner->parsed()) {
      RunOutcome o = run(config, dir);
      if (o.code == ExitCode::ok || o.record) {
        out << o.message << '\n';
        if (!o.path.empty()) out << "record: " << o.path.string() << '\n';
      } else {
        err << o.message << '\n';
      }
      return o.code;
    }
    std::vector<std::string> list;
    std::stringstream ss(values);
    for (std::string item; std::getline(ss, item, ',');)
      if (!item.empty()) list.push_back(item);
    return sweep(doc, axis, list, dir, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    std::string tags;
    for (const auto& t : experiment_tags()) tags += (tags.empty() ? "" : ", ") + t;
    err << "experiments: " << tags << '\n';
    return ExitCode::usage;
  }
}

}  // namespace lpup::cli
