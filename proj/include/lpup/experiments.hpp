#pragma once

// Experiment harnesses: uncertainty products, the two lemmas with explicit
// constants, moment-growth fits, projected wave energy growth,
// observability ratios, spacetime products and a derivative-free search for
// small products.  Results are collected in ExperimentRecord documents.

#include "lpup/field.hpp"
#include "lpup/oracles.hpp"
#include "lpup/params.hpp"
#include "lpup/propagators.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace lpup {

using Json = nlohmann::ordered_json;

/// Columns of a (t, value)-style series, written as CSV.
struct Series {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::string to_csv() const;
};

struct ExperimentRecord {
  std::string tag;
  Json params = Json::object();
  Json measured = Json::object();
  Json predicted = Json::object();
  bool ok = true;
  Json tolerances = Json::object();
  Json provenance = Json::object();
  std::vector<Series> series;

  /// Stores {value, formula} under predicted[name].
  void predict(const std::string& name, double value, const std::string& formula);
  Json to_json() const;
  /// Two-space indented JSON with shortest round-trip doubles.
  std::string dump() const;
};

Json grid_json(const Grid& grid);
Json side_json(const SideParams& side);
/// Groups warnings by the text before the first ':' as
/// [{source, count, first}], in order of first appearance.
Json warning_summary(const std::vector<std::string>& warnings);

// ---------------------------------------------------------------------------
// Test functions

/// Finite sum of Gaussian packets.
struct PacketSum {
  std::vector<GaussianPacket> parts;

  GridFunction sample(const Grid& grid) const;
  Json to_json() const;
};

/// Up to five Gaussians with widths in [1/2, 2], centers in the inner half
/// box [-L/2, L/2]^dim and complex amplitudes with modulus ≤ 1.
PacketSum random_packet_sum(int dim, double half_width, std::mt19937_64& rng);

/// Radial data with f̂(ξ) = e^{-(|ξ|-radius)²/(2σ²)}, frequency-localised to
/// a thin annulus.
GridFunction annular_packet(const Grid& grid, double radius, double sigma);

struct PacketFamily {
  enum class Kind { gaussian_sweep, translated, random_corpus };
  Kind kind = Kind::random_corpus;
  int dim = 1;
  std::vector<double> widths = {1.0};  // gaussian_sweep: one member per width; translated: widths[0]
  std::size_t count = 1;               // translated: bumps; random_corpus: members
  double spread = 1.0;                 // translated: positions drawn in [-spread, spread]^dim
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument when a member is not truncation-safe.
  std::vector<PacketSum> members(const Grid& grid) const;
  Json to_json() const;
};

// ---------------------------------------------------------------------------
// Uncertainty products and lemmas

struct ProductResult {
  double product = 0.0;
  double factor1 = 0.0;    // ‖|x-x0|^{b1} f‖_{a1} / ‖f‖_{k1}
  double factor2 = 0.0;    // ‖|ξ-ξ0|^{b2} f̂‖_{a2} / ‖f̂‖_{k2}
  double exponent1 = 0.0;  // applied to factor1: 1/a2 + b2/n - 1/k2
  double exponent2 = 0.0;  // applied to factor2: 1/a1 + b1/n - 1/k1
};

/// Fourier-pair product.  Throws std::invalid_argument unless
/// thm2_admissible holds (set check = false to probe outside the range).
ProductResult up_product(const GridFunction& f, const SideParams& side1, const SideParams& side2,
                         const std::vector<double>& x0 = {}, const std::vector<double>& xi0 = {},
                         bool check = true);

struct Lemma1Result {
  double lhs = 0.0;        // ‖|x-x0|^b f‖_a
  double rhs = 0.0;        // explicit lower bound
  double threshold = 0.0;  // radius T
  double inner_mass = 0.0; // ∫_{|x-x0|≤T} |f|^p
  double half_mass = 0.0;  // ½‖f‖_p^p
  double inner_bound = 0.0;  // half_mass corrected for the discrete ball measure
  bool ok = false;
  bool half_mass_ok = false;
};

/// Moment lower bound with the constant from the half-mass argument:
///   T = v_n^{-1/n} (‖f‖_p / (2^{1/p}‖f‖_{ps'}))^{ps/n},
///   ‖|x|^b f‖_a ≥ (½‖f‖_p^p / W(T))^{1/p},
///   W(T) = ‖|x|^{-bp}‖_{L^{a/(a-p)}(|x|≥T)} = (ω_{n-1}/(bpr-n))^{1/r} T^{n/r-bp}, r = a/(a-p).
Lemma1Result lemma1_check(const GridFunction& f, const Index& a, const Rational& b,
                          const Rational& s, const Index& p, const std::vector<double>& x0 = {},
                          double tolerance = 1e-6);

struct Lemma2Result {
  double lhs = 0.0;  // ‖f‖_p / ‖f‖_k
  double rhs = 0.0;  // (‖f‖_q/‖f‖_m)^{(1/p-1/k)/(1/q-1/m)}
  bool ok = false;
};

Lemma2Result lemma2_check(const GridFunction& f, const Index& k, const Index& p, const Index& q,
                          const Index& m, double tolerance = 1e-10);

struct Lemma1Spec {
  Index a;
  Rational b;
  Rational s;
  Index p;
};

struct Lemma2Tuple {
  Index k;
  Index p;
  Index q;
  Index m;
};

struct CorpusSummary {
  std::size_t members = 0;
  std::size_t lemma1_violations = 0;
  std::size_t half_mass_violations = 0;
  std::size_t lemma2_violations = 0;
  double lemma1_min_ratio = 0.0;   // min lhs/rhs
  double half_mass_max_ratio = 0.0;  // max inner_mass/inner_bound
  double lemma2_min_ratio = 0.0;   // min lhs/rhs over all tuples
};

/// Both lemmas over every member, in parallel.  Without a Lemma1Spec the
/// moment-lemma fields stay zero.
CorpusSummary lemma_corpus_sweep(const Grid& grid, const std::vector<PacketSum>& corpus,
                                 const std::optional<Lemma1Spec>& lemma1,
                                 const std::vector<Lemma2Tuple>& lemma2);

// ---------------------------------------------------------------------------
// Growth fits

struct PowerFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<double> times;
  std::vector<double> values;
  std::vector<double> excluded;  // times dropped for truncation
};

/// Least squares of log(value) against log(t).
PowerFit fit_power_law(const std::vector<double>& times, const std::vector<double>& values);
std::vector<double> geometric_grid(double lo, double hi, std::size_t count);

enum class TraceMethod { analytic, multiplier, far_field };

struct GrowthResult {
  PowerFit fit;
  double predicted = 0.0;
  std::string formula;
  double rel_err = 0.0;
};

/// Predicted exponent and its formula tag for ‖|x|^b u(t)‖_a.
std::pair<double, std::string> predicted_growth(LinearFlow flow, double a, double b, int dim);

/// Analytic trace from the Gaussian oracle; the moment is taken about the
/// packet center, which must not move.
GrowthResult moment_growth_fit(LinearFlow flow, const GaussianPacket& g, double a, double b,
                               const std::vector<double>& times);
/// Numeric trace by the multiplier method or the far-field identity
/// (Schrödinger only).  Truncated samples are excluded.
GrowthResult moment_growth_fit(LinearFlow flow, TraceMethod method, const GridFunction& u0,
                               double a, double b, const std::vector<double>& x0,
                               const std::vector<double>& times);
/// Fit over the samples of a trace with t in [t_lo, t_hi].
GrowthResult trace_growth_fit(const EvolutionTrace& trace, double a, double b,
                              const std::vector<double>& x0, double t_lo, double t_hi);

struct WaveGrowthResult {
  PowerFit fit;
  double predicted_lower = 0.0;
  bool ok = false;
  std::vector<double> energies;
  double energy_drift = 0.0;  // max relative deviation from the first energy
};

/// Moment ‖|x|^b (|√-Δ P_N u| + |∂_t P_N u|)‖_a along t; predicted lower
/// slope (dim-1)(1/a + b/dim - 1/2).
WaveGrowthResult wave_energy_growth(const WaveState& state0, double n_dyadic, double a, double b,
                                    const std::vector<double>& times);

// ---------------------------------------------------------------------------
// Observability

/// ‖e^{itΔ}u0‖_{L²([0,T]×Ω)} / ‖u0‖_2.
double schrodinger_observability(const GridFunction& u0, const IndicatorSet& omega, double T,
                                 double dt);

struct FamilyInfimum {
  double value = 0.0;
  std::size_t argmin = 0;
  std::vector<double> values;
};

FamilyInfimum schrodinger_observability_family(const std::vector<GridFunction>& family,
                                               const IndicatorSet& omega, double T, double dt);

/// Sharp cutoff to |ξ| < R.
GridFunction band_limit(const GridFunction& f, double R);

struct HeatObservability {
  double ratio = 0.0;             // ‖e^{tΔ}u0‖_{L²([0,T]×Ω)} / ‖u0‖_2
  double floor = 0.0;             // e^{-TR²}
  double final_norm = 0.0;        // ‖e^{TΔ}u0‖_2
  double initial_norm = 0.0;      // ‖u0‖_2
  bool intermediate_ok = false;   // final_norm ≥ floor·initial_norm
};

/// u0 must already be band-limited to |ξ| < R; Ω must be (L, γ)-thick.
HeatObservability heat_observability(const GridFunction& u0, double R, const IndicatorSet& omega,
                                     double T, double dt, double thick_side, double gamma);

/// Every grid-aligned cube of side L inside the box holds measure ≥ γL^dim of Ω.
bool thickness_check(const IndicatorSet& omega, const Grid& grid, double side, double gamma);

struct SpacetimeProduct {
  double product = 0.0;
  double factor1 = 0.0;
  double factor2 = 0.0;
  double exponent1 = 0.0;  // 1/a2 + b2/(n+1) - 1/k2
  double exponent2 = 0.0;  // 1/a1 + b1/n - 1/k1
  double floor = 1.0;      // heat: e^{-TR² exponent1·exponent2}; Schrödinger: 1
};

/// Product of the initial-data moment ratio and the spacetime moment ratio
/// over [0,T]×Ω.  center2 is (t0, x1...).  R is used only for the heat floor.
SpacetimeProduct thm5_product(LinearFlow flow, const GridFunction& u0, const IndicatorSet& omega,
                              double T, double dt, const SideParams& side1,
                              const SideParams& side2, const std::vector<double>& center1 = {},
                              const std::vector<double>& center2 = {}, double R = 0.0);

// ---------------------------------------------------------------------------
// Search for small products

struct ParametricFamily {
  std::string tag;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> start;
  std::function<GridFunction(std::span<const double>)> build;
};

/// θ = log α for a centered Gaussian e^{-α|x|²}.
ParametricFamily gaussian_width_family(const Grid& grid);
/// θ = (spread, log α): K bumps of width α at spread·d_k with fixed random
/// directions d_k ∈ [-1,1]^dim.
ParametricFamily translated_bumps_family(const Grid& grid, std::size_t bumps, std::uint64_t seed,
                                         double max_spread);

struct MinimizerResult {
  double best = 0.0;
  std::vector<double> argmin;
  std::vector<double> trajectory;  // best value after each evaluation
  std::size_t evaluations = 0;
  bool budget_exhausted = false;
};

/// Coordinate descent with halving steps and seeded restarts.
MinimizerResult product_minimizer(const ParametricFamily& family,
                                  const std::function<double(const GridFunction&)>& objective,
                                  std::size_t budget, std::uint64_t seed);

}  // namespace lpup
