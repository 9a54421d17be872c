#include "doctest.h"
#include "support.hpp"

#include "lpup/diagnostics.hpp"
#include "lpup/field.hpp"

using namespace lpup;
using namespace testing;

namespace {
const Grid kLine{1, 20.0, 2048};
}

TEST_CASE("lp_norm of a constant and of Gaussians") {
  Grid g{1, 3.0, 64};
  auto one = GridFunction::sample(g, [](auto) { return cplx(1.0); });
  CHECK(lp_norm(one, 1.0) == doctest::Approx(6.0).epsilon(1e-14));
  take_warnings();

  auto gauss = packet(1, 1.0).sample(kLine);
  for (double p : {0.5, 1.0, 2.0, 4.0}) CHECK(rel(lp_norm(gauss, p), std::pow(kPi / p, 0.5 / p)) < 1e-10);
  CHECK(lp_norm(packet(1, 1.0, cplx(0.0, -3.0)).sample(kLine), kInf) == doctest::Approx(3.0));
  CHECK_THROWS_AS(lp_norm(gauss, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(lp_norm(gauss, -1.0), std::invalid_argument);
}

TEST_CASE("truncated functions raise a warning") {
  take_warnings();
  auto wide = packet(1, 0.001).sample(Grid{1, 10.0, 256});
  lp_norm(wide, 2.0);
  CHECK_FALSE(take_warnings().empty());
  lp_norm(packet(1, 1.0).sample(kLine), 2.0);
  CHECK(take_warnings().empty());
}

TEST_CASE("log-domain and direct paths agree") {
  auto f = packet(1, 0.7).sample(kLine);
  auto mags = detail::magnitudes(f);
  for (double p : {0.25, 0.4, 0.5, 0.75, 1.0}) {
    double a = detail::lp_norm_direct(mags, p, kLine.cell_volume());
    double b = detail::lp_norm_log_domain(mags, p, kLine.cell_volume());
    CHECK(rel(a, b) < 1e-12);
  }
  // p below 1/4 is routed through the log domain.
  CHECK(rel(lp_norm(f, 0.1), gaussian_lp(packet(1, 0.7), 0.1)) < 1e-8);
}

TEST_CASE("Hurwitz zeta") {
  CHECK(detail::hurwitz_zeta(-1.0, 1.0) == doctest::Approx(-1.0 / 12.0).epsilon(1e-12));
  CHECK(detail::hurwitz_zeta(-0.5, 1.0) == doctest::Approx(-0.20788622497735457).epsilon(1e-12));
  CHECK(detail::hurwitz_zeta(2.0, 1.0) == doctest::Approx(kPi * kPi / 6).epsilon(1e-12));
  CHECK(detail::hurwitz_zeta(-1.5, 0.5) == doctest::Approx(0.016474822351728458).epsilon(1e-12));
  // ζ(-s, 1/2) = (2^{-s} - 1) ζ(-s)
  CHECK(detail::hurwitz_zeta(-1.5, 0.5) ==
        doctest::Approx((std::pow(2.0, -1.5) - 1) * detail::hurwitz_zeta(-1.5, 1.0)).epsilon(1e-12));
}

TEST_CASE("weighted norms") {
  auto f = packet(1, 1.0).sample(kLine);
  CHECK(rel(weighted_norm(f, {2.0, 1.0, {}}), std::sqrt(std::sqrt(kPi / 2) / 4)) < 1e-10);
  CHECK(weighted_norm(f, {3.0, 0.0, {}}) == doctest::Approx(lp_norm(f, 3.0)).epsilon(1e-14));
  auto shifted = packet(1, 1.0, 1.0, {2.5}).sample(kLine);
  CHECK(rel(weighted_norm(shifted, {2.0, 1.0, {2.5}}), weighted_norm(f, {2.0, 1.0, {}})) < 1e-10);
  CHECK_THROWS(weighted_norm(f, {2.0, -1.0, {}}));
  CHECK_THROWS(weighted_norm(f, {2.0, 1.0, {0.0, 0.0}}));
}

TEST_CASE("localization ratios") {
  auto f = packet(1, 1.0).sample(kLine);
  CHECK(h0_ratio(f, 1.0) == doctest::Approx(1.0));
  CHECK(rel(h0_ratio(f, 2.0), std::sqrt(kPi) / std::pow(kPi / 2, 0.25)) < 1e-10);
  for (double lambda : {0.5, 2.0}) {
    auto fl = dilate(packet(1, 1.0), lambda).sample(kLine);
    CHECK(rel(h0_ratio(fl, 3.0), h0_ratio(f, 3.0) * std::pow(lambda, -1.0 + 1.0 / 3.0)) < 1e-8);
  }
  auto half = packet(1, 0.5).sample(kLine);
  CHECK(rel(h1_ratio(half, 1.0, 2.0), 1.0 / std::sqrt(2.0)) < 1e-10);
  CHECK(h1_ratio(half, 0.0, 2.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(h0_ratio(GridFunction::zeros(kLine), 2.0), std::invalid_argument);

  // Ratio for a bump at distance d grows like d^r.
  Grid wide{1, 80.0, 4096};
  double r = 1.5;
  double h30 = h1_ratio(packet(1, 1.0, 1.0, {30.0}).sample(wide), r, 2.0);
  double h60 = h1_ratio(packet(1, 1.0, 1.0, {60.0}).sample(wide), r, 2.0);
  CHECK(std::log(h60 / h30) / std::log(2.0) == doctest::Approx(r).epsilon(0.01));
}

TEST_CASE("fourier transform against the oracle") {
  auto g = packet(1, 1.0);
  CHECK(rel_sup_error(fourier(g.sample(kLine)), gaussian_fourier(g)) < 1e-6);
  auto mod = packet(1, 0.8, cplx(0.3, 1.1), {1.5}, {-2.0});
  CHECK(rel_sup_error(fourier(mod.sample(kLine)), gaussian_fourier(mod)) < 1e-6);

  // Translation becomes modulation by e^{-iξx0}.
  auto base = fourier(g.sample(kLine));
  auto moved = fourier(packet(1, 1.0, 1.0, {1.25}).sample(kLine));
  std::array<double, 3> xi{};
  double err = 0.0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    base.grid().point(i, xi);
    err = std::max(err, std::abs(moved[i] - std::exp(cplx(0, -xi[0] * 1.25)) * base[i]));
  }
  CHECK(err / base.max_abs() < 1e-10);

  std::mt19937_64 rng(17);
  auto f = random_bumps(kLine, rng);
  CHECK(rel_l2_distance(inverse_fourier(fourier(f)), f) < 1e-10);
}

TEST_CASE("fourier in two and three dimensions") {
  auto g2 = packet(2, cplx(1.2, 0.3), cplx(1, -1), {0.5, -1.0}, {1.0, 0.5});
  Grid plane{2, 12.0, 256};
  CHECK(rel_sup_error(fourier(g2.sample(plane)), gaussian_fourier(g2)) < 1e-4);
  auto g3 = packet(3, 1.0, 1.0, {0.3, 0.0, -0.2});
  Grid cube{3, 8.0, 64};
  CHECK(rel_sup_error(fourier(g3.sample(cube)), gaussian_fourier(g3)) < 1e-4);
}

TEST_CASE("narrow Gaussians have nearly flat transforms") {
  auto g = packet(1, 40.0);
  auto ghat = fourier(g.sample(Grid{1, 4.0, 2048}));
  // e^{-ξ²/160} stays within 1% of its peak for |ξ| ≤ 1.2.
  double lo = 1e300, hi = 0.0;
  std::array<double, 3> xi{};
  for (std::size_t i = 0; i < ghat.size(); ++i) {
    ghat.grid().point(i, xi);
    if (std::abs(xi[0]) > 1.2) continue;
    lo = std::min(lo, std::abs(ghat[i]));
    hi = std::max(hi, std::abs(ghat[i]));
  }
  CHECK(lo / hi > 0.99);
}

TEST_CASE("Plancherel and quadrature consistency") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    auto f = random_bumps(kLine, rng);
    CHECK(rel(lp_norm(fourier(f), 2.0), std::sqrt(2 * kPi) * lp_norm(f, 2.0)) < 1e-8);
  }
  auto g = packet(1, 0.6, 1.0, {0.7});
  Grid fine{1, 20.0, 4096};
  for (double p : {0.5, 1.0, 2.0, 4.0}) {
    CHECK(rel(lp_norm(g.sample(fine), p), lp_norm(g.sample(kLine), p)) < 1e-8);
    CHECK(rel(weighted_norm(g.sample(fine), {p, 1.0, {}}), weighted_norm(g.sample(kLine), {p, 1.0, {}})) <
          1e-8);
  }
}

TEST_CASE("dilation laws") {
  auto base = packet(1, 1.0);
  double n2 = lp_norm(base.sample(kLine), 3.0), w2 = weighted_norm(base.sample(kLine), {2.0, 1.5, {}});
  for (double lambda : {0.5, 1.0, 2.0, 4.0}) {
    auto f = dilate(base, lambda).sample(kLine);
    CHECK(rel(lp_norm(f, 3.0), n2 * std::pow(lambda, -1.0 / 3.0)) < 1e-3);
    CHECK(rel(weighted_norm(f, {2.0, 1.5, {}}), w2 * std::pow(lambda, -1.5 - 0.5)) < 1e-3);
  }
}

TEST_CASE("Hausdorff-Young over random packets") {
  std::mt19937_64 rng(1234);
  Grid g{1, 16.0, 1024};
  int violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    auto f = random_bumps(g, rng);
    auto fh = fourier(f);
    for (double p : {1.0, 1.25, 1.5, 2.0}) {
      double pc = p == 1.0 ? kInf : p / (p - 1.0);
      double bound = std::pow(2 * kPi, p == 1.0 ? 0.0 : 1.0 / pc) * lp_norm(f, p);
      if (lp_norm(fh, pc) > bound * (1 + 1e-6)) ++violations;
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("Littlewood-Paley multiplier partition") {
  for (double r = 0.6; r < 500.0; r *= 1.037) {
    double sum = 0.0;
    for (int j = 0; j <= 12; ++j) sum += littlewood_paley_multiplier(r, std::ldexp(1.0, j));
    // Telescoping sum is φ(r/4096) - φ(2r): exactly 1 for r in [0.55, 4096].
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
  }
  CHECK(littlewood_paley_multiplier(0.5 * 8, 8) == 0.0);
  CHECK(littlewood_paley_multiplier(1.1 * 8, 8) == 0.0);
  CHECK(lp_bump(1.05) > 0.0);
  CHECK(lp_bump(1.05) < 1.0);
}

TEST_CASE("Littlewood-Paley projection") {
  Grid g{1, 64.0, 2048};
  auto mod = packet(1, 0.02, 1.0, {}, {6.2});
  auto f = mod.sample(g);
  auto p8 = lp_project(f, 8.0);
  CHECK(rel_l2_distance(p8, f) < 1e-6);
  auto p32 = lp_project(f, 32.0);
  CHECK(lp_norm(p32, 2.0) / lp_norm(f, 2.0) < 1e-8);
  CHECK_FALSE(lp_resolvable(g, 64.0));  // 1.1·64 exceeds the dual half-width 50
  CHECK_FALSE(lp_resolvable(g, 6.0));
  CHECK_THROWS_AS(lp_project(f, 64.0), std::invalid_argument);

  // A packet with no content in the annulus is annihilated.
  auto low = packet(1, 0.05).sample(g);
  CHECK(lp_norm(lp_project(low, 32.0), 2.0) / lp_norm(low, 2.0) < 1e-12);

  Grid plane{2, 16.0, 128};
  auto radial = packet(2, 1.0).sample(plane);
  auto pr = lp_project(radial, 2.0);
  double imag = 0.0, asym = 0.0;
  const std::size_t n = plane.points;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      imag = std::max(imag, std::abs(pr[i * n + j].imag()));
      asym = std::max(asym, std::abs(pr[i * n + j] - pr[j * n + i]));
      if (i > 0) asym = std::max(asym, std::abs(pr[i * n + j] - pr[(n - i) * n + j]));
    }
  CHECK(imag / pr.max_abs() < 1e-12);
  CHECK(asym / pr.max_abs() < 1e-12);
}

TEST_CASE("restriction") {
  Grid g{1, 8.0, 256};
  auto f = packet(1, 0.5).sample(g);
  CHECK(rel_l2_distance(restrict_to(f, FullSpace{}), f) == 0.0);
  auto r = restrict_to(f, BallComplement{{}, 2.0});
  std::array<double, 3> x{};
  bool exact = true;
  for (std::size_t i = 0; i < r.size(); ++i) {
    g.point(i, x);
    exact = exact && (std::abs(x[0]) > 2.0 ? r[i] == f[i] : r[i] == cplx(0.0));
  }
  CHECK(exact);
  auto rr = restrict_to(r, BallComplement{{}, 2.0});
  CHECK(std::equal(rr.samples().begin(), rr.samples().end(), r.samples().begin()));
  CHECK_THROWS(restrict_to(f, ExplicitMask{std::vector<std::uint8_t>(3, 1)}));
  CHECK_THROWS(restrict_to(f, PeriodicSlabs{1.0, 1.5, 0.0, 0}));
}

TEST_CASE("spacetime norm of a constant-in-time trace") {
  Grid g{1, 20.0, 512};
  auto f = packet(1, 1.0).sample(g);
  EvolutionTrace tr{"none", "constant", 0.1, {}, {}};
  for (int i = 0; i <= 20; ++i) {
    tr.times.push_back(0.1 * i);
    tr.snapshots.push_back(f);
  }
  for (double p : {1.0, 2.0, 3.0})
    CHECK(rel(spacetime_norm(tr, {p, 0.0, {}}, FullSpace{}, {0.0, 2.0}), std::pow(2.0, 1.0 / p) * lp_norm(f, p)) <
          1e-12);
  CHECK(rel(spacetime_norm(tr, {2.0, 0.0, {}}, FullSpace{}, {0.5, 1.5}), lp_norm(f, 2.0)) < 1e-12);
  CHECK_THROWS_WITH(spacetime_norm(tr, {2.0, 0.0, {}}, FullSpace{}, {0.0, 3.0}), "window exceeds trace");
  CHECK_THROWS(spacetime_norm(tr, {2.0, 0.0, {}}, FullSpace{}, {0.0, 1.05}));

  double prev = 0.0;
  for (double t0 : {3.0, 4.0, 6.0, 10.0}) {
    double v = spacetime_norm(tr, {2.0, 1.0, {t0, 0.0}}, FullSpace{}, {0.0, 2.0});
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("grid validation") {
  CHECK_THROWS(GridFunction::zeros(Grid{1, 1.0, 100}));
  CHECK_THROWS(GridFunction::zeros(Grid{2, 1.0, 1024}));
  CHECK_THROWS(GridFunction::zeros(Grid{4, 1.0, 8}));
  CHECK_THROWS(GridFunction::zeros(Grid{1, -1.0, 8}));
  CHECK_THROWS(GridFunction(Grid{1, 1.0, 8}, std::vector<cplx>(7)));
}
