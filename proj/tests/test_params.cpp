#include "doctest.h"

#include "lpup/params.hpp"

#include <random>

using namespace lpup;

namespace {

Rational R(long long p, long long q = 1) { return Rational(p) / q; }

SideParams side(int n, Index a, Rational b, Index k) { return {n, a, b, k}; }

// Barycentric membership in triangle ABC, with C and the open edge BC removed.
bool triangle_oracle(int n, const Rational& x, const Rational& y) {
  Rational ax = R(1, 2), ay = R(1, 2);
  Rational bx = R(1, 2), by = Rational(n) / (2 * n + 4);
  Rational cx = Rational(n + 2) / (2 * n + 2), cy = Rational(n) / (2 * n + 2);
  Rational det = (by - cy) * (ax - cx) + (cx - bx) * (ay - cy);
  Rational l1 = ((by - cy) * (x - cx) + (cx - bx) * (y - cy)) / det;
  Rational l2 = ((cy - ay) * (x - cx) + (ax - cx) * (y - cy)) / det;
  Rational l3 = 1 - l1 - l2;
  if (l1 < 0 || l2 < 0 || l3 < 0) return false;
  if (l1 == 0) return l2 == 1;  // edge BC: only vertex B survives
  return true;
}

}  // namespace

TEST_CASE("critical index examples") {
  CHECK(critical_index(1, Index(2), 1) == R(2, 3));
  CHECK(critical_index(2, Index(2), 1) == 1);
  CHECK(critical_index(3, Index::infinity(), 2) == R(3, 2));
}

TEST_CASE("critical index decreases in b and in 1/a") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> num(1, 40);
  for (int i = 0; i < 500; ++i) {
    int n = 1 + i % 3;
    Index a(R(num(rng), num(rng)));
    Rational b = R(num(rng), num(rng));
    CHECK(critical_index(n, a, b + R(1, 7)) < critical_index(n, a, b));
    Index a_smaller(a.value() / 2);
    CHECK(critical_index(n, a_smaller, b) < critical_index(n, a, b));
  }
}

TEST_CASE("conjugate") {
  CHECK(conjugate(Index(2)) == Index(2));
  CHECK(conjugate(Index(1)).is_infinite());
  CHECK(conjugate(Index::infinity()) == Index(1));
  CHECK(conjugate(Index(R(4, 3))) == Index(4));
  CHECK_THROWS_AS(conjugate(Index(R(1, 2))), std::domain_error);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> num(1, 1000);
  for (int i = 0; i < 1000; ++i) {
    int x = num(rng), y = num(rng);
    Index p(R(std::max(x, y), std::min(x, y)));
    CHECK(conjugate(conjugate(p)) == p);
  }
}

TEST_CASE("index parsing") {
  CHECK(Index::parse("inf").is_infinite());
  CHECK(Index::parse("4/3") == Index(R(4, 3)));
  CHECK(Index::parse("0.25") == Index(R(1, 4)));
  CHECK(parse_rational("1e-2") == R(1, 100));
  CHECK(parse_rational("007.50") == R(15, 2));
  CHECK_THROWS(parse_rational("abc"));
}

TEST_CASE("abstract product admissibility and exponents") {
  UPParams p;
  p.side1 = side(1, Index(2), 1, Index(2));
  p.side2 = side(1, Index(2), 1, Index(2));
  p.q1 = p.q2 = R(4, 3);
  p.m1 = p.m2 = Index(4);
  REQUIRE(thm1_admissible(p).admissible());
  auto e = thm1_exponents(p);
  CHECK(e.e1 == R(1, 2));
  CHECK(e.e2 == R(1, 2));
  CHECK(e.rhs == 1);

  SUBCASE("k below critical") {
    UPParams bad = p;
    bad.side1.k = Index(R(1, 2));
    auto v = thm1_admissible(bad);
    CHECK_FALSE(v.admissible());
    bool named = false;
    for (const auto& s : v.violations()) named = named || s.find("k_1 below critical index") != std::string::npos;
    CHECK(named);
    CHECK_THROWS_AS(thm1_exponents(bad), std::invalid_argument);
  }
  SUBCASE("q equal to m is rejected") {
    UPParams bad = p;
    bad.q1 = 4;
    CHECK_FALSE(thm1_admissible(bad).admissible());
  }
  SUBCASE("swap symmetry") {
    UPParams s = p;
    s.side1 = side(1, Index(4), 2, Index(3));
    s.q1 = R(3, 2);
    s.m1 = Index(5);
    REQUIRE(thm1_admissible(s).admissible());
    UPParams t = s;
    std::swap(t.side1, t.side2);
    std::swap(t.q1, t.q2);
    std::swap(t.m1, t.m2);
    auto a = thm1_exponents(s), b = thm1_exponents(t);
    CHECK(a.e1 == b.e2);
    CHECK(a.e2 == b.e1);
    CHECK(a.rhs == b.rhs);
  }
  SUBCASE("positivity on random admissible tuples") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> num(1, 12);
    int seen = 0;
    for (int i = 0; i < 3000; ++i) {
      UPParams r;
      r.side1 = side(num(rng) % 3 + 1, Index(R(num(rng), num(rng))), R(num(rng), num(rng)),
                     Index(R(num(rng), num(rng))));
      r.side2 = side(num(rng) % 3 + 1, Index(R(num(rng), num(rng))), R(num(rng), num(rng)),
                     Index(R(num(rng), num(rng))));
      r.q1 = R(num(rng), num(rng));
      r.q2 = R(num(rng), num(rng));
      r.m1 = Index(R(num(rng), 1));
      r.m2 = Index(R(num(rng), 1));
      if (!thm1_admissible(r).admissible()) continue;
      ++seen;
      auto x = thm1_exponents(r);
      CHECK(x.e1 > 0);
      CHECK(x.e2 > 0);
      CHECK(x.rhs > 0);
    }
    CHECK(seen > 20);
  }
}

TEST_CASE("Fourier-pair admissibility") {
  CHECK(thm2_admissible(1, side(1, Index(2), 1, Index(2)), side(1, Index(2), 1, Index(2))).admissible());
  auto heis = [](int n, Index p) {
    return thm2_admissible(n, side(n, p, 1, p), side(n, p, 1, p)).admissible();
  };
  CHECK(heis(3, Index(2)));
  CHECK_FALSE(heis(3, Index(3)));
  // critical index 6/5 ≥ 1, so k_2 must stay below its conjugate 6.
  CHECK_FALSE(thm2_admissible(3, side(3, Index(2), 1, Index(2)), side(3, Index(2), 1, Index(6))).admissible());
  CHECK(thm2_admissible(3, side(3, Index(2), 1, Index(2)), side(3, Index(2), 1, Index(R(59, 10)))).admissible());
  CHECK_THROWS(thm2_admissible(2, side(1, Index(2), 1, Index(2)), side(2, Index(2), 1, Index(2))));
}

TEST_CASE("two-index Fourier-pair conditions") {
  // n=1, θ=φ=1, p=q=∞, r=2
  CHECK(cor2_admissible(1, 1, 1, Index::infinity(), Index::infinity(), Index(2)).admissible());
  // φ < 1/2 - 1/q violates condition (1)
  CHECK_FALSE(cor2_admissible(1, 1, R(1, 10), Index(2), Index::infinity(), Index(2)).admissible());
  // r ≤ 2 with (1) holding: (2),(3) vacuous
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> num(1, 20);
  for (int i = 0; i < 500; ++i) {
    int n = 1 + i % 3;
    Rational theta = R(num(rng), 4), phi = R(num(rng), 4);
    Index p(R(num(rng), 4)), q(R(num(rng), 4)), r(R(num(rng) % 8 + 1, 4));
    Rational m = r.reciprocal() > R(1, 2) ? r.reciprocal() : R(1, 2);  // 1/min{2,r}
    bool cond1 = theta / n > m - p.reciprocal() && phi / n > m - q.reciprocal();
    CHECK(cor2_admissible(n, theta, phi, p, q, r).admissible() == cond1);
  }
}

TEST_CASE("symmetric Fourier-pair ranges") {
  CHECK(cor3_admissible(1, 1, Index(2), Index(1)).admissible());
  CHECK(cor3_admissible(3, 1, Index(2), Index(2)).admissible());
  CHECK_FALSE(cor3_admissible(3, 1, Index(2), Index(6)).admissible());
}

TEST_CASE("symmetric and general Fourier-pair predicates agree on random tuples") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> num(1, 24);
  std::uniform_int_distribution<int> den(1, 8);
  for (int i = 0; i < 10000; ++i) {
    int n = 1 + i % 4;
    Rational theta = R(num(rng), den(rng));
    Index p = (num(rng) == 1) ? Index::infinity() : Index(R(num(rng), den(rng)));
    Index q = (num(rng) == 1) ? Index::infinity() : Index(R(num(rng), den(rng)));
    bool c3 = cor3_admissible(n, theta, p, q).admissible();
    bool t2 = thm2_admissible(n, side(n, p, theta, q), side(n, p, theta, q)).admissible();
    REQUIRE(c3 == t2);
  }
}

TEST_CASE("Heisenberg status") {
  CHECK(heisenberg_lp_status(3, Index(2)) == Status::holds);
  CHECK(heisenberg_lp_status(3, Index(1)) == Status::holds);
  CHECK(heisenberg_lp_status(3, Index(3)) == Status::unknown);
  CHECK(heisenberg_lp_status(3, Index(4)) == Status::fails);
  CHECK(heisenberg_lp_status(3, Index::infinity()) == Status::unknown);
  CHECK(heisenberg_lp_status(1, Index(100)) == Status::holds);
}

TEST_CASE("delta_n membership") {
  for (int n = 1; n <= 3; ++n) {
    Rational by = Rational(n) / (2 * n + 4);
    Rational cx = Rational(n + 2) / (2 * n + 2), cy = Rational(n) / (2 * n + 2);
    CHECK(delta_n_contains(n, {R(1, 2), R(1, 2)}));
    CHECK_FALSE(delta_n_contains(n, {cx, cy}));
    CHECK_FALSE(delta_n_contains(n, {(R(1, 2) + cx) / 2, (by + cy) / 2}));
    CHECK(delta_n_contains(n, {R(1, 2), (R(1, 2) + by) / 2}));
    CHECK(delta_n_contains(n, {R(1, 2), by}));
  }
}

TEST_CASE("delta_n matches barycentric oracle on a 200x200 lattice") {
  for (int n = 1; n <= 3; ++n) {
    int mismatches = 0;
    for (int i = 0; i <= 199; ++i)
      for (int j = 0; j <= 199; ++j) {
        Rational x = R(i, 199), y = R(j, 199);
        if (delta_n_contains(n, {x, y}) != triangle_oracle(n, x, y)) ++mismatches;
      }
    CHECK(mismatches == 0);
  }
}

TEST_CASE("heat region") {
  for (int n = 1; n <= 3; ++n) CHECK(heat_region_contains(n, Index(2), Index(2)));
  CHECK(heat_region_contains(2, Index::infinity(), Index::infinity()));
  CHECK_FALSE(heat_region_contains(2, Index(1), Index(2)));
  CHECK(heat_region_contains(2, Index(1), Index(R(19, 10))));
  CHECK_FALSE(heat_region_contains(2, Index(2), Index(1)));
}

TEST_CASE("eta condition") {
  CHECK(eta_condition_check(2.0));
  CHECK_FALSE(eta_condition_check(0.5));
  CHECK_FALSE(eta_condition_check(1.0));
}

TEST_CASE("norm-ratio ordering chains") {
  CHECK(lemma2_admissible(Index(2), Index(4), Index(2), Index(1)).admissible());
  CHECK(lemma2_admissible(Index(2), Index(2), Index(3), Index(4)).admissible());
  CHECK_FALSE(lemma2_admissible(Index(5), Index(4), Index(2), Index(1)).admissible());
}

TEST_CASE("moment growth admissibility") {
  CHECK(moment_growth_admissible(1, Index(2), 1).admissible());
  CHECK(moment_growth_admissible(1, Index::infinity(), 2).admissible());
  CHECK_FALSE(moment_growth_admissible(3, Index::infinity(), 1).admissible());
}
