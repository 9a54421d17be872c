#pragma once

// Exact parameter algebra for the L^p uncertainty inequalities: critical
// indices, conjugate exponents, admissibility predicates and exponent
// calculus.  Every index is an exact rational or the distinguished value
// infinity, so strict and non-strict boundaries are decided exactly.

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace lpup {

using Rational = boost::multiprecision::cpp_rational;

/// Parses "3", "4/3", "0.25", "1e-2" exactly into a rational.
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& r);
double to_double(const Rational& r);

/// Extended positive real in (0, ∞].
class Index {
 public:
  Index(const Rational& value);  // NOLINT(google-explicit-constructor)
  Index(long long value);        // NOLINT(google-explicit-constructor)

  static Index infinity();
  /// Accepts everything parse_rational does, plus "inf"/"infinity"/"∞".
  static Index parse(std::string_view text);

  bool is_infinite() const { return infinite_; }
  /// Finite value; throws std::domain_error on infinity.
  const Rational& value() const;
  /// 1/p with 1/∞ = 0.
  Rational reciprocal() const;
  double to_double() const;
  std::string str() const;

  friend bool operator==(const Index& x, const Index& y);
  friend bool operator<(const Index& x, const Index& y);
  friend bool operator<=(const Index& x, const Index& y) { return !(y < x); }
  friend bool operator>(const Index& x, const Index& y) { return y < x; }
  friend bool operator>=(const Index& x, const Index& y) { return !(x < y); }

 private:
  Index() = default;
  bool infinite_ = false;
  Rational value_;
};

struct SideParams {
  int n = 1;
  Index a = Index(2);
  Rational b = 1;
  Index k = Index(2);
};

struct UPParams {
  SideParams side1;
  SideParams side2;
  Rational q1 = 1;
  Rational q2 = 1;
  Index m1 = Index(2);
  Index m2 = Index(2);
  double C1 = 1.0;
  double C2 = 1.0;
};

struct RegionPoint {
  Rational inv_p;
  Rational inv_q;
};

/// One hypothesis inequality with its verdict.  `violation` is the message
/// reported when `holds` is false.
struct Condition {
  std::string statement;
  std::string violation;
  bool holds = false;
};

struct Verdict {
  std::vector<Condition> conditions;

  bool admissible() const;
  std::vector<std::string> violations() const;
};

/// n/(n/a + b) with n/∞ = 0.
Rational critical_index(int n, const Index& a, const Rational& b);

/// p' with 1/p + 1/p' = 1.  Throws std::domain_error for p < 1.
Index conjugate(const Index& p);

/// 1/a + b/n - 1/k, the localisation exponent of one side.
Rational localization_exponent(const SideParams& side);

Verdict thm1_admissible(const UPParams& p);

struct Exponents {
  Rational e1;
  Rational e2;
  Rational rhs;
};

/// Throws std::invalid_argument when thm1_admissible(p) fails.
Exponents thm1_exponents(const UPParams& p);

/// Fourier-pair admissibility (also the hypothesis of the Schrödinger and
/// projected half-wave moment inequalities).  Both sides must have dimension n.
Verdict thm2_admissible(int n, const SideParams& side1, const SideParams& side2);

Verdict cor2_admissible(int n, const Rational& theta, const Rational& phi,
                        const Index& p, const Index& q, const Index& r);

Verdict cor3_admissible(int n, const Rational& theta, const Index& p,
                        const Index& q);

/// Moment growth ‖|x|^b e^{itΔ}u_0‖_a ≳ |t|^{n(1/a+b/n-1/2)} requires
/// critical_index < 2.
Verdict moment_growth_admissible(int n, const Index& a, const Rational& b);

/// Spacetime-moment hypothesis: side1 lives in R^n, side2 in R^{n+1}.
Verdict thm5_admissible(int n, const SideParams& side1, const SideParams& side2);

/// Range of (p, m) for the X_p contraction of the cubic-type NLS.
Verdict lemma4_admissible(int n, const Index& p, const Rational& m);

/// Full moment hypothesis for the nonlinear problem.
Verdict prop6_admissible(int n, const Index& p, const Rational& m,
                         const SideParams& side1, const SideParams& side2);

Verdict lemma1_admissible(int n, const Index& a, const Rational& b,
                          const Rational& s, const Index& p);

/// Either m ≤ k ≤ p, m < q ≤ p  or  p ≤ k ≤ m, p ≤ q < m.
Verdict lemma2_admissible(const Index& k, const Index& p, const Index& q,
                          const Index& m);

/// Closed triangle ABC minus vertex C and minus the open edge BC, with
/// A = (1/2, 1/2), B = (1/2, n/(2n+4)), C = ((n+2)/(2n+2), n/(2n+2)).
bool delta_n_contains(int n, const RegionPoint& pt);

/// 1 ≤ p ≤ q < (n+2)/n · p, or p = q = ∞.
bool heat_region_contains(int n, const Index& p, const Index& q);

/// η(t) = (1+|t|)^{-σ} is integrable with sup_{|t|/2≤|s|≤|t|} |t|η(s) < ∞.
bool eta_condition_check(double sigma);

enum class Status { holds, fails, unknown };
std::string to_string(Status s);

/// Status of the L^p Heisenberg product (a_i = k_i = p, b_i = 1) in R^n:
/// holds on (0, 2n/(n-1)), known false on (2n/(n-1), ∞), open at
/// p = 2n/(n-1) and p = ∞.
Status heisenberg_lp_status(int n, const Index& p);

}  // namespace lpup
