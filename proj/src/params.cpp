#include "lpup/params.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace lpup {

namespace {

using boost::multiprecision::cpp_int;

cpp_int parse_integer(std::string_view digits, std::string_view whole) {
  if (digits.empty() ||
      !std::all_of(digits.begin(), digits.end(),
                   [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
    throw std::invalid_argument("malformed number: '" + std::string(whole) + "'");
  // cpp_int treats a leading zero as an octal prefix.
  auto first = digits.find_first_not_of('0');
  if (first == std::string_view::npos) return 0;
  return cpp_int(std::string(digits.substr(first)));
}

cpp_int pow10(long e) {
  cpp_int r = 1;
  for (long i = 0; i < e; ++i) r *= 10;
  return r;
}

// Decimal with optional sign, fraction and exponent.
Rational parse_decimal(std::string_view s, std::string_view whole) {
  bool negative = false;
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_part = s.substr(e + 1);
    bool exp_negative = false;
    if (!exp_part.empty() && (exp_part.front() == '+' || exp_part.front() == '-')) {
      exp_negative = exp_part.front() == '-';
      exp_part.remove_prefix(1);
    }
    exponent = static_cast<long>(parse_integer(exp_part, whole));
    if (exp_negative) exponent = -exponent;
    s = s.substr(0, e);
  }
  std::string digits;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view frac = s.substr(dot + 1);
    digits = std::string(s.substr(0, dot)) + std::string(frac);
    exponent -= static_cast<long>(frac.size());
  } else {
    digits = std::string(s);
  }
  Rational r(parse_integer(digits, whole));
  if (exponent > 0) r *= pow10(exponent);
  if (exponent < 0) r /= pow10(-exponent);
  return negative ? Rational(-r) : r;
}

std::string trim(std::string_view s) {
  auto first = s.find_first_not_of(" \t\n\r");
  if (first == std::string_view::npos) return {};
  auto last = s.find_last_not_of(" \t\n\r");
  return std::string(s.substr(first, last - first + 1));
}

Rational min_two(const Index& k) {
  return k < Index(2) ? k.value() : Rational(2);
}

void add(Verdict& v, std::string statement, std::string violation, bool holds) {
  v.conditions.push_back({std::move(statement), std::move(violation), holds});
}

std::string sub(const char* name, int i) { return std::string(name) + "_" + std::to_string(i); }

// k_i range of the Fourier-pair hypothesis: (c_i, ∞] when the opposite
// critical index is below 1, otherwise (c_i, c_opp') open.
void fourier_k_range(Verdict& v, int i, const Rational& c_own, const Rational& c_opp,
                     const Index& k) {
  std::string ki = sub("k", i);
  add(v, ki + " > critical index " + to_string(c_own), ki + " below critical index",
      Index(c_own) < k);
  if (c_opp >= 1) {
    Index bound = conjugate(Index(c_opp));
    add(v, ki + " < (" + to_string(c_opp) + ")' = " + bound.str(),
        ki + " not below conjugate of opposite critical index", k < bound);
  }
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string s = trim(text);
  if (s.empty()) throw std::invalid_argument("empty number");
  if (auto slash = s.find('/'); slash != std::string::npos) {
    Rational num = parse_decimal(std::string_view(s).substr(0, slash), s);
    Rational den = parse_decimal(std::string_view(s).substr(slash + 1), s);
    if (den == 0) throw std::invalid_argument("zero denominator: '" + s + "'");
    return num / den;
  }
  return parse_decimal(s, s);
}

std::string to_string(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

Index::Index(const Rational& value) : value_(value) {
  if (value_ <= 0) throw std::domain_error("index must be positive, got " + to_string(value_));
}

Index::Index(long long value) : Index(Rational(value)) {}

Index Index::infinity() {
  Index r;
  r.infinite_ = true;
  return r;
}

Index Index::parse(std::string_view text) {
  std::string s = trim(text);
  std::string lower;
  for (char c : s) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "inf" || lower == "infinity" || lower == "+inf" || s == "∞") return infinity();
  return Index(parse_rational(s));
}

const Rational& Index::value() const {
  if (infinite_) throw std::domain_error("infinite index has no finite value");
  return value_;
}

Rational Index::reciprocal() const { return infinite_ ? Rational(0) : Rational(1 / value_); }

double Index::to_double() const {
  return infinite_ ? HUGE_VAL : value_.convert_to<double>();
}

std::string Index::str() const { return infinite_ ? "inf" : to_string(value_); }

bool operator==(const Index& x, const Index& y) {
  if (x.infinite_ || y.infinite_) return x.infinite_ == y.infinite_;
  return x.value_ == y.value_;
}

bool operator<(const Index& x, const Index& y) {
  if (x.infinite_) return false;
  if (y.infinite_) return true;
  return x.value_ < y.value_;
}

bool Verdict::admissible() const {
  return std::all_of(conditions.begin(), conditions.end(),
                     [](const Condition& c) { return c.holds; });
}

std::vector<std::string> Verdict::violations() const {
  std::vector<std::string> out;
  for (const auto& c : conditions)
    if (!c.holds) out.push_back(c.violation);
  return out;
}

Rational critical_index(int n, const Index& a, const Rational& b) {
  if (n < 1) throw std::invalid_argument("dimension must be >= 1");
  if (b <= 0) throw std::invalid_argument("moment power b must be positive");
  return Rational(n) / (Rational(n) * a.reciprocal() + b);
}

Index conjugate(const Index& p) {
  if (p < Index(1)) throw std::domain_error("conjugate requires p >= 1, got " + p.str());
  if (p.is_infinite()) return Index(1);
  if (p.value() == 1) return Index::infinity();
  return Index(p.value() / (p.value() - 1));
}

Rational localization_exponent(const SideParams& side) {
  return side.a.reciprocal() + side.b / side.n - side.k.reciprocal();
}

Verdict thm1_admissible(const UPParams& p) {
  Verdict v;
  const SideParams* sides[2] = {&p.side1, &p.side2};
  const Rational* qs[2] = {&p.q1, &p.q2};
  const Index* ms[2] = {&p.m1, &p.m2};
  for (int i = 0; i < 2; ++i) {
    const SideParams& s = *sides[i];
    Rational c = critical_index(s.n, s.a, s.b);
    Index q(*qs[i]);
    const Index& m = *ms[i];
    int id = i + 1;
    add(v, sub("k", id) + " > critical index " + to_string(c),
        sub("k", id) + " below critical index", Index(c) < s.k);
    add(v, sub("k", id) + " <= " + sub("m", id), sub("k", id) + " exceeds " + sub("m", id),
        s.k <= m);
    add(v, sub("q", id) + " > critical index " + to_string(c),
        sub("q", id) + " below critical index", Index(c) < q);
    add(v, sub("q", id) + " < " + sub("m", id), sub("q", id) + " not below " + sub("m", id),
        q < m);
  }
  add(v, "C_1 > 0 and C_2 > 0", "transfer constants must be positive", p.C1 > 0 && p.C2 > 0);
  return v;
}

Exponents thm1_exponents(const UPParams& p) {
  Verdict v = thm1_admissible(p);
  if (!v.admissible()) {
    std::string msg = "inadmissible parameters:";
    for (const auto& s : v.violations()) msg += " [" + s + "]";
    throw std::invalid_argument(msg);
  }
  Rational loc1 = localization_exponent(p.side1);
  Rational loc2 = localization_exponent(p.side2);
  Rational gap1 = Rational(1) / p.q1 - p.m1.reciprocal();
  Rational gap2 = Rational(1) / p.q2 - p.m2.reciprocal();
  return {gap1 * loc2, gap2 * loc1, loc1 * loc2};
}

Verdict thm2_admissible(int n, const SideParams& side1, const SideParams& side2) {
  if (side1.n != n || side2.n != n)
    throw std::invalid_argument("both sides must live in dimension n");
  Verdict v;
  Rational c1 = critical_index(n, side1.a, side1.b);
  Rational c2 = critical_index(n, side2.a, side2.b);
  add(v, "critical index 1 = " + to_string(c1) + " < 2", "critical index 1 not below 2", c1 < 2);
  add(v, "critical index 2 = " + to_string(c2) + " < 2", "critical index 2 not below 2", c2 < 2);
  fourier_k_range(v, 1, c1, c2, side1.k);
  fourier_k_range(v, 2, c2, c1, side2.k);
  return v;
}

Verdict cor2_admissible(int n, const Rational& theta, const Rational& phi, const Index& p,
                        const Index& q, const Index& r) {
  Verdict v;
  Rational inv_min = Rational(1) / min_two(r);
  add(v, "theta/n > 1/min{2,r} - 1/p", "condition (1) fails for theta",
      theta / n > inv_min - p.reciprocal());
  add(v, "phi/n > 1/min{2,r} - 1/q", "condition (1) fails for phi",
      phi / n > inv_min - q.reciprocal());
  Rational cp = critical_index(n, p, theta);
  if (cp >= 1)
    add(v, "r < (" + to_string(cp) + ")'", "condition (2) fails", r < conjugate(Index(cp)));
  Rational cq = critical_index(n, q, phi);
  if (cq >= 1)
    add(v, "r < (" + to_string(cq) + ")'", "condition (3) fails", r < conjugate(Index(cq)));
  return v;
}

Verdict cor3_admissible(int n, const Rational& theta, const Index& p, const Index& q) {
  Verdict v;
  Rational c = critical_index(n, p, theta);
  add(v, "critical index " + to_string(c) + " < min{2,q}", "critical index not below min{2,q}",
      c < min_two(q));
  if (c >= 1)
    add(v, "q < (" + to_string(c) + ")'", "q not below conjugate of critical index",
        q < conjugate(Index(c)));
  return v;
}

Verdict moment_growth_admissible(int n, const Index& a, const Rational& b) {
  Verdict v;
  Rational c = critical_index(n, a, b);
  add(v, "critical index " + to_string(c) + " < 2", "critical index not below 2", c < 2);
  return v;
}

Verdict thm5_admissible(int n, const SideParams& side1, const SideParams& side2) {
  if (side1.n != n || side2.n != n + 1)
    throw std::invalid_argument("side 1 must live in R^n and side 2 in R^{n+1}");
  Verdict v;
  Rational c1 = critical_index(n, side1.a, side1.b);
  Rational c2 = critical_index(n + 1, side2.a, side2.b);
  add(v, "k_1 > critical index " + to_string(c1), "k_1 below critical index",
      Index(c1) < side1.k);
  add(v, "k_1 <= 2", "k_1 exceeds 2", side1.k <= Index(2));
  add(v, "critical index " + to_string(c2) + " < min{2,k_2}",
      "k_2 side critical index not below min{2,k_2}", c2 < min_two(side2.k));
  Rational strichartz = Rational(2 * n + 4, n);
  add(v, "k_2 < (2n+4)/n = " + to_string(strichartz), "k_2 not below (2n+4)/n",
      side2.k < Index(strichartz));
  return v;
}

Verdict lemma4_admissible(int n, const Index& p, const Rational& m) {
  Verdict v;
  add(v, "p > 2", "p not above 2", Index(2) < p);
  if (n >= 3) {
    Rational top(2 * n, n - 2);
    add(v, "p < 2n/(n-2) = " + to_string(top), "p not below 2n/(n-2)", p < Index(top));
  } else if (n == 2) {
    add(v, "p < inf", "p must be finite in dimension 2", !p.is_infinite());
  }
  add(v, "m > 1", "m not above 1", m > 1);
  add(v, "m <= p - 1", "m exceeds p - 1", p.is_infinite() || m <= p.value() - 1);
  return v;
}

Verdict prop6_admissible(int n, const Index& p, const Rational& m, const SideParams& side1,
                         const SideParams& side2) {
  Verdict v = lemma4_admissible(n, p, m);
  Rational mass_critical = 1 + Rational(4, n);
  add(v, "m <= 1 + 4/n", "m above the mass-critical power", m <= mass_critical);
  Rational c1 = critical_index(n, side1.a, side1.b);
  Rational c2 = critical_index(n, side2.a, side2.b);
  Index pc = conjugate(p);
  add(v, "critical index 1 < p'", "critical index 1 not below p'", Index(c1) < pc);
  add(v, "p' <= k_1", "k_1 below p'", pc <= side1.k);
  add(v, "k_1 <= 2", "k_1 exceeds 2", side1.k <= Index(2));
  add(v, "critical index 2 < 2", "critical index 2 not below 2", c2 < 2);
  add(v, "2 <= k_2", "k_2 below 2", Index(2) <= side2.k);
  add(v, "k_2 <= p", "k_2 exceeds p", side2.k <= p);
  return v;
}

Verdict lemma1_admissible(int n, const Index& a, const Rational& b, const Rational& s,
                          const Index& p) {
  Verdict v;
  Rational c = critical_index(n, a, b);
  add(v, "s >= 1", "s below 1", s >= 1);
  add(v, "p > critical index " + to_string(c), "p below critical index", Index(c) < p);
  add(v, "p <= a", "p exceeds a", p <= a);
  add(v, "p < inf", "p must be finite", !p.is_infinite());
  return v;
}

Verdict lemma2_admissible(const Index& k, const Index& p, const Index& q, const Index& m) {
  Verdict v;
  bool descending = m <= k && k <= p && m < q && q <= p;
  bool ascending = p <= k && k <= m && p <= q && q < m;
  add(v, "m <= k <= p, m < q <= p  or  p <= k <= m, p <= q < m",
      "no Hoelder ordering chain holds", descending || ascending);
  return v;
}

bool delta_n_contains(int n, const RegionPoint& pt) {
  const Rational ax(1, 2), ay(1, 2);
  const Rational bx(1, 2), by(n, 2 * n + 4);
  const Rational cx(n + 2, 2 * n + 2), cy(n, 2 * n + 2);
  auto cross = [](const Rational& ux, const Rational& uy, const Rational& vx,
                  const Rational& vy) { return ux * vy - uy * vx; };
  Rational d_ab = cross(bx - ax, by - ay, pt.inv_p - ax, pt.inv_q - ay);
  Rational d_bc = cross(cx - bx, cy - by, pt.inv_p - bx, pt.inv_q - by);
  Rational d_ca = cross(ax - cx, ay - cy, pt.inv_p - cx, pt.inv_q - cy);
  bool nonneg = d_ab >= 0 && d_bc >= 0 && d_ca >= 0;
  bool nonpos = d_ab <= 0 && d_bc <= 0 && d_ca <= 0;
  if (!nonneg && !nonpos) return false;
  // On line BC: only the closed vertex B survives.
  if (d_bc == 0) return pt.inv_p == bx && pt.inv_q == by;
  return true;
}

bool heat_region_contains(int n, const Index& p, const Index& q) {
  if (p.is_infinite() && q.is_infinite()) return true;
  if (p.is_infinite() || q.is_infinite()) return false;
  return Index(1) <= p && p <= q && q.value() < Rational(n + 2, n) * p.value();
}

bool eta_condition_check(double sigma) { return sigma > 1.0; }

std::string to_string(Status s) {
  switch (s) {
    case Status::holds: return "holds";
    case Status::fails: return "fails";
    case Status::unknown: return "unknown";
  }
  return "?";
}

Status heisenberg_lp_status(int n, const Index& p) {
  Index threshold = n == 1 ? Index::infinity() : Index(Rational(2 * n, n - 1));
  if (p < threshold) return Status::holds;
  if (p == threshold || p.is_infinite()) return Status::unknown;
  return Status::fails;
}

}  // namespace lpup
