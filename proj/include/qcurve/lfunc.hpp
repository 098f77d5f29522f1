#pragma once

// Quadratic twists, central L-values with truncation bounds, root numbers, the
// oldform block pairing and the explicit convexity bound.

#include <boost/math/special_functions/bernoulli.hpp>

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "qcurve/arith.hpp"
#include "qcurve/error.hpp"
#include "qcurve/newforms.hpp"
#include "qcurve/real.hpp"

namespace qcurve {

/// Kronecker symbol (d / n) for n >= 1.
inline int kronecker(i64 d, i64 n) {
  if (n <= 0) throw Error(ErrorKind::InvalidArgument, "kronecker expects n >= 1");
  int result = 1;
  while (n % 2 == 0) {
    n /= 2;
    i64 dm = mod(d, 8);
    if (dm % 2 == 0) return 0;
    if (dm == 3 || dm == 5) result = -result;
  }
  // Jacobi symbol (d / n), n odd
  i64 a = mod(d, n);
  while (a != 0) {
    while (a % 2 == 0) {
      a /= 2;
      i64 r = n % 8;
      if (r == 3 || r == 5) result = -result;
    }
    std::swap(a, n);
    if (a % 4 == 3 && n % 4 == 3) result = -result;
    a %= n;
  }
  return n == 1 ? result : 0;
}

/// Primitive quadratic character attached to a fundamental discriminant.
class QuadCharacter {
 public:
  QuadCharacter() = default;  // trivial
  explicit QuadCharacter(i64 discriminant) : disc_(discriminant) {
    if (!is_fundamental(discriminant))
      throw Error(ErrorKind::InvalidArgument, std::to_string(discriminant) + " is not a fundamental discriminant");
  }

  /// The character of conductor q: q = 1, 4, 8 (even), 3 mod 4 primes give odd characters.
  static QuadCharacter of_conductor(i64 q) {
    if (q == 1) return {};
    if (q == 4) return QuadCharacter(-4);
    if (q == 8) return QuadCharacter(8);
    if (q > 2 && is_prime(q)) return QuadCharacter(q % 4 == 1 ? q : -q);
    throw Error(ErrorKind::InvalidArgument, "no canonical quadratic character of conductor " + std::to_string(q));
  }

  i64 discriminant() const { return disc_; }
  i64 conductor() const { return disc_ < 0 ? -disc_ : disc_; }
  bool trivial() const { return disc_ == 1; }

  int operator()(i64 n) const {
    if (disc_ == 1) return 1;
    if (n < 0) return (disc_ < 0 ? -1 : 1) * (*this)(-n);
    if (n == 0) return 0;
    return kronecker(disc_, n);
  }

  static bool is_fundamental(i64 d) {
    if (d == 1) return true;
    if (mod(d, 4) == 1) {
      for (auto [p, e] : factor(d < 0 ? -d : d))
        if (e > 1) return false;
      return true;
    }
    if (mod(d, 4) != 0) return false;
    i64 m = d / 4;
    if (mod(m, 4) != 2 && mod(m, 4) != 3) return false;
    for (auto [p, e] : factor(m < 0 ? -m : m))
      if (e > 1) return false;
    return true;
  }

 private:
  i64 disc_ = 1;
};

struct TwistedForm {
  std::vector<Real> a;         // chi(n) a_n
  std::optional<i64> level;    // N q^2 when (N, q) = 1
  std::string note;
};

inline TwistedForm twist(const Newform& f, const QuadCharacter& chi) {
  TwistedForm t;
  t.a.resize(f.a.size());
  for (std::size_t n = 0; n < f.a.size(); ++n) t.a[n] = f.a[n] * chi(static_cast<i64>(n));
  const i64 q = chi.conductor();
  if (gcd(f.level, q) == 1) {
    t.level = f.level * q * q;
  } else {
    t.note = std::string(to_string(ErrorKind::NonCoprimeConductor)) + ": level of the twist is not N q^2";
  }
  return t;
}

/// Product of the Atkin-Lehner signs of f: eigenvalue of W_N.
inline int w_level(const Newform& f) {
  int w = 1;
  for (auto [q, s] : f.al_signs) w *= s;
  return w;
}

struct LValueResult {
  Real value = 0;
  Real trunc_error = 0;
  std::size_t terms_used = 0;
  Real cutoff = 0;        // x
  i64 twisted_level = 0;  // M
  int sign = 0;           // root number of f (x) chi
};

namespace detail {

/// sqrt(3) sum_{n > n0} r^n / (1 - r) style geometric tail of both halves.
inline Real two_sided_tail(const Real& x, i64 m, std::size_t n0) {
  const Real two_pi = 2 * pi_value<Real>();
  const Real r1 = exp(-two_pi / x), r2 = exp(-two_pi * x / Real(m));
  const Real k = Real(n0 + 1);
  return sqrt(Real(3)) * (pow(r1, k) / (1 - r1) + pow(r2, k) / (1 - r2));
}

/// S(x) + eps S(M / x), S(x) = sum b_n / n e^{-2 pi n / x}.
inline Real two_sided_sum(const std::vector<Real>& b, i64 m, const Real& x, int eps, std::size_t n_max) {
  const Real two_pi = 2 * pi_value<Real>();
  const Real q1 = exp(-two_pi / x), q2 = exp(-two_pi * x / Real(m));
  Real p1 = 1, p2 = 1, s = 0;
  // fixed-size blocks in increasing n keep the summation order deterministic
  for (std::size_t n = 1; n <= n_max; ++n) {
    p1 *= q1;
    p2 *= q2;
    if (b[n] == 0) continue;
    s += b[n] / Real(n) * (p1 + eps * p2);
  }
  return s;
}

}  // namespace detail

/// Smallest n_max making the two-sided tail (plus round-off) below tol at cutoff x = sqrt(M).
inline std::size_t lvalue_terms_needed(i64 m, const Real& tol) {
  const Real x = sqrt(Real(m));
  std::size_t n = 16;
  while (detail::two_sided_tail(x, m, n) > tol / 2) n += n / 4 + 1;
  return n;
}

/// Level and coefficient sequence of f (x) chi, with the sign-determining W-eigenvalue.
struct TwistData {
  std::vector<Real> b;
  i64 level = 0;
  int eps = 0;  // root number
};

namespace detail {

/// Sign eps for which S(x) + eps S(M/x) does not depend on the cutoff x.
inline int fit_sign(const std::vector<Real>& b, i64 level, const Real& tol) {
  const std::size_t n_max = b.size() - 1;
  const Real s = sqrt(Real(level));
  const Real x1 = s * Real("1.3"), x2 = s * Real("0.9");
  for (const Real& x : {x1, x2})
    if (two_sided_tail(x, level, n_max) > tol)
      throw Error(ErrorKind::InsufficientCoefficients, "root number fit needs more coefficients");
  bool fits[2];
  int k = 0;
  for (int eps : {1, -1}) {
    Real v1 = two_sided_sum(b, level, x1, eps, n_max);
    Real v2 = two_sided_sum(b, level, x2, eps, n_max);
    fits[k++] = abs(v1 - v2) <= tol * (1 + abs(v1));
  }
  if (fits[0] && fits[1]) throw Error(ErrorKind::AmbiguousSign, "both signs fit; raise precision");
  if (!fits[0] && !fits[1]) throw Error(ErrorKind::AmbiguousSign, "neither sign fits");
  return fits[0] ? 1 : -1;
}

}  // namespace detail

/// Level, coefficients and root number of f (x) chi. For (N, q) = 1 the level is N q^2 and
/// eps = chi(-N) eps(f). For q = 4 and 2 || N the twist of the Steinberg component at 2 has
/// conductor 2^4, so the level is 8N; the sign is then fitted numerically. A twist equal to f
/// (complex multiplication by chi) keeps level and sign.
inline TwistData twist_data(const Newform& f, const QuadCharacter& chi) {
  TwistData d;
  TwistedForm t = twist(f, chi);
  d.b = t.a;
  const int eps_f = -w_level(f);
  if (t.level) {
    d.level = *t.level;
    d.eps = chi(-f.level) * eps_f;
    return d;
  }
  bool same = true;
  for (std::size_t n = 1; n < f.a.size() && same; ++n) same = abs(t.a[n] - f.a[n]) <= Real("1e-30");
  if (same) {
    d.level = f.level;
    d.eps = eps_f;
    return d;
  }
  if (chi.conductor() == 4 && f.level % 2 == 0 && f.level % 4 != 0) {
    d.level = 8 * f.level;
    d.eps = detail::fit_sign(d.b, d.level, Real("1e-25"));
    return d;
  }
  throw Error(ErrorKind::NonCoprimeConductor, "twist of a level " + std::to_string(f.level) +
                                                  " form by conductor " + std::to_string(chi.conductor()) +
                                                  " has unknown level");
}

/// L(f (x) chi, 1) from the two-sided series with x = sqrt(M).
inline LValueResult l_value_at_1(const Newform& f, const QuadCharacter& chi, const Real& tol = Real("1e-30")) {
  TwistData d = twist_data(f, chi);
  const std::size_t need = lvalue_terms_needed(d.level, tol);
  if (f.n_max() < need)
    throw Error(ErrorKind::InsufficientCoefficients, "L-value at level " + std::to_string(d.level) +
                                                         " needs n_max = " + std::to_string(need));
  LValueResult r;
  r.twisted_level = d.level;
  r.sign = d.eps;
  r.cutoff = sqrt(Real(d.level));
  r.terms_used = f.n_max();
  r.value = detail::two_sided_sum(d.b, d.level, r.cutoff, d.eps, f.n_max());
  r.trunc_error = detail::two_sided_tail(r.cutoff, d.level, f.n_max()) + Real("1e-40") * Real(f.n_max());
  return r;
}

/// L(h, 1) for any weight-2 form h on Gamma_0(M) from the coefficients of h and of h|W_M:
/// sum b_n / n e^{-2 pi n / x} - sum w_n / n e^{-2 pi n x / M}.
inline LValueResult l_value_general(const std::vector<Real>& b, const std::vector<Real>& w, i64 m,
                                    const Real& x) {
  const std::size_t n_max = std::min(b.size(), w.size()) - 1;
  const Real two_pi = 2 * pi_value<Real>();
  const Real q1 = exp(-two_pi / x), q2 = exp(-two_pi * x / Real(m));
  Real p1 = 1, p2 = 1, s = 0;
  for (std::size_t n = 1; n <= n_max; ++n) {
    p1 *= q1;
    p2 *= q2;
    s += (b[n] * p1 - w[n] * p2) / Real(n);
  }
  LValueResult r;
  r.value = s;
  r.cutoff = x;
  r.twisted_level = m;
  r.terms_used = n_max;
  r.trunc_error = detail::two_sided_tail(x, m, n_max) + Real("1e-40") * Real(n_max);
  return r;
}

/// Same series evaluated at a different cutoff x; equal to l_value_at_1 for the correct sign.
inline Real l_value_with_cutoff(const Newform& f, const QuadCharacter& chi, const Real& x, int eps) {
  TwistData d = twist_data(f, chi);
  return detail::two_sided_sum(d.b, d.level, x, eps, f.n_max());
}

/// Root number fitted numerically: the sign for which the value is independent of the cutoff.
inline int root_number(const Newform& f, const QuadCharacter& chi, const Real& tol = Real("1e-25")) {
  TwistData d = twist_data(f, chi);
  std::vector<Real> b(d.b.begin(), d.b.begin() + static_cast<std::ptrdiff_t>(f.n_max() + 1));
  return detail::fit_sign(b, d.level, tol);
}

struct OldformBlock {
  std::array<std::array<Real, 2>, 2> gram;     // A
  std::array<std::array<Real, 2>, 2> inverse;  // A^{-1}
  Real factor = 0;                             // (p / (p^2 - 1)) (1 + chi(p) lambda / p)
  Real value = 0;                              // factor * a_m L / <f, f>
};

/// Dual pairing (a_m, L_chi) restricted to span{B_1 f, p B_p f} at level p^2.
inline OldformBlock oldform_block_pairing(i64 p, int lambda_p, int chi_p, const Real& norm,
                                          const Real& a_m, const Real& l_value) {
  if (lambda_p != 1 && lambda_p != -1)
    throw Error(ErrorKind::SingularGram, "lambda_p must be +1 or -1");
  if (!is_prime(p)) throw Error(ErrorKind::InvalidArgument, "p must be prime");
  OldformBlock b;
  const Real pp = Real(p), lam = Real(lambda_p);
  b.gram = {{{norm * pp, -lam * norm}, {-lam * norm, norm * pp}}};
  const Real c = 1 / (norm * (pp * pp - 1));
  b.inverse = {{{c * pp, c * lam}, {c * lam, c * pp}}};
  b.factor = pp / (pp * pp - 1) * (1 + Real(chi_p) * lam / pp);
  b.value = b.factor * a_m * l_value / norm;
  return b;
}

/// Riemann zeta at s > 1 by Euler-Maclaurin.
inline Real zeta_em(const Real& s, int n_terms = 30, int k_terms = 20) {
  Real sum = 0;
  for (int n = 1; n < n_terms; ++n) sum += pow(Real(n), -s);
  const Real nn = Real(n_terms);
  sum += pow(nn, 1 - s) / (s - 1) + pow(nn, -s) / 2;
  Real rising = s;  // s (s+1) ... (s + 2k - 2)
  Real fact = 2;    // (2k)!
  for (int k = 1; k <= k_terms; ++k) {
    sum += boost::math::bernoulli_b2n<Real>(k) / fact * rising * pow(nn, -s - 2 * k + 1);
    rising *= (s + 2 * k - 1) * (s + 2 * k);
    fact *= Real(2 * k + 1) * Real(2 * k + 2);
  }
  return sum;
}

struct BoundReport {
  i64 p = 0, m = 0, q = 0;
  i64 divisor_count = 0;
  Real zeta_three_halves = 0;
  Real bound = 0;
};

/// 2 sqrt3 m^{1/2} d(m) (1 - e^{-2 pi / (q sqrt p)})^{-1} (4 pi + 16 zeta(3/2)^2 pi^2 p^{-3/2}).
inline BoundReport convexity_bound(i64 p, i64 m, i64 q) {
  if (!is_prime(p)) throw Error(ErrorKind::InvalidArgument, "p must be prime");
  if (gcd(p, q) != 1) throw Error(ErrorKind::InvalidArgument, "gcd(p, q) must be 1");
  BoundReport r{p, m, q, divisor_count(m), zeta_em(Real("1.5")), 0};
  const Real pi = pi_value<Real>(), pr = Real(p);
  r.bound = 2 * sqrt(Real(3)) * sqrt(Real(m)) * Real(r.divisor_count) /
            (1 - exp(-2 * pi / (Real(q) * sqrt(pr)))) *
            (4 * pi + 16 * r.zeta_three_halves * r.zeta_three_halves * pi * pi * pow(pr, Real("-1.5")));
  return r;
}

}  // namespace qcurve
