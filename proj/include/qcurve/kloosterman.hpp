#pragma once

// Kloosterman sums and the Bessel function J_1 for the weight-2 Petersson formula.

#include <cmath>
#include <limits>

#include "qcurve/arith.hpp"
#include "qcurve/real.hpp"

namespace qcurve {

/// S(m, n; c) by enumeration over units mod c.
inline double kloosterman_direct(i64 m, i64 n, i64 c) {
  if (c == 1) return 1.0;
  const double two_pi = 2 * M_PI;
  double s = 0;
  for (i64 x = 1; x < c; ++x) {
    if (gcd(x, c) != 1) continue;
    i64 k = mod(mod(m, c) * x + mod(n, c) * inverse_mod(x, c), c);
    s += std::cos(two_pi * static_cast<double>(k) / static_cast<double>(c));
  }
  return s;
}

/// S(m, n; c) via twisted multiplicativity over the prime-power factorization of c.
inline double kloosterman(i64 m, i64 n, i64 c) {
  if (c < 1) throw Error(ErrorKind::InvalidArgument, "modulus must be positive");
  if (c == 1) return 1.0;
  auto fac = factor(c);
  if (fac.size() == 1) return kloosterman_direct(m, n, c);
  double s = 1;
  for (auto [p, e] : fac) {
    i64 q = 1;
    for (int k = 0; k < e; ++k) q *= p;
    i64 r = c / q;
    i64 rbar = inverse_mod(mod(r, q), q);
    // S(m, n; q r) = prod over q of S(m rbar, n rbar; q)
    s *= kloosterman_direct(mod(mod(m, q) * rbar, q), mod(mod(n, q) * rbar, q), q);
  }
  return s;
}

/// J_1(x) for x >= 0: power series for small x, Hankel asymptotic expansion once its
/// smallest term certifies the requested accuracy, otherwise the series at working precision.
template <class R>
R bessel_j1(const R& x, const R& tol = R(1e-20)) {
  if (x < 0) throw Error(ErrorKind::InvalidArgument, "bessel_j1 expects x >= 0");
  if (x == 0) return R(0);
  auto series = [&]() {
    R term = x / 2, sum = term;
    const R x2 = x * x / 4;
    for (int k = 1; k < 10000; ++k) {
      term *= -x2 / (R(k) * R(k + 1));
      sum += term;
      if (abs(term) < std::numeric_limits<R>::epsilon() * abs(sum) && k > 2) break;
    }
    return sum;
  };
  if (x < 10) return series();
  // Hankel expansion with nu = 1: a_k = prod_{j=1..k} (4 - (2j-1)^2) / (k! (8x)^k).
  R p = 0, q = 0, a = 1, last = 1;
  bool certified = false;
  for (int k = 0; k < 200; ++k) {
    if (k > 0) {
      R next = a * (R(4) - R((2 * k - 1) * (2 * k - 1))) / (R(k) * 8 * x);
      if (abs(next) > abs(a) && k > 1) break;  // terms started growing
      a = next;
    }
    if (abs(a) < tol) {
      certified = true;
      last = a;
      break;
    }
    const int r = k % 4;
    if (k % 2 == 0)
      p += (r == 0 ? a : -a);
    else
      q += (r == 1 ? a : -a);
  }
  (void)last;
  if (!certified) return series();
  const R pi = boost::math::constants::pi<R>();
  const R chi = x - 3 * pi / 4;
  return sqrt(2 / (pi * x)) * (p * cos(chi) - q * sin(chi));
}

inline double bessel_j1(double x) { return bessel_j1<double>(x, 1e-15); }

}  // namespace qcurve
