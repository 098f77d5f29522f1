#pragma once

// Small-integer number theory helpers shared by every module.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "qcurve/error.hpp"

namespace qcurve {

using i64 = std::int64_t;

inline i64 mod(i64 a, i64 m) {
  i64 r = a % m;
  return r < 0 ? r + m : r;
}

inline i64 gcd(i64 a, i64 b) { return std::gcd(a, b); }

/// Extended Euclid: returns g = gcd(a,b) and x,y with a*x + b*y = g.
inline i64 xgcd(i64 a, i64 b, i64& x, i64& y) {
  i64 x0 = 1, y0 = 0, x1 = 0, y1 = 1;
  while (b != 0) {
    i64 q = a / b;
    i64 t = a - q * b;
    a = b;
    b = t;
    t = x0 - q * x1;
    x0 = x1;
    x1 = t;
    t = y0 - q * y1;
    y0 = y1;
    y1 = t;
  }
  if (a < 0) {
    a = -a;
    x0 = -x0;
    y0 = -y0;
  }
  x = x0;
  y = y0;
  return a;
}

/// Inverse of a modulo m; requires gcd(a,m) = 1.
inline i64 inverse_mod(i64 a, i64 m) {
  if (m == 1) return 0;
  i64 x, y;
  i64 g = xgcd(mod(a, m), m, x, y);
  if (g != 1) throw Error(ErrorKind::InvalidArgument, "inverse_mod: not a unit");
  return mod(x, m);
}

inline bool is_prime(i64 n) {
  if (n < 2) return false;
  for (i64 p : {2, 3, 5, 7, 11, 13}) {
    if (n % p == 0) return n == p;
  }
  for (i64 d = 17; d * d <= n; d += 2) {
    if (n % d == 0) return false;
  }
  return true;
}

inline std::vector<i64> primes_up_to(i64 n) {
  std::vector<i64> out;
  if (n < 2) return out;
  std::vector<bool> composite(static_cast<std::size_t>(n + 1), false);
  for (i64 i = 2; i <= n; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (i64 j = i * i; j <= n; j += i) composite[j] = true;
  }
  return out;
}

/// Prime factorization as (prime, exponent) pairs in increasing order.
inline std::vector<std::pair<i64, int>> factor(i64 n) {
  std::vector<std::pair<i64, int>> out;
  if (n < 0) n = -n;
  for (i64 p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

inline std::vector<i64> prime_divisors(i64 n) {
  std::vector<i64> out;
  for (auto [p, e] : factor(n)) out.push_back(p);
  return out;
}

inline std::vector<i64> divisors(i64 n) {
  std::vector<i64> out{1};
  for (auto [p, e] : factor(n)) {
    std::size_t sz = out.size();
    i64 pk = 1;
    for (int k = 1; k <= e; ++k) {
      pk *= p;
      for (std::size_t i = 0; i < sz; ++i) out.push_back(out[i] * pk);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline i64 divisor_count(i64 n) {
  i64 d = 1;
  for (auto [p, e] : factor(n)) d *= (e + 1);
  return d;
}

inline i64 euler_phi(i64 n) {
  i64 r = n;
  for (auto [p, e] : factor(n)) r = r / p * (p - 1);
  return r;
}

/// Largest e with p^e | n (n != 0).
inline int valuation(i64 n, i64 p) {
  if (n == 0) throw Error(ErrorKind::ZeroInput, "valuation of 0");
  int e = 0;
  while (n % p == 0) {
    n /= p;
    ++e;
  }
  return e;
}

/// Index of Gamma_0(N) in SL_2(Z).
inline i64 gamma0_index(i64 n) {
  i64 r = n;
  for (auto [p, e] : factor(n)) r = r / p * (p + 1);
  return r;
}

/// Genus of X_0(N) from the Riemann-Hurwitz count of elliptic points and cusps.
inline i64 genus_x0(i64 n) {
  i64 mu = gamma0_index(n);
  i64 nu2 = 1, nu3 = 1;
  if (n % 4 == 0) nu2 = 0;
  if (n % 9 == 0) nu3 = 0;
  for (auto [p, e] : factor(n)) {
    if (p == 2) {
      // (-4/2) = 0
    } else if (nu2 != 0) {
      nu2 *= (p % 4 == 1) ? 2 : 0;
    }
    if (p == 3) {
      // (-3/3) = 0
    } else if (nu3 != 0) {
      nu3 *= (p % 3 == 1) ? 2 : 0;
    }
  }
  i64 cusps = 0;
  for (i64 d : divisors(n)) cusps += euler_phi(gcd(d, n / d));
  // 12 g = 12 + mu - 3 nu2 - 4 nu3 - 6 cusps
  i64 twelve_g = 12 + mu - 3 * nu2 - 4 * nu3 - 6 * cusps;
  return twelve_g / 12;
}

inline i64 cusp_count_x0(i64 n) {
  i64 c = 0;
  for (i64 d : divisors(n)) c += euler_phi(gcd(d, n / d));
  return c;
}

/// Exact integer p-th root when x is a perfect p-th power (x >= 0 for even p).
inline std::optional<mpz_class> exact_root(const mpz_class& x, unsigned long p) {
  if (p == 0) throw Error(ErrorKind::InvalidArgument, "exact_root: p = 0");
  if (x < 0 && p % 2 == 0) return std::nullopt;
  mpz_class r;
  if (mpz_root(r.get_mpz_t(), x.get_mpz_t(), p) != 0) return r;
  return std::nullopt;
}

inline mpz_class gcd(const mpz_class& a, const mpz_class& b) {
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

/// Kronecker-style symbol (-4 / n): the nontrivial character mod 4.
inline int chi4(i64 n) {
  i64 r = mod(n, 4);
  return r == 1 ? 1 : (r == 3 ? -1 : 0);
}

}  // namespace qcurve
