#pragma once

// Weight-2 Petersson formula on Gamma_0(N):
//   (a_m, a_n)_N       = 4 pi sqrt(mn) [delta_{mn} - 2 pi sum_{N | c} S(m, n; c) / c J_1(4 pi sqrt(mn) / c)]
//   (a_m, a_n o W_N)_N = -8 pi^2 sqrt(mn) sum_{(g, N) = 1} S(m Nbar, n; g) / (g sqrt N) J_1(4 pi sqrt(mn) / (g sqrt N))
// where (l1, l2)_N = sum_f l1(f) l2(f) / <f, f> over an orthogonal basis.

#include <cmath>
#include <complex>
#include <vector>

#include "qcurve/arith.hpp"
#include "qcurve/kloosterman.hpp"

namespace qcurve {

enum class CuspPair { InfinityInfinity, InfinityZero };

struct TraceSum {
  double value = 0;
  double certified_error = 0;  // Weil bound on the c-tail
  double empirical_error = 0;  // spread of partial sums over the last half of the c range
};

namespace detail {

/// sum_{k > K} d(k) k^{-3/2} <= 3 (ln K + 3) / sqrt K.
inline double divisor_tail(double k) {
  if (k < 1) k = 1;
  return 3 * (std::log(k) + 3) / std::sqrt(k);
}

/// Units mod c and their inverses (batch inversion from one extended gcd).
inline void unit_inverses(i64 c, std::vector<i64>& units, std::vector<i64>& inv) {
  units.clear();
  inv.clear();
  if (c == 1) {
    units.push_back(0);
    inv.push_back(0);
    return;
  }
  std::vector<char> ok(static_cast<std::size_t>(c), 1);
  ok[0] = 0;
  for (i64 p : prime_divisors(c))
    for (i64 k = p; k < c; k += p) ok[k] = 0;
  for (i64 x = 1; x < c; ++x)
    if (ok[x]) units.push_back(x);
  const std::size_t n = units.size();
  std::vector<i64> prefix(n);
  i64 acc = 1;
  for (std::size_t i = 0; i < n; ++i) {
    acc = static_cast<i64>((static_cast<__int128>(acc) * units[i]) % c);
    prefix[i] = acc;
  }
  i64 run = inverse_mod(acc, c);
  inv.assign(n, 0);
  for (std::size_t i = n; i-- > 0;) {
    const i64 before = i ? prefix[i - 1] : 1;
    inv[i] = static_cast<i64>((static_cast<__int128>(run) * before) % c);
    run = static_cast<i64>((static_cast<__int128>(run) * units[i]) % c);
  }
}

}  // namespace detail

/// Pairings (a_m, a_n)_N or (a_m, a_n o W_N)_N for n = 1..n_max, c-sum truncated at c_max.
inline std::vector<TraceSum> trace_pairings(i64 level, i64 m, std::size_t n_max, i64 c_max,
                                            CuspPair pair) {
  const bool zero = pair == CuspPair::InfinityZero;
  const double sqrt_n = std::sqrt(static_cast<double>(level));
  std::vector<double> sum(n_max + 1, 0.0), lo(n_max + 1, 0.0), hi(n_max + 1, 0.0);
  std::vector<bool> seen(n_max + 1, false);
  std::vector<std::complex<double>> s(n_max + 1), roots;
  std::vector<i64> units, inverses;
  const i64 step = zero ? 1 : level;
  for (i64 c = step; c <= c_max; c += step) {
    if (zero && gcd(c, level) != 1) continue;
    i64 mm = zero ? mod(m * inverse_mod(mod(level, c), c), c) : mod(m, c);
    if (c == 1) mm = 0;
    // S(mm, n; c) = sum_x e(mm x / c) e(n xbar / c) for all n at once.
    std::fill(s.begin(), s.end(), std::complex<double>(0));
    const double two_pi_c = 2 * M_PI / static_cast<double>(c);
    roots.resize(static_cast<std::size_t>(c));
    for (i64 k = 0; k < c; ++k) roots[k] = std::polar(1.0, two_pi_c * static_cast<double>(k));
    detail::unit_inverses(c, units, inverses);
    for (std::size_t u = 0; u < units.size(); ++u) {
      const i64 x = units[u], xb = inverses[u];
      const std::complex<double> base = roots[(mm * x) % c];
      const std::complex<double> step_n = roots[xb];
      std::complex<double> cur = base;
      for (std::size_t n = 1; n <= n_max; ++n) {
        cur *= step_n;
        s[n] += cur;
      }
    }
    const double cc = zero ? static_cast<double>(c) * sqrt_n : static_cast<double>(c);
    for (std::size_t n = 1; n <= n_max; ++n) {
      const double arg = 4 * M_PI * std::sqrt(static_cast<double>(m) * static_cast<double>(n)) / cc;
      sum[n] += s[n].real() / cc * bessel_j1(arg);
      if (2 * c >= c_max) {
        if (!seen[n]) {
          lo[n] = hi[n] = sum[n];
          seen[n] = true;
        }
        lo[n] = std::min(lo[n], sum[n]);
        hi[n] = std::max(hi[n], sum[n]);
      }
    }
  }
  std::vector<TraceSum> out(n_max + 1);
  for (std::size_t n = 1; n <= n_max; ++n) {
    const double mn = static_cast<double>(m) * static_cast<double>(n);
    const double pre = 4 * M_PI * std::sqrt(mn);
    const double g = std::sqrt(static_cast<double>(gcd(m, static_cast<i64>(n))));
    TraceSum& t = out[n];
    if (!zero) {
      t.value = pre * ((static_cast<i64>(n) == m ? 1.0 : 0.0) - 2 * M_PI * sum[n]);
      const double k = std::floor(static_cast<double>(c_max) / static_cast<double>(level));
      t.certified_error = pre * 2 * M_PI * 2 * M_PI * std::sqrt(mn) * g *
                          static_cast<double>(divisor_count(level)) *
                          std::pow(static_cast<double>(level), -1.5) * detail::divisor_tail(k);
    } else {
      t.value = -pre * 2 * M_PI * sum[n];
      t.certified_error = pre * 2 * M_PI * 2 * M_PI * std::sqrt(mn) * g / static_cast<double>(level) *
                          detail::divisor_tail(static_cast<double>(c_max));
    }
    t.empirical_error = pre * 2 * M_PI * (hi[n] - lo[n]) / 2;
  }
  return out;
}

struct TraceNorm {
  double value = 0;
  double certified_error = 0;
  double empirical_error = 0;
};

/// <f, f> = 1 / (a_1, a_1)_N when S_2(Gamma_0(N)) is spanned by one newform.
inline TraceNorm petersson_norm_trace(i64 level, i64 c_max) {
  if (genus_x0(level) != 1)
    throw Error(ErrorKind::UnsupportedLevel,
                "trace inversion needs a one-dimensional cusp space, level " + std::to_string(level));
  TraceSum t = trace_pairings(level, 1, 1, c_max, CuspPair::InfinityInfinity)[1];
  TraceNorm r;
  r.value = 1 / t.value;
  auto spread = [&](double e) {
    if (e >= t.value) return std::numeric_limits<double>::infinity();
    return 1 / (t.value - e) - r.value;
  };
  r.certified_error = spread(t.certified_error);
  r.empirical_error = spread(t.empirical_error);
  return r;
}

}  // namespace qcurve
