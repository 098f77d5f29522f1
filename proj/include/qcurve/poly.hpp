#pragma once

// Univariate polynomials over Q: exact gcd, real-root isolation and factoring of
// polynomials whose roots are all real (characteristic polynomials of self-adjoint Hecke operators).

#include <algorithm>
#include <string>
#include <vector>

#include "qcurve/error.hpp"
#include "qcurve/qmatrix.hpp"
#include "qcurve/real.hpp"

namespace qcurve {

inline void trim(QPoly& f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
}

inline int degree(const QPoly& f) { return static_cast<int>(f.size()) - 1; }

inline QPoly derivative(const QPoly& f) {
  QPoly d;
  for (std::size_t i = 1; i < f.size(); ++i) d.push_back(f[i] * static_cast<long>(i));
  trim(d);
  return d;
}

inline QPoly monic(QPoly f) {
  trim(f);
  if (f.empty()) return f;
  mpq_class lead = f.back();
  for (auto& c : f) c /= lead;
  return f;
}

inline QPoly poly_mul(const QPoly& a, const QPoly& b) {
  if (a.empty() || b.empty()) return {};
  QPoly out(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

/// Quotient and remainder of a by nonzero b.
inline std::pair<QPoly, QPoly> poly_divmod(QPoly a, QPoly b) {
  trim(a);
  trim(b);
  if (b.empty()) throw Error(ErrorKind::ZeroInput, "polynomial division by zero");
  if (a.size() < b.size()) return {{}, a};
  QPoly q(a.size() - b.size() + 1);
  for (std::size_t k = q.size(); k-- > 0;) {
    mpq_class c = a[k + b.size() - 1] / b.back();
    q[k] = c;
    if (c != 0)
      for (std::size_t j = 0; j < b.size(); ++j) a[k + j] -= c * b[j];
  }
  trim(a);
  trim(q);
  return {q, a};
}

inline QPoly poly_gcd(QPoly a, QPoly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    QPoly r = poly_divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return monic(a);
}

/// f / gcd(f, f'), monic.
inline QPoly squarefree_part(const QPoly& f) {
  QPoly g = poly_gcd(f, derivative(f));
  return monic(poly_divmod(f, g).first);
}

inline std::string poly_string(const QPoly& f) {
  std::string s = "[";
  for (std::size_t i = 0; i < f.size(); ++i) s += (i ? "," : "") + f[i].get_str();
  return s + "]";
}

template <class R>
R poly_value(const QPoly& f, const R& x) {
  R acc = 0;
  for (std::size_t d = f.size(); d-- > 0;) acc = acc * x + to_real<R>(f[d]);
  return acc;
}

namespace detail {

template <class R>
R eval_real(const std::vector<R>& c, const R& x) {
  R acc = 0;
  for (std::size_t d = c.size(); d-- > 0;) acc = acc * x + c[d];
  return acc;
}

/// Root of c in [lo, hi] given a sign change; bisection then safeguarded Newton.
template <class R>
R refine_root(const std::vector<R>& c, const std::vector<R>& dc, R lo, R hi) {
  R flo = eval_real(c, lo);
  const R tol = std::numeric_limits<R>::epsilon() * 16;
  for (int it = 0; it < 80; ++it) {
    R mid = (lo + hi) / 2;
    R fm = eval_real(c, mid);
    if (fm == 0) return mid;
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  R x = (lo + hi) / 2;
  for (int it = 0; it < 200; ++it) {
    R fx = eval_real(c, x), dfx = eval_real(dc, x);
    R nx = (dfx != 0) ? x - fx / dfx : (lo + hi) / 2;
    if (nx <= lo || nx >= hi) nx = (lo + hi) / 2;
    R fn = eval_real(c, nx);
    if (fn == 0) return nx;
    if ((fn < 0) == (flo < 0)) {
      lo = nx;
      flo = fn;
    } else {
      hi = nx;
    }
    if (abs(nx - x) <= tol * (1 + abs(nx))) return nx;
    x = nx;
  }
  return x;
}

template <class R>
std::vector<R> real_roots_rec(const std::vector<R>& c, const R& bound) {
  const std::size_t n = c.size() - 1;
  if (n == 1) return {-c[0] / c[1]};
  std::vector<R> dc(n);
  for (std::size_t i = 1; i <= n; ++i) dc[i - 1] = c[i] * static_cast<long>(i);
  std::vector<R> crit = real_roots_rec(dc, bound);
  std::vector<R> ends{-bound};
  ends.insert(ends.end(), crit.begin(), crit.end());
  ends.push_back(bound);
  std::vector<R> roots;
  for (std::size_t k = 0; k + 1 < ends.size(); ++k) {
    R a = ends[k], b = ends[k + 1];
    R fa = eval_real(c, a), fb = eval_real(c, b);
    if (fa == 0) {
      roots.push_back(a);
      continue;
    }
    if ((fa < 0) == (fb < 0)) continue;
    roots.push_back(refine_root(c, dc, a, b));
  }
  return roots;
}

}  // namespace detail

/// All roots of a squarefree polynomial whose roots are all real, ascending.
template <class R = RealHi>
std::vector<R> real_roots(const QPoly& f_in, double min_separation = 1e-30) {
  QPoly f = monic(f_in);
  const int n = degree(f);
  if (n < 1) return {};
  std::vector<R> c(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) c[i] = to_real<R>(f[i]);
  R bound = 1;
  for (int i = 0; i < n; ++i) bound = std::max(bound, R(1 + abs(c[i])));
  bound += 1;
  std::vector<R> roots = detail::real_roots_rec(c, bound);
  if (static_cast<int>(roots.size()) != n)
    throw Error(ErrorKind::PrecisionExhausted,
                "found " + std::to_string(roots.size()) + " real roots of a degree " +
                    std::to_string(n) + " polynomial");
  for (std::size_t i = 1; i < roots.size(); ++i)
    if (roots[i] - roots[i - 1] < min_separation)
      throw Error(ErrorKind::PrecisionExhausted, "root separation below threshold");
  return roots;
}

/// Irreducible monic factors over Q of a squarefree monic polynomial with integer
/// coefficients and only real roots.
inline std::vector<QPoly> factor_real_rooted(const QPoly& f_in) {
  QPoly f = monic(f_in);
  for (const auto& c : f)
    if (c.get_den() != 1) throw Error(ErrorKind::InvalidArgument, "polynomial is not integral");
  std::vector<RealHi> roots = real_roots<RealHi>(f);
  std::vector<QPoly> factors;
  const RealHi tol = RealHi("1e-50");

  // Candidate factor from a subset of roots; integral coefficients or nothing.
  auto try_subset = [&](const std::vector<std::size_t>& idx, QPoly& out) {
    RealHi tr = 0;
    for (auto i : idx) tr += roots[i];
    if (abs(tr - round(tr)) > tol * (1 + abs(tr))) return false;
    std::vector<RealHi> c{RealHi(1)};
    for (auto i : idx) {
      std::vector<RealHi> nc(c.size() + 1, RealHi(0));
      for (std::size_t d = 0; d < c.size(); ++d) {
        nc[d + 1] += c[d];
        nc[d] -= roots[i] * c[d];
      }
      c = std::move(nc);
    }
    out.assign(c.size(), mpq_class(0));
    for (std::size_t d = 0; d < c.size(); ++d) {
      RealHi r = round(c[d]);
      if (abs(c[d] - r) > tol * (1 + abs(c[d]))) return false;
      out[d] = mpq_class(to_mpz(r));
    }
    return true;
  };

  std::vector<std::size_t> remaining(roots.size());
  for (std::size_t i = 0; i < roots.size(); ++i) remaining[i] = i;
  QPoly rest = f;
  while (!remaining.empty()) {
    const std::size_t n = remaining.size();
    bool found = false;
    QPoly cand;
    // Smallest factor containing the first remaining root.
    for (std::size_t k = 1; k < n && !found; ++k) {
      std::vector<std::size_t> pick(k);
      for (std::size_t i = 0; i < k; ++i) pick[i] = i;  // positions into remaining, pick[0] = 0
      while (true) {
        std::vector<std::size_t> idx(k);
        for (std::size_t i = 0; i < k; ++i) idx[i] = remaining[pick[i]];
        if (try_subset(idx, cand)) {
          auto [q, r] = poly_divmod(rest, cand);
          if (r.empty()) {
            factors.push_back(cand);
            rest = q;
            std::vector<std::size_t> next;
            for (std::size_t i = 0; i < n; ++i)
              if (std::find(pick.begin(), pick.end(), i) == pick.end()) next.push_back(remaining[i]);
            remaining = std::move(next);
            found = true;
            break;
          }
        }
        // Next combination with pick[0] fixed at 0.
        std::size_t i = k;
        while (i > 1 && pick[i - 1] == n - k + i - 1) --i;
        if (i <= 1) break;
        ++pick[i - 1];
        for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
      }
    }
    if (!found) {
      factors.push_back(monic(rest));
      break;
    }
  }
  std::sort(factors.begin(), factors.end(), [](const QPoly& a, const QPoly& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    for (std::size_t i = a.size(); i-- > 0;)
      if (a[i] != b[i]) return a[i] < b[i];
    return false;
  });
  return factors;
}

/// Irreducible factors of f with multiplicities.
inline std::vector<std::pair<QPoly, int>> factor_with_multiplicity(const QPoly& f) {
  std::vector<std::pair<QPoly, int>> out;
  QPoly rest = monic(f);
  for (const QPoly& g : factor_real_rooted(squarefree_part(rest))) {
    int e = 0;
    while (true) {
      auto [q, r] = poly_divmod(rest, g);
      if (!r.empty()) break;
      rest = q;
      ++e;
    }
    out.emplace_back(g, e);
  }
  return out;
}

}  // namespace qcurve
