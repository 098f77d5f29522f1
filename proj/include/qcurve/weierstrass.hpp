#pragma once

// Weierstrass models over Z[i] and Tate's algorithm at pi = 1 + i.

#include <string>
#include <vector>

#include "qcurve/gaussian.hpp"

namespace qcurve {

struct Weierstrass {
  GaussianInt a1, a2, a3, a4, a6;

  GaussianInt b2() const { return a1 * a1 + GaussianInt(4L) * a2; }
  GaussianInt b4() const { return GaussianInt(2L) * a4 + a1 * a3; }
  GaussianInt b6() const { return a3 * a3 + GaussianInt(4L) * a6; }
  GaussianInt b8() const {
    return a1 * a1 * a6 + GaussianInt(4L) * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
  }
  GaussianInt c4() const {
    GaussianInt B2 = b2();
    return B2 * B2 - GaussianInt(24L) * b4();
  }
  GaussianInt c6() const {
    GaussianInt B2 = b2();
    return -(B2 * B2 * B2) + GaussianInt(36L) * B2 * b4() - GaussianInt(216L) * b6();
  }
  GaussianInt discriminant() const {
    GaussianInt B2 = b2(), B4 = b4(), B6 = b6(), B8 = b8();
    return -(B2 * B2 * B8) - GaussianInt(8L) * B4 * B4 * B4 - GaussianInt(27L) * B6 * B6 +
           GaussianInt(9L) * B2 * B4 * B6;
  }

  /// Substitution x = x' + r, y = y' + s x' + t (u = 1).
  Weierstrass rst(const GaussianInt& r, const GaussianInt& s, const GaussianInt& t) const {
    const GaussianInt two(2L), three(3L);
    Weierstrass e;
    e.a1 = a1 + two * s;
    e.a2 = a2 - s * a1 + three * r - s * s;
    e.a3 = a3 + r * a1 + two * t;
    e.a4 = a4 - s * a3 + two * r * a2 - (t + r * s) * a1 + three * r * r - two * s * t;
    e.a6 = a6 + r * a4 + r * r * a2 + r * r * r - t * a3 - t * t - r * t * a1;
    return e;
  }

  friend bool operator==(const Weierstrass& x, const Weierstrass& y) {
    return x.a1 == y.a1 && x.a2 == y.a2 && x.a3 == y.a3 && x.a4 == y.a4 && x.a6 == y.a6;
  }
};

struct TateResult {
  std::string kodaira;      // "I0", "I3", "II", "I2*", ...
  int ord_delta = 0;        // of the model handed in
  int conductor_exponent = 0;
  int nonminimal_steps = 0;
  std::vector<std::string> trace;  // substitutions applied, for reports
};

namespace detail {

inline int vpi(const GaussianInt& z) { return z.is_zero() ? 1 << 20 : val_pi(z); }

inline GaussianInt lift(int residue) { return GaussianInt(static_cast<long>(residue)); }

inline GaussianInt div_pi_pow(const GaussianInt& z, unsigned k) {
  return divide_exact(z, pow(GaussianInt::pi(), k));
}

}  // namespace detail

/// Tate's algorithm over the completion of Z[i] at pi = 1+i (residue field F_2).
/// Square roots and inverses in F_2 are the identity on {0, 1}.
inline TateResult tate_algorithm_pi(Weierstrass e) {
  using detail::div_pi_pow;
  using detail::lift;
  using detail::vpi;
  const GaussianInt pi = GaussianInt::pi();
  TateResult res;
  res.ord_delta = vpi(e.discriminant());

  while (true) {
    const int n = vpi(e.discriminant());
    if (n == 0) {
      res.kodaira = "I0";
      res.conductor_exponent = 0;
      return res;
    }

    // Move the singular point of the reduction to (0,0).
    GaussianInt r, t;
    if (vpi(e.b2()) > 0) {
      r = lift(residue_pi(e.a4));
      t = lift(residue_pi(((r + e.a2) * r + e.a4) * r + e.a6));
    } else {
      r = lift(residue_pi(e.a3));
      t = lift(residue_pi(e.a4 + r * r));
    }
    e = e.rst(r, 0L, t);
    res.trace.push_back("rst(" + r.str() + ",0," + t.str() + ")");

    if (vpi(e.c4()) == 0) {
      res.kodaira = "I" + std::to_string(n);
      res.conductor_exponent = 1;
      return res;
    }
    if (vpi(e.a6) < 2) {
      res.kodaira = "II";
      res.conductor_exponent = n;
      return res;
    }
    if (vpi(e.b8()) < 3) {
      res.kodaira = "III";
      res.conductor_exponent = n - 1;
      return res;
    }
    if (vpi(e.b6()) < 3) {
      res.kodaira = "IV";
      res.conductor_exponent = n - 2;
      return res;
    }

    // pi | a1, a2; pi^2 | a3, a4; pi^3 | a6.
    GaussianInt s = lift(residue_pi(e.a2));
    t = pi * lift(residue_pi(div_pi_pow(e.a6, 2)));
    e = e.rst(0L, s, t);
    res.trace.push_back("rst(0," + s.str() + "," + t.str() + ")");

    const GaussianInt b = div_pi_pow(e.a2, 1);
    const GaussianInt c = div_pi_pow(e.a4, 2);
    const GaussianInt d = div_pi_pow(e.a6, 3);
    const GaussianInt w = GaussianInt(27L) * d * d - b * b * c * c + GaussianInt(4L) * b * b * b * d -
                          GaussianInt(18L) * b * c * d + GaussianInt(4L) * c * c * c;
    const GaussianInt x = GaussianInt(3L) * c - b * b;

    if (vpi(w) == 0) {
      res.kodaira = "I0*";
      res.conductor_exponent = n - 4;
      return res;
    }

    if (vpi(x) == 0) {
      // Double root of T^3 + bT^2 + cT + d; in characteristic 2 it is sqrt(c).
      r = pi * lift(residue_pi(c));
      e = e.rst(r, 0L, 0L);
      res.trace.push_back("rst(" + r.str() + ",0,0)");
      int ix = 3, iy = 3;
      GaussianInt mx = pow(pi, 2), my = mx;
      while (true) {
        GaussianInt xa2 = div_pi_pow(e.a2, 1);
        GaussianInt xa3 = divide_exact(e.a3, my);
        GaussianInt xa6 = divide_exact(e.a6, mx * my);
        if (vpi(xa3 * xa3 + GaussianInt(4L) * xa6) == 0) break;
        t = my * lift(residue_pi(xa6));
        e = e.rst(0L, 0L, t);
        res.trace.push_back("rst(0,0," + t.str() + ")");
        my *= pi;
        ++iy;
        xa2 = div_pi_pow(e.a2, 1);
        GaussianInt xa4 = divide_exact(e.a4, pi * mx);
        xa6 = divide_exact(e.a6, mx * my);
        if (vpi(xa4 * xa4 - GaussianInt(4L) * xa2 * xa6) == 0) break;
        // xa2 is a unit, so xa6/xa2 reduces to xa6 in F_2.
        r = mx * lift(residue_pi(xa6));
        e = e.rst(r, 0L, 0L);
        res.trace.push_back("rst(" + r.str() + ",0,0)");
        mx *= pi;
        ++ix;
      }
      const int m = ix + iy - 5;
      res.kodaira = "I" + std::to_string(m) + "*";
      res.conductor_exponent = n - m - 4;
      return res;
    }

    // Triple root, at -b/3 = b in F_2.
    r = pi * lift(residue_pi(b));
    e = e.rst(r, 0L, 0L);
    res.trace.push_back("rst(" + r.str() + ",0,0)");
    const GaussianInt x3 = div_pi_pow(e.a3, 2);
    const GaussianInt x6 = div_pi_pow(e.a6, 4);
    if (vpi(x3 * x3 + GaussianInt(4L) * x6) == 0) {
      res.kodaira = "IV*";
      res.conductor_exponent = n - 6;
      return res;
    }
    t = pow(pi, 2) * lift(residue_pi(x6));
    e = e.rst(0L, 0L, t);
    res.trace.push_back("rst(0,0," + t.str() + ")");
    if (vpi(e.a4) < 4) {
      res.kodaira = "III*";
      res.conductor_exponent = n - 7;
      return res;
    }
    if (vpi(e.a6) < 6) {
      res.kodaira = "II*";
      res.conductor_exponent = n - 8;
      return res;
    }
    // Non-minimal: scale by u = pi.
    e = Weierstrass{div_pi_pow(e.a1, 1), div_pi_pow(e.a2, 2), div_pi_pow(e.a3, 3),
                    div_pi_pow(e.a4, 4), div_pi_pow(e.a6, 6)};
    ++res.nonminimal_steps;
    res.trace.push_back("scale(pi)");
  }
}

}  // namespace qcurve
