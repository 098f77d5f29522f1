#pragma once

// Exact arithmetic in Z[i], valuations at Gaussian primes.

#include <gmpxx.h>

#include <ostream>
#include <sstream>
#include <string>
#include <utility>

#include "qcurve/arith.hpp"
#include "qcurve/error.hpp"

namespace qcurve {

class GaussianInt {
 public:
  GaussianInt() = default;
  GaussianInt(long re) : re_(re), im_(0) {}  // NOLINT: integers embed in Z[i]
  GaussianInt(mpz_class re) : re_(std::move(re)), im_(0) {}  // NOLINT
  GaussianInt(mpz_class re, mpz_class im) : re_(std::move(re)), im_(std::move(im)) {}
  GaussianInt(long re, long im) : re_(re), im_(im) {}

  static GaussianInt i() { return {0L, 1L}; }
  static GaussianInt pi() { return {1L, 1L}; }

  const mpz_class& re() const { return re_; }
  const mpz_class& im() const { return im_; }

  bool is_zero() const { return re_ == 0 && im_ == 0; }
  bool is_unit() const { return norm() == 1; }

  mpz_class norm() const { return re_ * re_ + im_ * im_; }
  GaussianInt conj() const { return {re_, -im_}; }

  GaussianInt& operator+=(const GaussianInt& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
  }
  GaussianInt& operator-=(const GaussianInt& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
  }
  GaussianInt& operator*=(const GaussianInt& o) {
    mpz_class r = re_ * o.re_ - im_ * o.im_;
    mpz_class s = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(r);
    im_ = std::move(s);
    return *this;
  }

  friend GaussianInt operator+(GaussianInt a, const GaussianInt& b) { return a += b; }
  friend GaussianInt operator-(GaussianInt a, const GaussianInt& b) { return a -= b; }
  friend GaussianInt operator*(GaussianInt a, const GaussianInt& b) { return a *= b; }
  friend GaussianInt operator-(const GaussianInt& a) { return {-a.re_, -a.im_}; }
  friend bool operator==(const GaussianInt& a, const GaussianInt& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }
  friend bool operator!=(const GaussianInt& a, const GaussianInt& b) { return !(a == b); }

  std::string str() const {
    std::ostringstream os;
    os << *this;
    return os.str();
  }

  friend std::ostream& operator<<(std::ostream& os, const GaussianInt& z) {
    if (z.im_ == 0) return os << z.re_;
    if (z.re_ == 0) return os << z.im_ << "i";
    os << z.re_ << (z.im_ < 0 ? "-" : "+");
    mpz_class a = abs(z.im_);
    return os << a << "i";
  }

 private:
  mpz_class re_{0};
  mpz_class im_{0};
};

inline GaussianInt pow(GaussianInt base, unsigned e) {
  GaussianInt r(1L);
  while (e > 0) {
    if (e & 1u) r *= base;
    base *= base;
    e >>= 1u;
  }
  return r;
}

namespace detail {
// ceil((2x - n) / (2n)) for n > 0: nearest integer to x/n, ties to the smaller one.
inline mpz_class round_ties_down(const mpz_class& x, const mpz_class& n) {
  mpz_class num = 2 * x - n;
  mpz_class den = 2 * n;
  mpz_class q;
  mpz_cdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return q;
}
}  // namespace detail

/// Euclidean division a = q*b + r with q the nearest lattice point to a/b.
inline std::pair<GaussianInt, GaussianInt> divmod(const GaussianInt& a, const GaussianInt& b) {
  if (b.is_zero()) throw Error(ErrorKind::ZeroInput, "division by zero in Z[i]");
  GaussianInt num = a * b.conj();
  mpz_class n = b.norm();
  GaussianInt q(detail::round_ties_down(num.re(), n), detail::round_ties_down(num.im(), n));
  GaussianInt r = a - q * b;
  return {q, r};
}

inline bool divides(const GaussianInt& b, const GaussianInt& a) {
  if (b.is_zero()) return a.is_zero();
  GaussianInt num = a * b.conj();
  mpz_class n = b.norm();
  return mpz_divisible_p(num.re().get_mpz_t(), n.get_mpz_t()) &&
         mpz_divisible_p(num.im().get_mpz_t(), n.get_mpz_t());
}

inline GaussianInt divide_exact(const GaussianInt& a, const GaussianInt& b) {
  if (b.is_zero()) throw Error(ErrorKind::ZeroInput, "divide_exact by zero");
  GaussianInt num = a * b.conj();
  mpz_class n = b.norm();
  if (!mpz_divisible_p(num.re().get_mpz_t(), n.get_mpz_t()) ||
      !mpz_divisible_p(num.im().get_mpz_t(), n.get_mpz_t())) {
    throw Error(ErrorKind::NonDivisible, a.str() + " / " + b.str());
  }
  mpz_class r, s;
  mpz_divexact(r.get_mpz_t(), num.re().get_mpz_t(), n.get_mpz_t());
  mpz_divexact(s.get_mpz_t(), num.im().get_mpz_t(), n.get_mpz_t());
  return {r, s};
}

/// The associate with re > 0 and im >= 0 (zero maps to zero).
inline GaussianInt normalize_unit(const GaussianInt& z) {
  if (z.is_zero()) return z;
  GaussianInt w = z;
  for (int k = 0; k < 4; ++k) {
    if (w.re() > 0 && w.im() >= 0) return w;
    w *= GaussianInt::i();
  }
  return w;  // unreachable
}

inline GaussianInt gcd(GaussianInt a, GaussianInt b) {
  while (!b.is_zero()) {
    GaussianInt r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return normalize_unit(a);
}

/// Valuation at pi = 1 + i.
inline int val_pi(const GaussianInt& z) {
  if (z.is_zero()) throw Error(ErrorKind::ZeroInput, "val_pi(0)");
  // (a+bi)/(1+i) = ((a+b) + (b-a)i)/2, exact iff a = b mod 2.
  mpz_class a = z.re(), b = z.im();
  int e = 0;
  while (true) {
    mpz_class s = a + b;
    if (mpz_odd_p(s.get_mpz_t())) return e;
    mpz_class na = s / 2;
    mpz_class nb = (b - a) / 2;
    a = std::move(na);
    b = std::move(nb);
    ++e;
  }
}

/// True for q whose norm is a rational prime, or an associate of a rational prime = 3 mod 4.
inline bool is_gaussian_prime(const GaussianInt& q) {
  if (q.is_zero()) return false;
  mpz_class n = q.norm();
  if (mpz_probab_prime_p(n.get_mpz_t(), 30) > 0) return true;
  mpz_class p;
  if (q.re() == 0) p = abs(q.im());
  else if (q.im() == 0) p = abs(q.re());
  else return false;
  return mpz_probab_prime_p(p.get_mpz_t(), 30) > 0 && (p % 4 == 3);
}

inline int val_at(const GaussianInt& z, const GaussianInt& q) {
  if (!is_gaussian_prime(q)) throw Error(ErrorKind::NotPrime, q.str() + " is not a Gaussian prime");
  if (z.is_zero()) throw Error(ErrorKind::ZeroInput, "val_at(0)");
  GaussianInt w = z;
  int e = 0;
  while (divides(q, w)) {
    w = divide_exact(w, q);
    ++e;
  }
  return e;
}

/// Residue of z in Z[i]/(1+i) = F_2.
inline int residue_pi(const GaussianInt& z) {
  mpz_class s = z.re() + z.im();
  return mpz_odd_p(s.get_mpz_t()) ? 1 : 0;
}

/// Exact element of Q(i) kept as num/den with den normalized and gcd(num, den) = 1.
struct GaussianRational {
  GaussianInt num;
  GaussianInt den{1L};

  static GaussianRational make(const GaussianInt& n, const GaussianInt& d) {
    if (d.is_zero()) throw Error(ErrorKind::ZeroInput, "zero denominator");
    GaussianInt g = gcd(n, d);
    GaussianInt nn = divide_exact(n, g), dd = divide_exact(d, g);
    // Move the unit of the denominator into the numerator.
    GaussianInt nd = normalize_unit(dd);
    GaussianInt u = divide_exact(dd, nd);  // unit
    return {divide_exact(nn, u), nd};
  }

  std::string str() const {
    if (den == GaussianInt(1L)) return num.str();
    return "(" + num.str() + ")/(" + den.str() + ")";
  }

  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.num * b.den == b.num * a.den;
  }
};

}  // namespace qcurve
