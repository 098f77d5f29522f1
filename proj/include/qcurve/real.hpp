#pragma once

#include <gmpxx.h>

#include <boost/multiprecision/mpfr.hpp>

#include <iomanip>
#include <sstream>
#include <string>

namespace qcurve {

/// 50-digit working precision for embeddings, L-values and pairings.
using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<50>,
                                           boost::multiprecision::et_off>;
/// Extra headroom for root isolation.
using RealHi = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<100>,
                                             boost::multiprecision::et_off>;

template <class R>
inline R to_real(const mpq_class& q) {
  R x;
  mpfr_set_q(x.backend().data(), q.get_mpq_t(), MPFR_RNDN);
  return x;
}

template <class R>
inline R to_real(const mpz_class& z) {
  R x;
  mpfr_set_z(x.backend().data(), z.get_mpz_t(), MPFR_RNDN);
  return x;
}

/// Nearest integer.
template <class R>
inline mpz_class to_mpz(const R& x) {
  mpz_class z;
  mpfr_get_z(z.get_mpz_t(), x.backend().data(), MPFR_RNDN);
  return z;
}

template <class R>
inline R pi_value() {
  return boost::math::constants::pi<R>();
}

/// Decimal string with a fixed number of significant digits (stable across runs).
template <class R>
inline std::string decimal(const R& x, int digits = 30) {
  std::ostringstream os;
  os << std::setprecision(digits) << std::scientific << x;
  return os.str();
}

inline std::string decimal(double x, int digits = 17) {
  std::ostringstream os;
  os << std::setprecision(digits) << std::scientific << x;
  return os.str();
}

}  // namespace qcurve
