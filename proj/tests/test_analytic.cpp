#include <gtest/gtest.h>

#include <boost/math/special_functions/bessel.hpp>

#include "qcurve/newforms.hpp"
#include "qcurve/petersson.hpp"
#include "qcurve/trace_formula.hpp"

using namespace qcurve;

TEST(Kloosterman, SmallValues) {
  EXPECT_DOUBLE_EQ(kloosterman(1, 1, 1), 1.0);
  EXPECT_NEAR(kloosterman(1, 1, 3), -1.0, 1e-12);
  EXPECT_NEAR(kloosterman(1, 1, 2), 1.0, 1e-12);
}

TEST(Kloosterman, WeilBoundSymmetryAndMultiplicativity) {
  for (i64 c = 1; c <= 500; ++c) {
    const double s = kloosterman(1, 1, c);
    EXPECT_NEAR(s, kloosterman_direct(1, 1, c), 1e-8) << c;
    EXPECT_LE(std::abs(s), divisor_count(c) * std::sqrt(double(c)) + 1e-8) << c;
    EXPECT_NEAR(kloosterman(2, 7, c), kloosterman(7, 2, c), 1e-8) << c;
    EXPECT_NEAR(kloosterman(3, 5, c), kloosterman_direct(3, 5, c), 1e-8) << c;
  }
}

TEST(Bessel, SeriesAndAsymptotic) {
  EXPECT_EQ(bessel_j1(Real(0)), 0);
  for (const char* xs : {"1e-6", "1e-8", "1e-10"}) {
    Real x(xs);
    EXPECT_LT(abs(bessel_j1(x) / x - Real("0.5")), x);
  }
  for (const char* xs : {"0.5", "3", "9.99", "10", "17.5", "30", "60", "250"}) {
    Real x(xs);
    Real ref = boost::math::cyl_bessel_j(1, x);
    EXPECT_LT(abs(bessel_j1(x) - ref), Real("1e-20")) << xs;
  }
  // First positive zero by bisection on the series.
  Real lo = 3, hi = 4;
  for (int i = 0; i < 120; ++i) {
    Real mid = (lo + hi) / 2;
    (bessel_j1(mid) > 0 ? lo : hi) = mid;
  }
  EXPECT_LT(abs(lo - Real("3.83170597020751231561443588630816")), Real("1e-25"));
  for (double x : {0.1, 2.0, 9.0, 11.0, 25.0, 80.0}) EXPECT_NEAR(bessel_j1(x), std::cyl_bessel_j(1.0, x), 1e-11);
}

namespace {

std::vector<double> f11(std::size_t n_max) {
  NewformSpace s(11);
  return to_doubles(s.newforms(n_max)[0].a);
}

}  // namespace

TEST(Petersson, Level11IntegrationAgreesWithTraceInversion) {
  PeterssonIntegrator pi(11);
  auto f = f11(pi.required_terms() + 1);
  PeterssonResult r = pi.norm(f);
  EXPECT_LT(r.error, 1e-8);
  TraceNorm t = petersson_norm_trace(11, 11 * 4000);
  EXPECT_LT(std::abs(r.value - t.value) / r.value, 1e-4);
  EXPECT_LT(std::abs(r.value - t.value), r.error + t.certified_error);
  EXPECT_THROW(petersson_norm_trace(23, 1000), Error);

  // bilinearity
  std::vector<double> g = f;
  for (auto& x : g) x *= 2;
  EXPECT_NEAR(pi.norm(g).value, 4 * r.value, 1e-12);
}

TEST(Petersson, IndexIdentityAndDegeneracyCrossTermAtLevel121) {
  PeterssonIntegrator lo(11), hi(121);
  const std::size_t n = hi.required_terms() + 1;
  auto f = f11(n);
  const double base = lo.norm(f).value;
  auto bp = degeneracy_coefficients(f, 11, n - 1);
  for (auto& x : bp) x *= 11;
  PeterssonResult same = hi.norm(f);
  PeterssonResult cross = hi.product(f, bp);
  EXPECT_LT(std::abs(same.value - 11 * base) / (11 * base), 1e-3);
  // <B_1 f, p B_p f> = -lambda_p <f, f> with lambda_11 = -1
  EXPECT_LT(std::abs(cross.value - base) / base, 1e-3);
  EXPECT_THROW(hi.product(std::vector<double>(10, 0.0), bp), Error);
}
