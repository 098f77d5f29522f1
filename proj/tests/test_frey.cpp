#include <gtest/gtest.h>

#include <random>

#include "qcurve/frey.hpp"

using qcurve::GaussianInt;
using qcurve::ErrorKind;

namespace {

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const qcurve::Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::InvalidArgument;
}

mpz_class mod4(const mpz_class& b) {
  mpz_class r;
  mpz_fdiv_r_ui(r.get_mpz_t(), b.get_mpz_t(), 4);
  return r;
}

}  // namespace

TEST(Frey, NormalizeSolution) {
  auto t = qcurve::normalize_solution(qcurve::make_triple(1, 2, 5, 1));
  EXPECT_EQ(t.B, 2);
  auto u = qcurve::normalize_solution(qcurve::make_triple(0, 1, 1, 7));
  EXPECT_EQ(u.B, -1);
  EXPECT_EQ(mod4(u.B), 3);
  // 2^4 + 5^2 = 41
  auto v = qcurve::normalize_solution(qcurve::make_triple(2, 5, 41, 1));
  EXPECT_EQ(v.B, -5);
  EXPECT_EQ(qcurve::normalize_solution(v), v);
  EXPECT_EQ(kind_of([] { qcurve::normalize_solution(qcurve::make_triple(1, 2, 6, 1)); }),
            ErrorKind::InvalidTriple);
  EXPECT_EQ(kind_of([] { qcurve::normalize_solution(qcurve::make_triple(2, 4, 32, 1)); }),
            ErrorKind::InvalidTriple);
}

TEST(Frey, BuildCoefficients) {
  auto c = qcurve::build_frey(1, 2);
  EXPECT_EQ(c.a2(), GaussianInt(2L, 2L));
  EXPECT_EQ(c.a4(), GaussianInt(2L, 1L));
  auto d = qcurve::build_frey(0, 1);
  EXPECT_EQ(d.a2(), GaussianInt(0L));
  EXPECT_EQ(d.a4(), GaussianInt(1L));  // B + iA^2 with A = 0
  auto e = qcurve::build_frey(2, 3);
  EXPECT_EQ(e.a2(), GaussianInt(4L, 4L));
  EXPECT_EQ(e.a4(), GaussianInt(3L, 4L));
  EXPECT_EQ(kind_of([] { qcurve::build_frey(0, 0); }), ErrorKind::DegenerateCurve);
}

TEST(Frey, Invariants) {
  auto inv = qcurve::invariants(qcurve::build_frey(0, 1));
  EXPECT_EQ(inv.Delta, GaussianInt(-64L));
  EXPECT_EQ(inv.E4, GaussianInt(-48L));
  EXPECT_EQ(inv.j.num, GaussianInt(1728L));
  EXPECT_EQ(inv.j.den, GaussianInt(1L));

  auto inv12 = qcurve::invariants(qcurve::build_frey(1, 2));
  GaussianInt expected = GaussianInt(0L, -64L) * GaussianInt(1L, 2L) * GaussianInt(1L, -2L) *
                         GaussianInt(1L, -2L);
  EXPECT_EQ(inv12.Delta, expected);
  EXPECT_EQ(qcurve::val_pi(inv12.Delta), 12);
  // E4^3 - j Delta = 0 exactly.
  EXPECT_EQ(inv12.E4 * inv12.E4 * inv12.E4 * inv12.j.den, inv12.j.num * inv12.Delta);
}

TEST(Frey, ModelMatchesClosedForms) {
  for (long a = -12; a <= 12; ++a) {
    for (long b = -12; b <= 12; ++b) {
      if (a == 0 && b == 0) continue;
      auto m = qcurve::invariants(qcurve::build_frey(a, b));
      auto cf = qcurve::closed_form_invariants(a, b);
      EXPECT_EQ(m.E4, cf.E4);
      EXPECT_EQ(m.Delta, cf.Delta);
    }
  }
}

TEST(Frey, IsogenyToConjugate) {
  EXPECT_TRUE(qcurve::isogeny_check(qcurve::build_frey(1, 2)).ok);
  EXPECT_TRUE(qcurve::isogeny_check(qcurve::build_frey(0, 1)).ok);
  auto tampered = qcurve::build_frey(1, 2);
  tampered.model.a4 += GaussianInt(1L);
  auto r = qcurve::isogeny_check(tampered);
  EXPECT_FALSE(r.ok);
  EXPECT_GT(r.max_relative_residual, 1e-5);
}

TEST(Frey, TateGoldens) {
  auto r1 = qcurve::tate_at_pi(qcurve::build_frey(1, 2));
  EXPECT_EQ(r1.kodaira, "II");
  EXPECT_EQ(r1.ord_delta, 12);
  EXPECT_EQ(r1.f_local, 12);
  EXPECT_EQ(r1.serre_N, 256);

  auto r2 = qcurve::tate_at_pi(qcurve::build_frey(2, 3));
  EXPECT_EQ(r2.kodaira, "I2*");
  EXPECT_EQ(r2.ord_delta, 12);
  EXPECT_EQ(r2.f_local, 6);
  EXPECT_EQ(r2.serre_N, 32);
  EXPECT_EQ(r2.branch, "A even, B odd, B-2A = 7 mod 8");

  auto r3 = qcurve::tate_at_pi(qcurve::build_frey(2, 7));
  EXPECT_EQ(r3.kodaira, "I2*");
  EXPECT_EQ(r3.f_local, 6);
  EXPECT_EQ(r3.branch, "A even, B odd, B-2A = 3 mod 8");

  EXPECT_EQ(kind_of([] { qcurve::tate_at_pi(qcurve::build_frey(1, 3)); }),
            ErrorKind::UnreachableParity);
}

TEST(Frey, SerreConductor) {
  EXPECT_EQ(qcurve::serre_conductor(12), 256);
  EXPECT_EQ(qcurve::serre_conductor(6), 32);
  EXPECT_EQ(qcurve::serre_conductor(0), 4);
  EXPECT_EQ(kind_of([] { qcurve::serre_conductor(5); }), ErrorKind::OddInduced);
}

TEST(Frey, ParityDeterminesConductorOnBox) {
  for (long a = -30; a <= 30; ++a) {
    for (long b = -30; b <= 30; ++b) {
      if (std::gcd(a, b) != 1) continue;
      if ((a - b) % 2 == 0) continue;  // both odd: A^4 + B^2 = 2 mod 4 is never a power
      mpz_class B = b;
      if (mod4(B) == 1) B = -B;
      auto c = qcurve::build_frey(a, B);
      auto inv = qcurve::invariants(c);
      ASSERT_EQ(qcurve::val_pi(inv.Delta), 12) << a << "," << b;
      auto r = qcurve::tate_at_pi(c);
      if (a % 2 != 0) {
        EXPECT_EQ(r.kodaira, "II");
        EXPECT_EQ(r.f_local, 12);
        EXPECT_EQ(r.serre_N, 256);
      } else {
        EXPECT_EQ(r.kodaira, "I2*");
        EXPECT_EQ(r.f_local, 6);
        EXPECT_EQ(r.serre_N, 32);
      }
    }
  }
}

TEST(Frey, MultiplicativeAtOddPrimesDividingC) {
  // 2^4 + 7^2 = 65 = 5 * 13; relaxed exponent 1.
  auto c = qcurve::build_frey(2, 7);
  auto r5 = qcurve::reduction_at_odd(c, GaussianInt(1L, 2L));
  auto r5b = qcurve::reduction_at_odd(c, GaussianInt(1L, -2L));
  EXPECT_GT(r5.ord_delta + r5b.ord_delta, 0);
  EXPECT_EQ(r5.kodaira.substr(0, 1), "I");
  auto r3 = qcurve::reduction_at_odd(c, GaussianInt(3L));
  EXPECT_EQ(r3.kodaira, "I0");
  // Sampled pairs: every odd prime of C shows up in Delta.
  for (long a = 1; a <= 9; ++a) {
    for (long b = 1; b <= 9; ++b) {
      if (std::gcd(a, b) != 1) continue;
      auto cur = qcurve::build_frey(a, b);
      auto disc = cur.model.discriminant();
      long C = a * a * a * a + b * b;
      for (auto [l, e] : qcurve::factor(C)) {
        if (l == 2) continue;
        if (l % 4 == 1) {
          // Split prime: pick the factor x + yi with x^2 + y^2 = l.
          for (long x = 1; x * x < l; ++x) {
            long y2 = l - x * x;
            long y = static_cast<long>(std::lround(std::sqrt(static_cast<double>(y2))));
            if (y * y != y2) continue;
            int v = qcurve::val_at(disc, GaussianInt(x, y)) + qcurve::val_at(disc, GaussianInt(x, -y));
            EXPECT_GT(v, 0);
            break;
          }
        } else {
          EXPECT_GT(qcurve::val_at(disc, GaussianInt(l)), 0);
        }
      }
    }
  }
}

TEST(Frey, SmallPrimeCheck) {
  EXPECT_EQ(qcurve::small_prime_check(qcurve::make_triple(1, 2, 5, 1)), 5);
  EXPECT_EQ(qcurve::small_prime_check(qcurve::make_triple(2, 7, 65, 1)), 5);
  EXPECT_EQ(kind_of([] { qcurve::small_prime_check(qcurve::make_triple(0, 1, 1, 5)); }),
            ErrorKind::TrivialSolution);
  // 1 + 1 = 2: C even.
  EXPECT_EQ(kind_of([] { qcurve::small_prime_check(qcurve::make_triple(1, 1, 2, 1)); }),
            ErrorKind::ParityViolation);
}

TEST(Frey, SearchSolutions) {
  auto p5 = qcurve::search_solutions(5, 1);
  ASSERT_EQ(p5.size(), 4u);
  for (const auto& t : p5) {
    EXPECT_TRUE(t.trivial);
    EXPECT_EQ(t.C, 1);
  }
  auto p2 = qcurve::search_solutions(2, 5);
  bool found = false;
  for (const auto& t : p2) {
    if (t.A == 2 && t.B == 3) {
      found = true;
      EXPECT_EQ(t.C, 5);
      EXPECT_FALSE(t.trivial);
    }
    EXPECT_FALSE(t.A == 1 && t.B == 2);
  }
  EXPECT_TRUE(found);
  auto big = qcurve::search_solutions(211, 100);
  for (const auto& t : big) EXPECT_TRUE(t.trivial);
  EXPECT_EQ(big.size(), 4u);
  EXPECT_EQ(qcurve::search_solutions(2, 5, 3).size(), p2.size());
}
