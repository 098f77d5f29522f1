#pragma once

// Dual Petersson pairings (l1, l2)_N = sum_f l1(f) l2(f) / <f, f>, computed from an
// eigenbasis (direct) or from the Petersson trace formula, plus the verdict arithmetic.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "qcurve/lfunc.hpp"
#include "qcurve/newforms.hpp"
#include "qcurve/petersson.hpp"
#include "qcurve/trace_formula.hpp"

namespace qcurve {

/// a_m, or L_chi : g -> L(g (x) chi, 1) for the character of conductor q.
struct Functional {
  enum class Kind { Coefficient, LTwist };
  Kind kind = Kind::Coefficient;
  i64 m = 1;
  i64 q = 4;

  static Functional coefficient(i64 m) { return {Kind::Coefficient, m, 0}; }
  static Functional l_twist(i64 q) { return {Kind::LTwist, 0, q}; }
  std::string tag() const {
    return kind == Kind::Coefficient ? "a_" + std::to_string(m) : "L_chi_" + std::to_string(q);
  }
};

enum class PairingMethod { DirectEigenbasis, TraceFormula };

inline std::string_view to_string(PairingMethod m) {
  return m == PairingMethod::DirectEigenbasis ? "direct_eigenbasis" : "trace_formula";
}

struct PairingEstimate {
  i64 level = 0;
  Functional l1, l2;
  double value = 0;
  double error = 0;            // certified
  double empirical_error = 0;  // trace method: includes the spread of c-partial sums
  PairingMethod method = PairingMethod::DirectEigenbasis;
};

/// Default constants, valid for p >= 211.
struct VerdictConstants {
  double main_dev = 4.37;
  double level_p_bound = 786;
  double convexity_bound_at_p = 437;
};

enum class OldGram { ClosedForm, Numerical };

struct DirectOptions {
  OldGram gram = OldGram::ClosedForm;
  PeterssonOptions petersson;
  Real l_tol = Real("1e-30");
};

/// One eigenform's (or one oldform block's) share of a direct pairing.
struct PairingTerm {
  i64 source_level = 0;
  std::size_t block = 0, embedding = 0;
  bool old = false;
  double value = 0, error = 0;
  double norm = 0, norm_error = 0;
};

struct DirectPairing {
  PairingEstimate total;
  PairingEstimate new_part;
  PairingEstimate old_part;
  std::vector<PairingTerm> terms;
};

namespace detail {

struct Approx {
  double value = 0, error = 0;
};

inline Approx product(Approx a, Approx b) {
  return {a.value * b.value, std::abs(a.value) * b.error + std::abs(b.value) * a.error + a.error * b.error};
}

inline Approx quotient(Approx a, Approx n) {
  if (n.error >= std::abs(n.value)) throw Error(ErrorKind::PrecisionExhausted, "Petersson norm not resolved");
  const double v = a.value / n.value;
  return {v, (a.error + std::abs(v) * n.error) / (std::abs(n.value) - n.error)};
}

inline Approx evaluate(const Functional& l, const Newform& f, const Real& tol) {
  if (l.kind == Functional::Kind::Coefficient) {
    if (static_cast<std::size_t>(l.m) > f.n_max())
      throw Error(ErrorKind::InsufficientCoefficients, "coefficient a_" + std::to_string(l.m));
    return {f.a[l.m].convert_to<double>(), 1e-30};
  }
  LValueResult r = l_value_at_1(f, QuadCharacter::of_conductor(l.q), tol);
  return {r.value.convert_to<double>(), r.trunc_error.convert_to<double>() + 1e-16 * std::abs(r.value.convert_to<double>())};
}

/// Values of l on B_1 g and p B_p g (g new of level p, viewed at level p^2).
inline std::array<Approx, 2> evaluate_old(const Functional& l, const Newform& g, i64 p, const Real& tol) {
  if (l.kind == Functional::Kind::Coefficient) {
    Approx v1 = evaluate(l, g, tol), v2{0, 0};
    if (l.m % p == 0) {
      v2 = evaluate(Functional::coefficient(l.m / p), g, tol);
      v2.value *= p;
      v2.error *= p;
    }
    return {v1, v2};
  }
  // L((B_1 g) (x) chi, 1) = L, L((p B_p g) (x) chi, 1) = chi(p) L
  Approx v = evaluate(l, g, tol);
  const int c = QuadCharacter::of_conductor(l.q)(p);
  return {v, Approx{c * v.value, std::abs(c) * v.error}};
}

/// 2 x 2 inverse with a first-order error bound ||A^{-1}||^2 ||dA|| (Frobenius).
inline std::array<std::array<Approx, 2>, 2> inverse2(const std::array<std::array<Approx, 2>, 2>& a) {
  const double det = a[0][0].value * a[1][1].value - a[0][1].value * a[1][0].value;
  if (det == 0) throw Error(ErrorKind::SingularGram, "oldform Gram matrix is singular");
  double inv[2][2] = {{a[1][1].value / det, -a[0][1].value / det}, {-a[1][0].value / det, a[0][0].value / det}};
  double n_inv = 0, n_err = 0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      n_inv += inv[i][j] * inv[i][j];
      n_err += a[i][j].error * a[i][j].error;
    }
  const double e = n_inv * std::sqrt(n_err);
  if (e * std::sqrt(n_err) >= 0.5 * std::sqrt(n_inv)) throw Error(ErrorKind::SingularGram, "Gram error too large");
  std::array<std::array<Approx, 2>, 2> out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out[i][j] = {inv[i][j], 2 * e};
  return out;
}

inline std::size_t terms_for_functionals(i64 level, const Functional& l1, const Functional& l2, const Real& tol) {
  std::size_t n = 2;
  for (const Functional* l : {&l1, &l2}) {
    if (l->kind == Functional::Kind::Coefficient)
      n = std::max(n, static_cast<std::size_t>(l->m) + 1);
    else
      n = std::max(n, lvalue_terms_needed(level * l->q * l->q, tol) + 1);
  }
  return n;
}

inline bool is_prime_square(i64 n, i64& p) {
  p = static_cast<i64>(std::llround(std::sqrt(static_cast<double>(n))));
  return p * p == n && is_prime(p);
}

}  // namespace detail

/// Direct pairing over the eigenbasis of S_2(Gamma_0(N)), N prime or a prime square
/// (old blocks from level p through span{B_1 g, p B_p g}); genus 0 levels give 0.
inline DirectPairing dual_pairing_direct_full(i64 level, const Functional& l1, const Functional& l2,
                                              const DirectOptions& opt = {}) {
  DirectPairing out;
  for (PairingEstimate* e : {&out.total, &out.new_part, &out.old_part}) {
    e->level = level;
    e->l1 = l1;
    e->l2 = l2;
  }
  if (genus_x0(level) == 0) return out;
  i64 p = 0;
  const bool square = detail::is_prime_square(level, p);
  if (!is_prime(level) && !square)
    throw Error(ErrorKind::UnsupportedLevel, "direct pairing needs N prime or a prime square, got " + std::to_string(level));

  PeterssonIntegrator top(level, opt.petersson);
  std::size_t n_max = std::max(top.required_terms(), detail::terms_for_functionals(level, l1, l2, opt.l_tol));
  NewformSpace space(level);
  std::vector<Newform> forms = space.newforms(n_max);

  std::vector<Newform> old_forms;
  std::optional<PeterssonIntegrator> low;
  if (square && genus_x0(p) > 0) {
    low.emplace(p, opt.petersson);
    std::size_t n_low = std::max({low->required_terms(), detail::terms_for_functionals(p, l1, l2, opt.l_tol),
                                  static_cast<std::size_t>(n_max / p + 2)});
    NewformSpace lower(p);
    old_forms = lower.newforms(std::max(n_low, n_max));
  }

  // one integration pass at level N: newforms, then (B_1 g, p B_p g) pairs when numerical
  std::vector<std::vector<double>> series;
  for (const Newform& f : forms) series.push_back(to_doubles(f.a));
  if (opt.gram == OldGram::Numerical)
    for (const Newform& g : old_forms) {
      std::vector<double> b1 = to_doubles(g.a);
      b1.resize(n_max + 1);
      std::vector<double> bp = degeneracy_coefficients(b1, p, n_max);
      for (double& x : bp) x *= static_cast<double>(p);
      series.push_back(b1);
      series.push_back(bp);
    }
  auto gram_top = series.empty() ? std::vector<std::vector<PeterssonResult>>{} : top.gram(series);

  auto accumulate = [](PairingEstimate& e, const detail::Approx& a) {
    e.value += a.value;
    e.error += a.error;
  };
  for (std::size_t i = 0; i < forms.size(); ++i) {
    const PeterssonResult& nr = gram_top[i][i];
    forms[i].petersson_norm = Real(nr.value);
    forms[i].petersson_error = Real(nr.error);
    detail::Approx v = detail::quotient(
        detail::product(detail::evaluate(l1, forms[i], opt.l_tol), detail::evaluate(l2, forms[i], opt.l_tol)),
        {nr.value, nr.error});
    accumulate(out.new_part, v);
    out.terms.push_back({level, forms[i].block, forms[i].embedding_index, false, v.value, v.error, nr.value, nr.error});
  }

  if (!old_forms.empty()) {
    std::vector<std::vector<double>> low_series;
    for (const Newform& g : old_forms) low_series.push_back(to_doubles(g.a));
    auto gram_low = low->gram(low_series);
    for (std::size_t k = 0; k < old_forms.size(); ++k) {
      const Newform& g = old_forms[k];
      const detail::Approx norm{gram_low[k][k].value, gram_low[k][k].error};
      std::array<std::array<detail::Approx, 2>, 2> a;
      if (opt.gram == OldGram::ClosedForm) {
        const double lam = g.al_signs.at(p), pp = static_cast<double>(p);
        a = {{{detail::Approx{pp * norm.value, pp * norm.error}, detail::Approx{-lam * norm.value, norm.error}},
              {detail::Approx{-lam * norm.value, norm.error}, detail::Approx{pp * norm.value, pp * norm.error}}}};
      } else {
        const std::size_t base = forms.size() + 2 * k;
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) {
            const PeterssonResult& r = gram_top[base + i][base + j];
            a[i][j] = {r.value, r.error};
          }
      }
      auto inv = detail::inverse2(a);
      auto u = detail::evaluate_old(l1, g, p, opt.l_tol), v = detail::evaluate_old(l2, g, p, opt.l_tol);
      detail::Approx s{0, 0};
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          detail::Approx t = detail::product(detail::product(u[i], inv[i][j]), v[j]);
          s.value += t.value;
          s.error += t.error;
        }
      accumulate(out.old_part, s);
      out.terms.push_back({p, g.block, g.embedding_index, true, s.value, s.error, norm.value, norm.error});
    }
  }
  out.total.value = out.new_part.value + out.old_part.value;
  out.total.error = out.new_part.error + out.old_part.error;
  for (PairingEstimate* e : {&out.total, &out.new_part, &out.old_part}) e->empirical_error = e->error;
  return out;
}

inline PairingEstimate dual_pairing_direct(i64 level, const Functional& l1, const Functional& l2,
                                           const DirectOptions& opt = {}) {
  return dual_pairing_direct_full(level, l1, l2, opt).total;
}

namespace detail {

/// Upper bound for (a_n, a_n)_N from the trace formula with Weil and |J_1(x)| <= x/2.
inline double diagonal_bound(i64 level, double n) {
  const double z = 2.6123753486854883;  // zeta(3/2)
  return 4 * M_PI * n *
         (1 + 4 * M_PI * M_PI * std::pow(n, 1.5) * static_cast<double>(divisor_count(level)) *
                  std::pow(static_cast<double>(level), -1.5) * z * z);
}

}  // namespace detail

struct TraceOptions {
  i64 c_max = 20000;
  double n_tol = 1e-6;  // bound on the neglected n-tail of L_chi
};

/// (a_m, L_chi)_N with L_chi = sum_n chi(n)/n e^{-2 pi n / sqrt M} [a_n - chi(-N) a_n o W_N], M = N q^2.
inline PairingEstimate dual_pairing_trace(i64 level, i64 m, const QuadCharacter& chi, const TraceOptions& opt = {}) {
  if (level < 1 || m < 1) throw Error(ErrorKind::InvalidArgument, "level and m must be positive");
  const i64 q = chi.conductor();
  if (gcd(level, q) != 1) throw Error(ErrorKind::NonCoprimeConductor, "trace method needs gcd(N, q) = 1");
  const double big_m = static_cast<double>(level) * static_cast<double>(q * q);
  const double decay = 2 * M_PI / std::sqrt(big_m);
  const int sign_w = chi(-level);

  // n-tail: sum_{n > n0} |w_n| (1 + |chi(-N)|) sqrt(B_m B_n), summed until negligible
  const double bm = detail::diagonal_bound(level, static_cast<double>(m));
  std::vector<double> tail_terms;
  for (std::size_t n = 1;; ++n) {
    const double t = std::exp(-decay * static_cast<double>(n)) / static_cast<double>(n) * (1 + std::abs(sign_w)) *
                     std::sqrt(bm * detail::diagonal_bound(level, static_cast<double>(n)));
    tail_terms.push_back(t);
    if (t < 1e-30 && static_cast<double>(n) * decay > 10) break;
  }
  // remaining mass beyond the loop: terms shrink at least by e^{-decay / 2} per step there
  const double rest = tail_terms.back() / (1 - std::exp(-decay / 2));
  std::vector<double> suffix(tail_terms.size() + 1, rest);
  for (std::size_t i = tail_terms.size(); i-- > 0;) suffix[i] = suffix[i + 1] + tail_terms[i];
  std::size_t n_max = 1;
  while (n_max < tail_terms.size() && suffix[n_max] > opt.n_tol) ++n_max;
  const double n_tail = suffix[n_max];

  const double need = std::max(4.0 * static_cast<double>(level), 4 * M_PI * std::sqrt(static_cast<double>(m) * n_max));
  if (static_cast<double>(opt.c_max) < need)
    throw Error(ErrorKind::TruncationTooCoarse,
                "c_max = " + std::to_string(opt.c_max) + " below the needed " +
                    std::to_string(static_cast<i64>(std::ceil(need))) + " (n_max = " + std::to_string(n_max) + ")");

  auto ii = trace_pairings(level, m, n_max, opt.c_max, CuspPair::InfinityInfinity);
  std::vector<TraceSum> i0;
  if (sign_w != 0) i0 = trace_pairings(level, m, n_max, opt.c_max, CuspPair::InfinityZero);

  PairingEstimate e;
  e.level = level;
  e.l1 = Functional::coefficient(m);
  e.l2 = Functional::l_twist(q);
  e.method = PairingMethod::TraceFormula;
  double cert = 0, emp = 0;
  for (std::size_t n = 1; n <= n_max; ++n) {
    const int c = chi(static_cast<i64>(n));
    if (c == 0) continue;
    const double w = c * std::exp(-decay * static_cast<double>(n)) / static_cast<double>(n);
    double v = ii[n].value, ce = ii[n].certified_error, ee = ii[n].empirical_error;
    if (sign_w != 0) {
      v -= sign_w * i0[n].value;
      ce += i0[n].certified_error;
      ee += i0[n].empirical_error;
    }
    e.value += w * v;
    cert += std::abs(w) * ce;
    emp += std::abs(w) * ee;
  }
  e.error = cert + n_tail;
  e.empirical_error = emp + n_tail;
  return e;
}

/// (a_m, L_chi)_{p^2} minus its p-old part (p / (p^2 - 1)) (a_m - chi(p)/p a_{mp}, L_chi)_p,
/// every pairing taken with the same method.
inline PairingEstimate pnew_pairing(i64 p, i64 m, const QuadCharacter& chi, PairingMethod method,
                                    const TraceOptions& trace = {}, const DirectOptions& direct = {}) {
  if (!is_prime(p)) throw Error(ErrorKind::NotPrime, "p must be prime");
  if (chi(p) == 0) throw Error(ErrorKind::NonCoprimeConductor, "chi(p) = 0");
  auto pairing = [&](i64 level, i64 mm) {
    if (method == PairingMethod::TraceFormula) return dual_pairing_trace(level, mm, chi, trace);
    return dual_pairing_direct(level, Functional::coefficient(mm), Functional::l_twist(chi.conductor()), direct);
  };
  PairingEstimate total = pairing(p * p, m);
  PairingEstimate a = pairing(p, m), b = pairing(p, m * p);
  const double pp = static_cast<double>(p), f = pp / (pp * pp - 1), c = chi(p) / pp;
  PairingEstimate e = total;
  e.value = total.value - f * (a.value - c * b.value);
  e.error = total.error + f * (a.error + std::abs(c) * b.error);
  e.empirical_error = total.empirical_error + f * (a.empirical_error + std::abs(c) * b.empirical_error);
  return e;
}

struct Verdict {
  i64 p = 0;
  double value = 0;
  bool pass = false;
  double convexity_bound = 0;      // convexity_bound(p, 1, 4)
  bool constants_cover_convexity = false;
};

/// 4 pi - main_dev - (p / (p^2 - 1)) (level_p_bound + convexity_bound_at_p / p) > 4.
inline Verdict large_prime_verdict(i64 p, const VerdictConstants& k = {}) {
  if (p < 211) throw Error(ErrorKind::BelowThresholdPrime, "constants are certified only for p >= 211");
  if (!is_prime(p)) throw Error(ErrorKind::NotPrime, std::to_string(p) + " is not prime");
  if (k.main_dev <= 0 || k.level_p_bound <= 0 || k.convexity_bound_at_p <= 0)
    throw Error(ErrorKind::InvalidArgument, "constants must be positive");
  Verdict v;
  v.p = p;
  const double pp = static_cast<double>(p);
  v.value = 4 * M_PI - k.main_dev - pp / (pp * pp - 1) * (k.level_p_bound + k.convexity_bound_at_p / pp);
  v.pass = v.value > 4;
  v.convexity_bound = convexity_bound(p, 1, 4).bound.convert_to<double>();
  v.constants_cover_convexity = k.convexity_bound_at_p >= v.convexity_bound;
  return v;
}

}  // namespace qcurve
