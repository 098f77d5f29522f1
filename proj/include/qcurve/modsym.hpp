#pragma once

// Weight-2 modular symbols for Gamma_0(N) via Manin symbols, with Hecke operators,
// Atkin-Lehner involutions and degeneracy maps.

#include <array>
#include <deque>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "qcurve/arith.hpp"
#include "qcurve/qmatrix.hpp"

namespace qcurve {

/// Element of P^1(Q); infinity is 1/0.
struct Cusp {
  i64 num = 1, den = 0;

  static Cusp make(i64 p, i64 q) {
    if (q < 0) {
      p = -p;
      q = -q;
    }
    if (q == 0) return {1, 0};
    i64 g = gcd(p < 0 ? -p : p, q);
    return {p / g, q / g};
  }
  static Cusp infinity() { return {1, 0}; }
  friend bool operator==(const Cusp& a, const Cusp& b) { return a.num == b.num && a.den == b.den; }
};

/// Integer 2x2 matrix [[a, b], [c, d]].
struct Mat2 {
  i64 a, b, c, d;
  Cusp act(const Cusp& x) const { return Cusp::make(a * x.num + b * x.den, c * x.num + d * x.den); }
  i64 det() const { return a * d - b * c; }
};

/// Cremona's criterion for Gamma_0(N)-equivalence of cusps.
inline bool cusps_equivalent(const Cusp& x, const Cusp& y, i64 n) {
  auto s_of = [](const Cusp& z) -> i64 {
    if (z.den == 0) return z.num;  // p = +-1
    if (z.den == 1) return 0;
    return inverse_mod(z.num, z.den);
  };
  i64 g = gcd(x.den * y.den, n);
  return mod(s_of(x) * y.den - s_of(y) * x.den, g) == 0;
}

class P1List {
 public:
  explicit P1List(i64 n) : n_(n), table_(static_cast<std::size_t>(n * n), -1) {
    std::vector<i64> units;
    for (i64 u = 0; u < n; ++u)
      if (gcd(u, n) == 1) units.push_back(u);
    if (n == 1) units = {0};
    for (i64 c = 0; c < n; ++c) {
      for (i64 d = 0; d < n; ++d) {
        if (gcd(gcd(c, d), n) != 1) continue;
        if (table_[c * n + d] >= 0) continue;
        const int k = static_cast<int>(reps_.size());
        reps_.push_back({c, d});
        for (i64 u : units) table_[mod(u * c, n) * n + mod(u * d, n)] = k;
      }
    }
  }

  i64 level() const { return n_; }
  std::size_t size() const { return reps_.size(); }
  const std::array<i64, 2>& rep(std::size_t i) const { return reps_[i]; }

  int index(i64 c, i64 d) const { return table_[mod(c, n_) * n_ + mod(d, n_)]; }

  /// A matrix in SL_2(Z) whose bottom row reduces to the i-th representative.
  Mat2 lift(std::size_t i) const {
    i64 c = reps_[i][0], d = reps_[i][1];
    if (c == 0 && n_ > 1) d = 1;  // (0:u) is the class of (0:1)
    if (n_ == 1) {
      c = 0;
      d = 1;
    }
    i64 dd = d;
    for (i64 k = 0; gcd(c, dd) != 1; ++k) dd = d + (k + 1) * n_;
    i64 x, y;
    xgcd(c, dd, x, y);  // c x + dd y = 1  =>  [[y, -x], [c, dd]]
    return {y, -x, c, dd};
  }

 private:
  i64 n_;
  std::vector<int> table_;
  std::vector<std::array<i64, 2>> reps_;
};

enum class Sign { Minus = -1, Full = 0, Plus = 1 };

inline std::string to_string(Sign s) {
  return s == Sign::Plus ? "plus" : (s == Sign::Minus ? "minus" : "full");
}

class ModSymSpace {
 public:
  ModSymSpace(i64 level, Sign sign) : level_(level), sign_(sign), p1_(level) {
    if (level < 1) throw Error(ErrorKind::InvalidArgument, "level must be positive");
    build_relations();
    build_boundary();
  }

  i64 level() const { return level_; }
  Sign sign() const { return sign_; }
  const P1List& p1() const { return p1_; }
  std::size_t manin_count() const { return p1_.size(); }
  std::size_t dimension() const { return basis_symbol_.size(); }
  std::size_t cuspidal_dimension() const { return cuspidal_.cols(); }
  const QMatrix& cuspidal_basis() const { return cuspidal_; }
  const QMatrix& boundary_matrix() const { return boundary_; }

  /// Manin symbol index of the k-th basis element.
  int basis_symbol(std::size_t k) const { return basis_symbol_[k]; }

  /// Relation-reduced vector of a Manin symbol, as sparse (basis index, coefficient).
  const SparseRow& symbol_vector(std::size_t i) const { return symbol_vec_[i]; }

  /// The modular symbol {g(0), g(oo)} of the k-th basis element.
  std::pair<Cusp, Cusp> basis_cusps(std::size_t k) const {
    Mat2 g = p1_.lift(static_cast<std::size_t>(basis_symbol_[k]));
    return {Cusp::make(g.b, g.d), Cusp::make(g.a, g.c)};
  }

  /// counts[i] += mult * (coefficient of Manin symbol i in {0, x}).
  void add_zero_to(const Cusp& x, std::vector<i64>& counts, i64 mult) const {
    counts[p1_.index(0, 1)] += mult;  // {0, oo}
    if (x.den == 0) return;
    i64 pm2 = 0, qm2 = 1, pm1 = 1, qm1 = 0;
    i64 num = x.num, den = x.den;
    while (den != 0) {
      i64 q = num / den;
      i64 r = num - q * den;
      if (r < 0) {
        q -= 1;
        r += den;
      }
      num = den;
      den = r;
      i64 pk = q * pm1 + pm2, qk = q * qm1 + qm2;
      i64 det = pk * qm1 - pm1 * qk;  // +-1
      counts[p1_.index(det * qk, qm1)] += mult;
      pm2 = pm1;
      qm2 = qm1;
      pm1 = pk;
      qm1 = qk;
    }
  }

  void add_symbol(const Cusp& alpha, const Cusp& beta, std::vector<i64>& counts, i64 mult) const {
    add_zero_to(beta, counts, mult);
    add_zero_to(alpha, counts, -mult);
  }

  QVector counts_to_vector(const std::vector<i64>& counts) const {
    QVector v(dimension());
    for (std::size_t i = 0; i < counts.size(); ++i) {
      if (counts[i] == 0) continue;
      for (const auto& [col, val] : symbol_vec_[i]) v[col] += counts[i] * val;
    }
    return v;
  }

  QVector vector_of(const Cusp& alpha, const Cusp& beta) const {
    std::vector<i64> counts(manin_count(), 0);
    add_symbol(alpha, beta, counts, 1);
    return counts_to_vector(counts);
  }

  /// Matrix (in the basis of `target`) of x -> sum_g g.x applied to every basis element.
  QMatrix apply_matrices(const std::vector<Mat2>& mats, const ModSymSpace& target) const {
    QMatrix out(target.dimension(), dimension());
    std::vector<i64> counts(target.manin_count(), 0);
    for (std::size_t k = 0; k < dimension(); ++k) {
      std::fill(counts.begin(), counts.end(), 0);
      auto [a, b] = basis_cusps(k);
      for (const auto& g : mats) target.add_symbol(g.act(a), g.act(b), counts, 1);
      QVector v = target.counts_to_vector(counts);
      for (std::size_t i = 0; i < v.size(); ++i) out(i, k) = v[i];
    }
    return out;
  }

  /// Integer Manin-symbol counts of sum_g g.x for the k-th basis element x.
  void apply_matrices_to_basis(const std::vector<Mat2>& mats, std::size_t k,
                               std::vector<i64>& counts) const {
    auto [a, b] = basis_cusps(k);
    for (const auto& g : mats) add_symbol(g.act(a), g.act(b), counts, 1);
  }

  /// Upper-triangular coset representatives [[a, b], [0, d]] of T_n: ad = n, 0 <= b < d, (a, N) = 1.
  std::vector<Mat2> hecke_matrices(i64 n) const {
    std::vector<Mat2> mats;
    for (i64 a : divisors(n)) {
      if (gcd(a, level_) != 1) continue;
      i64 d = n / a;
      for (i64 b = 0; b < d; ++b) mats.push_back({a, b, 0, d});
    }
    return mats;
  }

  QMatrix hecke_matrix(i64 n) const {
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "Hecke index must be positive");
    return apply_matrices(hecke_matrices(n), *this);
  }

  Mat2 atkin_lehner_matrix(i64 q) const {
    if (q < 1 || level_ % q != 0 || gcd(q, level_ / q) != 1)
      throw Error(ErrorKind::NotExactDivisor, std::to_string(q) + " does not exactly divide " +
                                                  std::to_string(level_));
    i64 rest = level_ / q, x, y;
    xgcd(q, rest, x, y);  // q x + rest y = 1
    return {q, 1, level_ * (-y), q * x};
  }

  QMatrix atkin_lehner(i64 q) const { return apply_matrices({atkin_lehner_matrix(q)}, *this); }

  /// The degeneracy map {a, b} -> {t a, t b} into a space of level M with t M | N.
  QMatrix degeneracy_alpha(const ModSymSpace& target, i64 t) const {
    if (t < 1 || level_ % (t * target.level()) != 0)
      throw Error(ErrorKind::BadDivisibility, "t * M must divide N");
    if (target.sign() != sign_) throw Error(ErrorKind::InvalidArgument, "sign mismatch");
    return apply_matrices({{t, 0, 0, 1}}, target);
  }

  std::size_t cusp_class_count() const { return cusp_reps_.size(); }

 private:
  void build_relations() {
    const std::size_t n = p1_.size();
    auto sigma = [&](std::size_t i) {
      auto [c, d] = p1_.rep(i);
      return static_cast<std::size_t>(p1_.index(d, -c));
    };
    auto star = [&](std::size_t i) {
      auto [c, d] = p1_.rep(i);
      return static_cast<std::size_t>(p1_.index(-c, d));
    };
    auto tau = [&](std::size_t i) {
      auto [c, d] = p1_.rep(i);
      return static_cast<std::size_t>(p1_.index(d, -c - d));
    };

    // Two-term relations x = -x.sigma and x = sign * x.star, as a signed union-find.
    std::vector<int> gen(n, -2), coef(n, 0);
    std::vector<int> gens;
    const int s = static_cast<int>(sign_);
    for (std::size_t i = 0; i < n; ++i) {
      if (gen[i] != -2) continue;
      std::vector<std::size_t> members{i};
      std::deque<std::size_t> queue{i};
      gen[i] = -1;
      coef[i] = 1;
      bool zero = false;
      while (!queue.empty()) {
        std::size_t u = queue.front();
        queue.pop_front();
        std::vector<std::pair<std::size_t, int>> nb{{sigma(u), -coef[u]}};
        if (sign_ != Sign::Full) nb.emplace_back(star(u), s * coef[u]);
        for (auto [v, cv] : nb) {
          if (gen[v] == -2) {
            gen[v] = -1;
            coef[v] = cv;
            members.push_back(v);
            queue.push_back(v);
          } else if (coef[v] != cv) {
            zero = true;
          }
        }
      }
      const int g = zero ? -1 : static_cast<int>(gens.size());
      if (!zero) gens.push_back(static_cast<int>(i));
      for (auto m : members) {
        gen[m] = g;
        if (zero) coef[m] = 0;
      }
    }

    // Three-term relations x + x.tau + x.tau^2 = 0 over the free generators.
    SparseEchelon ech(static_cast<int>(gens.size()));
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t j = tau(i), k = tau(j);
      if (j < i || k < i) continue;
      std::map<int, mpq_class> acc;
      for (std::size_t m : {i, j, k}) {
        if (gen[m] < 0) continue;
        acc[gen[m]] += coef[m];
      }
      SparseRow row;
      for (auto& [c, v] : acc)
        if (v != 0) row.emplace_back(c, v);
      if (!row.empty()) ech.add_row(std::move(row));
    }
    ech.reduce();

    std::vector<int> free = ech.free_columns();
    std::vector<int> pos(gens.size(), -1);
    for (std::size_t k = 0; k < free.size(); ++k) {
      pos[free[k]] = static_cast<int>(k);
      basis_symbol_.push_back(gens[free[k]]);
    }
    std::vector<SparseRow> gen_vec(gens.size());
    for (std::size_t g = 0; g < gens.size(); ++g) {
      if (pos[g] >= 0) {
        gen_vec[g] = {{pos[g], mpq_class(1)}};
        continue;
      }
      const SparseRow& row = ech.pivots().at(static_cast<int>(g));
      SparseRow v;
      for (std::size_t t = 1; t < row.size(); ++t) v.emplace_back(pos[row[t].first], -row[t].second);
      std::sort(v.begin(), v.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
      gen_vec[g] = std::move(v);
    }
    symbol_vec_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (gen[i] < 0) continue;
      SparseRow v = gen_vec[gen[i]];
      if (coef[i] != 1)
        for (auto& [c, val] : v) val *= coef[i];
      symbol_vec_[i] = std::move(v);
    }
  }

  int cusp_class(const Cusp& x) {
    for (std::size_t k = 0; k < cusp_reps_.size(); ++k)
      if (cusps_equivalent(cusp_reps_[k], x, level_)) return static_cast<int>(k);
    cusp_reps_.push_back(x);
    return static_cast<int>(cusp_reps_.size() - 1);
  }

  void build_boundary() {
    const std::size_t dim = dimension();
    std::vector<std::array<int, 2>> ends(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      auto [a, b] = basis_cusps(k);
      ends[k] = {cusp_class(b), cusp_class(a)};  // [g(oo)] - [g(0)]
    }
    // Star identifies [x] with sign * [-x].
    const std::size_t nc = cusp_reps_.size();
    std::vector<int> partner(nc);
    for (std::size_t k = 0; k < nc; ++k) {
      Cusp neg = Cusp::make(-cusp_reps_[k].num, cusp_reps_[k].den);
      partner[k] = -1;
      for (std::size_t j = 0; j < nc; ++j)
        if (cusps_equivalent(cusp_reps_[j], neg, level_)) partner[k] = static_cast<int>(j);
      if (partner[k] < 0) {
        // -x lies in a class no basis boundary touched; it only matters for the quotient.
        partner[k] = static_cast<int>(k);
        for (std::size_t j = 0; j < cusp_reps_.size(); ++j)
          if (cusps_equivalent(cusp_reps_[j], neg, level_)) partner[k] = static_cast<int>(j);
      }
    }
    std::vector<int> qclass(nc, -2), qcoef(nc, 0);
    int nq = 0;
    const int s = static_cast<int>(sign_);
    for (std::size_t k = 0; k < nc; ++k) {
      if (qclass[k] != -2) continue;
      if (sign_ == Sign::Full) {
        qclass[k] = nq++;
        qcoef[k] = 1;
        continue;
      }
      std::size_t j = static_cast<std::size_t>(partner[k]);
      if (j == k) {
        if (s == 1) {
          qclass[k] = nq++;
          qcoef[k] = 1;
        } else {
          qclass[k] = -1;
          qcoef[k] = 0;
        }
      } else {
        qclass[k] = nq;
        qcoef[k] = 1;
        qclass[j] = nq;
        qcoef[j] = s;
        ++nq;
      }
    }
    boundary_ = QMatrix(static_cast<std::size_t>(nq), dim);
    for (std::size_t k = 0; k < dim; ++k) {
      auto [hi, lo] = ends[k];
      if (qclass[hi] >= 0) boundary_(qclass[hi], k) += qcoef[hi];
      if (qclass[lo] >= 0) boundary_(qclass[lo], k) -= qcoef[lo];
    }
    cuspidal_ = boundary_.kernel();
  }

  i64 level_;
  Sign sign_;
  P1List p1_;
  std::vector<int> basis_symbol_;
  std::vector<SparseRow> symbol_vec_;
  std::vector<Cusp> cusp_reps_;
  QMatrix boundary_;
  QMatrix cuspidal_;
};

}  // namespace qcurve
