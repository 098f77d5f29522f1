#pragma once

// Newform decomposition of the plus-quotient of weight-2 modular symbols and
// numerical q-expansions of the newforms.

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "qcurve/modsym.hpp"
#include "qcurve/poly.hpp"
#include "qcurve/real.hpp"

namespace qcurve {

inline QMatrix vstack(const QMatrix& a, const QMatrix& b) {
  QMatrix out(a.rows() + b.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) out(a.rows() + i, j) = b(i, j);
  return out;
}

/// Independent columns spanning the column space of m.
inline QMatrix column_space(const QMatrix& m) {
  QMatrix t = m.transpose();
  auto piv = t.rref();
  QMatrix out(m.rows(), piv.size());
  for (std::size_t j = 0; j < piv.size(); ++j)
    for (std::size_t i = 0; i < m.rows(); ++i) out(i, j) = t(j, i);
  return out;
}

/// Hecke-irreducible piece of the new subspace.
struct HeckeBlock {
  QMatrix basis;                 // columns in the ambient modular-symbol basis
  std::map<i64, int> al_signs;   // Q -> eigenvalue of W_Q
  i64 poly_prime = 0;            // T_p whose charpoly on the block is irreducible
  QPoly charpoly;                // that charpoly
  std::size_t dimension() const { return basis.cols(); }
};

struct Newform {
  i64 level = 0;
  std::size_t block = 0;            // index into the level's block list
  std::size_t embedding_index = 0;  // which root of charpoly (ascending)
  i64 charpoly_prime = 0;
  QPoly charpoly;
  std::map<i64, int> al_signs;
  std::vector<Real> a;  // a[0] = 0, a[1] = 1, ... a[n_max]
  std::optional<Real> petersson_norm;
  Real petersson_error = 0;

  std::size_t n_max() const { return a.empty() ? 0 : a.size() - 1; }
};

/// a_n(B_d f) = a_{n/d}(f), 0 when d does not divide n.
template <class T>
std::vector<T> degeneracy_coefficients(const std::vector<T>& a, i64 d, std::size_t n_max) {
  std::vector<T> out(n_max + 1, T(0));
  for (std::size_t n = static_cast<std::size_t>(d); n <= n_max; n += static_cast<std::size_t>(d))
    if (n / d < a.size()) out[n] = a[n / d];
  return out;
}

inline std::size_t default_n_max(i64 level) {
  return static_cast<std::size_t>(std::ceil(10.0 * std::sqrt(static_cast<double>(level))));
}

/// The new subspace of S_2(Gamma_0(N)) inside the plus-quotient, with its Hecke structure.
class NewformSpace {
 public:
  explicit NewformSpace(i64 level) : space_(level, Sign::Plus) {
    build_new_subspace();
    decompose();
  }

  i64 level() const { return space_.level(); }
  const ModSymSpace& space() const { return space_; }
  const QMatrix& new_basis() const { return new_basis_; }
  std::size_t new_dimension() const { return new_basis_.cols(); }
  const std::vector<HeckeBlock>& blocks() const { return blocks_; }

  /// Full matrix of T_n on the ambient space (cached for primes).
  const QMatrix& hecke(i64 n) {
    auto it = hecke_cache_.find(n);
    if (it == hecke_cache_.end()) it = hecke_cache_.emplace(n, space_.hecke_matrix(n)).first;
    return it->second;
  }

  /// Numerical newform for one embedding of one block.
  Newform newform(std::size_t block, std::size_t embedding, std::size_t n_max) {
    const Functional& fn = functional(block, embedding);
    Newform f;
    f.level = level();
    f.block = block;
    f.embedding_index = embedding;
    f.charpoly_prime = blocks_[block].poly_prime;
    f.charpoly = blocks_[block].charpoly;
    f.al_signs = blocks_[block].al_signs;
    f.a = coefficients(fn, n_max);
    return f;
  }

  std::vector<Newform> newforms(std::size_t n_max) {
    std::vector<Newform> out;
    for (std::size_t b = 0; b < blocks_.size(); ++b)
      for (std::size_t e = 0; e < blocks_[b].dimension(); ++e) out.push_back(newform(b, e, n_max));
    return out;
  }

  /// Eigenvalue of a single matrix list (e.g. T_p or W_Q) on the given newform embedding.
  RealHi eigenvalue(std::size_t block, std::size_t embedding, const std::vector<Mat2>& mats) {
    const Functional& fn = functional(block, embedding);
    std::vector<i64> counts(space_.manin_count(), 0);
    space_.apply_matrices_to_basis(mats, fn.pivot, counts);
    RealHi s = 0;
    for (std::size_t j = 0; j < counts.size(); ++j)
      if (counts[j] != 0) s += fn.on_symbol[j] * counts[j];
    return s / fn.on_symbol_basis;
  }

 private:
  struct Functional {
    std::vector<RealHi> on_symbol;  // value on every Manin symbol
    std::size_t pivot = 0;          // basis element with largest |value|
    RealHi on_symbol_basis = 0;
  };

  void build_new_subspace() {
    const QMatrix& s = space_.cuspidal_basis();
    QMatrix constraints(0, s.cols());
    for (i64 p : prime_divisors(level())) {
      ModSymSpace lower(level() / p, Sign::Plus);
      for (i64 t : {i64(1), p}) constraints = vstack(constraints, space_.degeneracy_alpha(lower, t) * s);
    }
    new_basis_ = constraints.rows() == 0 ? s : s * constraints.kernel();
  }

  static bool poly_less(const QPoly& a, const QPoly& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    for (std::size_t i = a.size(); i-- > 0;)
      if (a[i] != b[i]) return a[i] < b[i];
    return false;
  }

  std::vector<i64> good_primes(std::size_t count) const {
    std::vector<i64> out;
    for (i64 p = 2; out.size() < count; ++p)
      if (is_prime(p) && level() % p != 0) out.push_back(p);
    return out;
  }

  void decompose() {
    // Split by Atkin-Lehner sign patterns (exact).
    struct Piece {
      QMatrix basis;
      std::map<i64, int> al;
    };
    std::vector<Piece> pieces;
    if (new_basis_.cols() > 0) pieces.push_back({new_basis_, {}});
    for (auto [q, e] : factor(level())) {
      i64 qq = 1;
      for (int k = 0; k < e; ++k) qq *= q;
      QMatrix w = space_.atkin_lehner(qq);
      std::vector<Piece> next;
      for (const Piece& pc : pieces) {
        QMatrix a = restrict_to(w, pc.basis);
        for (int s : {1, -1}) {
          QMatrix k = (a - mpq_class(s) * QMatrix::identity(a.rows())).kernel();
          if (k.cols() == 0) continue;
          Piece np{pc.basis * k, pc.al};
          np.al[qq] = s;
          next.push_back(std::move(np));
        }
      }
      pieces = std::move(next);
    }
    const std::vector<i64> primes = good_primes(12);
    for (const Piece& pc : pieces) split(pc.basis, pc.al, primes, 0);
    std::sort(blocks_.begin(), blocks_.end(), [](const HeckeBlock& x, const HeckeBlock& y) {
      if (x.dimension() != y.dimension()) return x.dimension() < y.dimension();
      if (x.al_signs != y.al_signs) return x.al_signs > y.al_signs;
      if (x.poly_prime != y.poly_prime) return x.poly_prime < y.poly_prime;
      return poly_less(x.charpoly, y.charpoly);
    });
  }

  void split(const QMatrix& basis, const std::map<i64, int>& al, const std::vector<i64>& primes,
             std::size_t start) {
    for (std::size_t k = start; k < primes.size(); ++k) {
      const i64 p = primes[k];
      QMatrix t = restrict_to(hecke(p), basis);
      QPoly f = charpoly(t);
      auto fac = factor_with_multiplicity(f);
      if (fac.size() == 1 && fac[0].second == 1) {
        blocks_.push_back({basis, al, p, fac[0].first});
        return;
      }
      if (fac.size() == 1) continue;  // a single repeated factor: try the next prime
      for (const auto& [g, e] : fac) {
        QPoly ge{mpq_class(1)};
        for (int i = 0; i < e; ++i) ge = poly_mul(ge, g);
        QMatrix kern = poly_eval(ge, t).kernel();
        split(basis * kern, al, primes, k);
      }
      return;
    }
    throw Error(ErrorKind::PrecisionExhausted,
                "Hecke operators at the first primes do not separate a block at level " +
                    std::to_string(level()));
  }

  /// Left eigenvector of the ambient Hecke action cut out by one embedding of a block.
  const Functional& functional(std::size_t block, std::size_t embedding) {
    auto key = std::make_pair(block, embedding);
    auto it = functionals_.find(key);
    if (it != functionals_.end()) return it->second;

    const HeckeBlock& b = blocks_.at(block);
    const std::size_t d = b.dimension();
    if (embedding >= d) throw Error(ErrorKind::InvalidArgument, "embedding index out of range");
    const std::size_t dim = space_.dimension();

    // An operator whose charpoly on the block is squarefree and coprime to the rest.
    const std::vector<i64> primes = good_primes(6);
    QMatrix top, on_block;
    QPoly g;
    bool ok = false;
    for (std::size_t i = 0; i < primes.size() && !ok; ++i) {
      for (std::size_t j = i; j < primes.size() && !ok; ++j) {
        QMatrix t = hecke(primes[i]);
        if (j != i) t = t + hecke(primes[j]);
        QMatrix tb = restrict_to(t, b.basis);
        QPoly gg = monic(charpoly(tb));
        if (degree(poly_gcd(gg, derivative(gg))) > 0) continue;
        QMatrix kern = poly_eval(gg, t).kernel();
        if (kern.cols() != d) continue;
        QMatrix comp = column_space(poly_eval(gg, t));
        if (comp.cols() + d != dim) continue;
        top = comp;
        on_block = tb;
        g = gg;
        ok = true;
      }
    }
    if (!ok) throw Error(ErrorKind::PrecisionExhausted, "no separating Hecke operator found");

    // Coordinates along the block in the decomposition ambient = block + complement.
    QMatrix inv = solve_in_span(hstack(b.basis, top), QMatrix::identity(dim));
    std::vector<RealHi> roots = real_roots<RealHi>(g);
    // Roots of the block's own charpoly give the embedding order.
    std::vector<RealHi> labels = real_roots<RealHi>(b.charpoly);

    // Left eigenvector psi of on_block for each root, then match to label order via T_p.
    QMatrix tp = restrict_to(hecke(b.poly_prime), b.basis);
    std::vector<std::vector<RealHi>> psis;
    std::vector<RealHi> tp_vals;
    for (const RealHi& r : roots) {
      std::vector<RealHi> psi = left_null(on_block, r);
      psis.push_back(psi);
      // psi * tp = lambda psi
      RealHi num = 0, den = 0;
      for (std::size_t j = 0; j < d; ++j) {
        RealHi s = 0;
        for (std::size_t i = 0; i < d; ++i) s += psi[i] * to_real<RealHi>(tp(i, j));
        num += s * psi[j];
        den += psi[j] * psi[j];
      }
      tp_vals.push_back(num / den);
    }
    std::size_t best = 0;
    RealHi best_gap = -1;
    for (std::size_t i = 0; i < d; ++i) {
      RealHi gap = abs(tp_vals[i] - labels[embedding]);
      if (best_gap < 0 || gap < best_gap) {
        best_gap = gap;
        best = i;
      }
    }
    const std::vector<RealHi>& psi = psis[best];

    Functional fn;
    std::vector<RealHi> phi(dim, RealHi(0));
    for (std::size_t j = 0; j < dim; ++j)
      for (std::size_t i = 0; i < d; ++i)
        if (inv(i, j) != 0) phi[j] += psi[i] * to_real<RealHi>(inv(i, j));
    RealHi big = -1;
    for (std::size_t j = 0; j < dim; ++j) {
      if (abs(phi[j]) > big) {
        big = abs(phi[j]);
        fn.pivot = j;
      }
    }
    fn.on_symbol_basis = phi[fn.pivot];
    fn.on_symbol.assign(space_.manin_count(), RealHi(0));
    for (std::size_t s = 0; s < space_.manin_count(); ++s)
      for (const auto& [col, val] : space_.symbol_vector(s)) fn.on_symbol[s] += phi[col] * to_real<RealHi>(val);
    return functionals_.emplace(key, std::move(fn)).first->second;
  }

  /// Nonzero x with x (A - r) = 0, by full-pivot elimination.
  static std::vector<RealHi> left_null(const QMatrix& a, const RealHi& r) {
    const std::size_t n = a.rows();
    std::vector<std::vector<RealHi>> m(n, std::vector<RealHi>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m[i][j] = to_real<RealHi>(a(j, i)) - (i == j ? r : RealHi(0));
    std::vector<std::size_t> cperm(n);
    for (std::size_t j = 0; j < n; ++j) cperm[j] = j;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      std::size_t pi = k, pj = k;
      RealHi best = -1;
      for (std::size_t i = k; i < n; ++i)
        for (std::size_t j = k; j < n; ++j)
          if (abs(m[i][j]) > best) {
            best = abs(m[i][j]);
            pi = i;
            pj = j;
          }
      std::swap(m[k], m[pi]);
      if (pj != k) {
        for (std::size_t i = 0; i < n; ++i) std::swap(m[i][k], m[i][pj]);
        std::swap(cperm[k], cperm[pj]);
      }
      for (std::size_t i = k + 1; i < n; ++i) {
        RealHi f = m[i][k] / m[k][k];
        if (f == 0) continue;
        for (std::size_t j = k; j < n; ++j) m[i][j] -= f * m[k][j];
      }
    }
    std::vector<RealHi> y(n, RealHi(0));
    y[n - 1] = 1;
    for (std::size_t k = n - 1; k-- > 0;) {
      RealHi s = 0;
      for (std::size_t j = k + 1; j < n; ++j) s += m[k][j] * y[j];
      y[k] = -s / m[k][k];
    }
    std::vector<RealHi> x(n);
    for (std::size_t j = 0; j < n; ++j) x[cperm[j]] = y[j];
    return x;
  }

  std::vector<Real> coefficients(const Functional& fn, std::size_t n_max) {
    std::vector<RealHi> a(n_max + 1, RealHi(0));
    if (n_max >= 1) a[1] = 1;
    std::vector<i64> counts(space_.manin_count());
    const i64 n = level();
    for (i64 p : primes_up_to(static_cast<i64>(n_max))) {
      std::fill(counts.begin(), counts.end(), 0);
      space_.apply_matrices_to_basis(space_.hecke_matrices(p), fn.pivot, counts);
      RealHi s = 0;
      for (std::size_t j = 0; j < counts.size(); ++j)
        if (counts[j] != 0) s += fn.on_symbol[j] * counts[j];
      RealHi ap = s / fn.on_symbol_basis;
      // prime powers
      RealHi prev = 1, cur = ap;
      a[p] = ap;
      for (i64 q = p; q <= static_cast<i64>(n_max) / p;) {
        q *= p;
        RealHi nxt = (n % p == 0) ? RealHi(ap * cur) : RealHi(ap * cur - p * prev);
        a[q] = nxt;
        prev = cur;
        cur = nxt;
      }
    }
    // multiplicativity
    for (std::size_t m = 2; m <= n_max; ++m) {
      i64 mm = static_cast<i64>(m);
      auto fac = factor(mm);
      if (fac.size() < 2) continue;
      RealHi v = 1;
      for (auto [p, e] : fac) {
        i64 pe = 1;
        for (int k = 0; k < e; ++k) pe *= p;
        v *= a[pe];
      }
      a[m] = v;
    }
    std::vector<Real> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = Real(a[i]);
    return out;
  }

  ModSymSpace space_;
  QMatrix new_basis_;
  std::vector<HeckeBlock> blocks_;
  std::map<i64, QMatrix> hecke_cache_;
  std::map<std::pair<std::size_t, std::size_t>, Functional> functionals_;
};

}  // namespace qcurve
