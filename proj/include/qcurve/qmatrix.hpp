#pragma once

// Exact rational linear algebra: dense matrices, sparse echelon forms, characteristic polynomials.

#include <gmpxx.h>

#include <algorithm>
#include <map>
#include <ostream>
#include <utility>
#include <vector>

#include "qcurve/error.hpp"

namespace qcurve {

using QVector = std::vector<mpq_class>;
/// Polynomial with rational coefficients, lowest degree first.
using QPoly = std::vector<mpq_class>;

class QMatrix {
 public:
  QMatrix() = default;
  QMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static QMatrix identity(std::size_t n) {
    QMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  /// Matrix whose columns are the given vectors.
  static QMatrix from_columns(const std::vector<QVector>& cols, std::size_t rows) {
    QMatrix m(rows, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j)
      for (std::size_t i = 0; i < rows; ++i) m(i, j) = cols[j][i];
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  mpq_class& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const mpq_class& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  QVector column(std::size_t j) const {
    QVector v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
  }

  QMatrix transpose() const {
    QMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  bool is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](const mpq_class& x) { return x == 0; });
  }

  friend QMatrix operator*(const QMatrix& a, const QMatrix& b) {
    if (a.cols_ != b.rows_) throw Error(ErrorKind::InvalidArgument, "matrix shape mismatch");
    QMatrix c(a.rows_, b.cols_);
    mpq_class t;
    for (std::size_t i = 0; i < a.rows_; ++i) {
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const mpq_class& aik = a(i, k);
        if (aik == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) {
          const mpq_class& bkj = b(k, j);
          if (bkj == 0) continue;
          t = aik * bkj;
          c(i, j) += t;
        }
      }
    }
    return c;
  }

  friend QVector operator*(const QMatrix& a, const QVector& v) {
    QVector out(a.rows_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k)
        if (a(i, k) != 0 && v[k] != 0) out[i] += a(i, k) * v[k];
    return out;
  }

  friend QMatrix operator+(QMatrix a, const QMatrix& b) {
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] += b.data_[i];
    return a;
  }
  friend QMatrix operator-(QMatrix a, const QMatrix& b) {
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] -= b.data_[i];
    return a;
  }
  friend QMatrix operator*(const mpq_class& s, QMatrix a) {
    for (auto& x : a.data_) x *= s;
    return a;
  }
  friend bool operator==(const QMatrix& a, const QMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  /// In-place reduced row echelon form; returns pivot columns.
  std::vector<std::size_t> rref() {
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    mpq_class f;
    for (std::size_t c = 0; c < cols_ && r < rows_; ++c) {
      std::size_t piv = rows_;
      for (std::size_t i = r; i < rows_; ++i) {
        if ((*this)(i, c) != 0) {
          piv = i;
          break;
        }
      }
      if (piv == rows_) continue;
      if (piv != r)
        for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(piv, j), (*this)(r, j));
      mpq_class inv = 1 / (*this)(r, c);
      for (std::size_t j = c; j < cols_; ++j) (*this)(r, j) *= inv;
      for (std::size_t i = 0; i < rows_; ++i) {
        if (i == r || (*this)(i, c) == 0) continue;
        f = (*this)(i, c);
        for (std::size_t j = c; j < cols_; ++j)
          if ((*this)(r, j) != 0) (*this)(i, j) -= f * (*this)(r, j);
      }
      pivots.push_back(c);
      ++r;
    }
    return pivots;
  }

  std::size_t rank() const {
    QMatrix m = *this;
    return m.rref().size();
  }

  /// Basis of the right kernel, as columns of a cols() x k matrix.
  QMatrix kernel() const {
    QMatrix m = *this;
    auto piv = m.rref();
    std::vector<bool> is_piv(cols_, false);
    for (auto c : piv) is_piv[c] = true;
    std::vector<std::size_t> free;
    for (std::size_t c = 0; c < cols_; ++c)
      if (!is_piv[c]) free.push_back(c);
    QMatrix k(cols_, free.size());
    for (std::size_t f = 0; f < free.size(); ++f) {
      k(free[f], f) = 1;
      for (std::size_t r = 0; r < piv.size(); ++r) k(piv[r], f) = -m(r, free[f]);
    }
    return k;
  }

  /// Horizontal concatenation [a | b].
  friend QMatrix hstack(const QMatrix& a, const QMatrix& b) {
    QMatrix m(a.rows_, a.cols_ + b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      for (std::size_t j = 0; j < a.cols_; ++j) m(i, j) = a(i, j);
      for (std::size_t j = 0; j < b.cols_; ++j) m(i, a.cols_ + j) = b(i, j);
    }
    return m;
  }

  friend std::ostream& operator<<(std::ostream& os, const QMatrix& m) {
    for (std::size_t i = 0; i < m.rows_; ++i) {
      os << "[";
      for (std::size_t j = 0; j < m.cols_; ++j) os << (j ? " " : "") << m(i, j);
      os << "]\n";
    }
    return os;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<mpq_class> data_;
};

/// Solves basis * X = target for X, where basis has full column rank and the columns of
/// target lie in its span.
inline QMatrix solve_in_span(const QMatrix& basis, const QMatrix& target) {
  const std::size_t k = basis.cols();
  QMatrix aug = hstack(basis, target);
  auto piv = aug.rref();
  if (piv.size() != k) throw Error(ErrorKind::InvalidArgument, "target not in span of basis");
  for (std::size_t i = 0; i < k; ++i)
    if (piv[i] != i) throw Error(ErrorKind::InvalidArgument, "basis is not of full column rank");
  QMatrix x(k, target.cols());
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < target.cols(); ++j) x(i, j) = aug(i, k + j);
  return x;
}

/// Matrix of T on the T-stable subspace spanned by the columns of basis.
inline QMatrix restrict_to(const QMatrix& t, const QMatrix& basis) {
  return solve_in_span(basis, t * basis);
}

/// Intersection of column spans.
inline QMatrix intersect_spans(const QMatrix& a, const QMatrix& b) {
  if (a.cols() == 0 || b.cols() == 0) return QMatrix(a.rows(), 0);
  QMatrix m = hstack(a, (mpq_class(-1)) * b);
  QMatrix k = m.kernel();
  QMatrix ka(a.cols(), k.cols());
  for (std::size_t i = 0; i < a.cols(); ++i)
    for (std::size_t j = 0; j < k.cols(); ++j) ka(i, j) = k(i, j);
  QMatrix out = a * ka;
  // Keep an independent set of columns.
  QMatrix tr = out.transpose();
  tr.rref();
  std::size_t r = out.rank();
  QMatrix basis(a.rows(), r);
  for (std::size_t j = 0; j < r; ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) basis(i, j) = tr(j, i);
  return basis;
}

/// Characteristic polynomial det(x I - M) via reduction to Hessenberg form.
inline QPoly charpoly(const QMatrix& m) {
  const std::size_t n = m.rows();
  QMatrix h = m;
  mpq_class u;
  for (std::size_t k = 0; k + 2 < n; ++k) {
    std::size_t piv = n;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (h(i, k) != 0) {
        piv = i;
        break;
      }
    }
    if (piv == n) continue;
    if (piv != k + 1) {
      for (std::size_t j = 0; j < n; ++j) std::swap(h(piv, j), h(k + 1, j));
      for (std::size_t i = 0; i < n; ++i) std::swap(h(i, piv), h(i, k + 1));
    }
    for (std::size_t r = k + 2; r < n; ++r) {
      if (h(r, k) == 0) continue;
      u = h(r, k) / h(k + 1, k);
      for (std::size_t j = 0; j < n; ++j) h(r, j) -= u * h(k + 1, j);
      for (std::size_t i = 0; i < n; ++i) h(i, k + 1) += u * h(i, r);
    }
  }
  std::vector<QPoly> p(n + 1);
  p[0] = {1};
  for (std::size_t mm = 1; mm <= n; ++mm) {
    QPoly cur(mm + 1);
    // (x - h_{mm}) p_{m-1}
    for (std::size_t d = 0; d < p[mm - 1].size(); ++d) {
      cur[d + 1] += p[mm - 1][d];
      cur[d] -= h(mm - 1, mm - 1) * p[mm - 1][d];
    }
    mpq_class prod = 1;
    for (std::size_t i = mm - 1; i >= 1; --i) {
      prod *= h(i, i - 1);
      if (prod == 0) break;
      mpq_class coef = h(i - 1, mm - 1) * prod;
      if (coef != 0)
        for (std::size_t d = 0; d < p[i - 1].size(); ++d) cur[d] -= coef * p[i - 1][d];
    }
    p[mm] = std::move(cur);
  }
  return p[n];
}

/// f(M) by Horner's rule.
inline QMatrix poly_eval(const QPoly& f, const QMatrix& m) {
  const std::size_t n = m.rows();
  QMatrix acc(n, n);
  for (std::size_t d = f.size(); d-- > 0;) {
    acc = acc * m;
    for (std::size_t i = 0; i < n; ++i) acc(i, i) += f[d];
  }
  return acc;
}

// ---------------------------------------------------------------------------

/// Sparse row as (column, value) pairs with increasing columns and nonzero values.
using SparseRow = std::vector<std::pair<int, mpq_class>>;

/// row := row - f * other
inline void axpy(SparseRow& row, const mpq_class& f, const SparseRow& other) {
  SparseRow out;
  out.reserve(row.size() + other.size());
  std::size_t i = 0, j = 0;
  while (i < row.size() || j < other.size()) {
    if (j == other.size() || (i < row.size() && row[i].first < other[j].first)) {
      out.push_back(std::move(row[i++]));
    } else if (i == row.size() || other[j].first < row[i].first) {
      out.emplace_back(other[j].first, -f * other[j].second);
      ++j;
    } else {
      mpq_class v = row[i].second - f * other[j].second;
      if (v != 0) out.emplace_back(row[i].first, std::move(v));
      ++i;
      ++j;
    }
  }
  row = std::move(out);
}

/// Incremental echelon form of a sparse relation matrix with n columns.
class SparseEchelon {
 public:
  explicit SparseEchelon(int ncols) : ncols_(ncols) {}

  void add_row(SparseRow row) {
    while (!row.empty()) {
      const int lead = row.front().first;
      auto it = pivots_.find(lead);
      if (it == pivots_.end()) {
        mpq_class inv = 1 / row.front().second;
        for (auto& [c, v] : row) v *= inv;
        pivots_.emplace(lead, std::move(row));
        return;
      }
      mpq_class f = row.front().second;
      axpy(row, f, it->second);
    }
  }

  /// Back-substitutes so every pivot column appears in exactly one row.
  void reduce() {
    for (auto it = pivots_.rbegin(); it != pivots_.rend(); ++it) {
      SparseRow& row = it->second;
      bool changed = true;
      while (changed) {
        changed = false;
        for (std::size_t k = 1; k < row.size(); ++k) {
          auto p = pivots_.find(row[k].first);
          if (p == pivots_.end()) continue;
          mpq_class f = row[k].second;
          axpy(row, f, p->second);
          changed = true;
          break;
        }
      }
    }
  }

  int ncols() const { return ncols_; }
  const std::map<int, SparseRow>& pivots() const { return pivots_; }

  std::vector<int> free_columns() const {
    std::vector<int> out;
    for (int c = 0; c < ncols_; ++c)
      if (!pivots_.count(c)) out.push_back(c);
    return out;
  }

 private:
  int ncols_;
  std::map<int, SparseRow> pivots_;
};

}  // namespace qcurve
