#pragma once

// Petersson products of weight-2 forms on Gamma_0(N) by integration over coset translates
// of the standard fundamental domain.

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <complex>
#include <thread>
#include <vector>

#include "qcurve/arith.hpp"
#include "qcurve/error.hpp"
#include "qcurve/modsym.hpp"
#include "qcurve/newforms.hpp"

namespace qcurve {

struct PeterssonOptions {
  double cusp_height = 2.0;   // truncate each piece at height cusp_height * width
  double series_tol = 1e-15;  // pointwise bound on |tail| * Im
  double coef_scale = 1.0;    // |a_n| <= coef_scale * sqrt(3) n for both inputs
  unsigned threads = 1;
};

struct PeterssonResult {
  double value = 0;
  double error = 0;        // quadrature difference + cusp tails + imaginary residue
  double quadrature = 0;
  double cusp_tail = 0;
  double imaginary = 0;
  std::size_t terms = 0;   // coefficients consumed
};

namespace detail {

struct CosetData {
  i64 width;
  std::vector<std::array<i64, 4>> rows;  // candidate matrices [[a, b], [c, d]] in the coset
};

inline std::vector<CosetData> coset_data(i64 n) {
  P1List p1(n);
  const std::size_t count = p1.size();
  std::vector<std::vector<std::pair<i64, std::array<i64, 2>>>> cand(count);
  const std::size_t keep = 6;
  i64 bound = static_cast<i64>(std::ceil(2 * std::sqrt(static_cast<double>(n)))) + 2;
  while (true) {
    for (auto& c : cand) c.clear();
    for (i64 c = 0; c <= bound; ++c)
      for (i64 d = -bound; d <= bound; ++d) {
        if (gcd(c, d) != 1 || (c == 0 && d != 1)) continue;
        cand[p1.index(c, d)].push_back({c * c + d * d, {c, d}});
      }
    // Small c with any d: best representatives high up in wide cusps.
    for (i64 c = 1; c <= 4; ++c)
      for (i64 d = -n; d <= n; ++d) {
        if (gcd(c, d) != 1 || std::abs(d) <= bound) continue;
        cand[p1.index(c, d)].push_back({c * c + d * d, {c, d}});
      }
    bool all = std::all_of(cand.begin(), cand.end(), [](const auto& v) { return !v.empty(); });
    if (all) break;
    bound *= 2;
  }
  std::vector<CosetData> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto& v = cand[i];
    std::sort(v.begin(), v.end());
    std::vector<std::pair<i64, std::array<i64, 2>>> chosen;
    for (std::size_t k = 0; k < v.size(); ++k) {
      // keep the shortest rows plus the shortest row for each of the smallest c values
      bool smallest_c = true;
      for (std::size_t j = 0; j < k; ++j)
        if (v[j].second[0] <= v[k].second[0]) smallest_c = false;
      if (k < keep || smallest_c) chosen.push_back(v[k]);
    }
    v = std::move(chosen);
    for (auto& [norm, cd] : v) {
      i64 x, y;
      xgcd(cd[0], cd[1], x, y);  // c x + d y = 1 -> [[y, -x], [c, d]]
      out[i].rows.push_back({y, -x, cd[0], cd[1]});
    }
    const i64 c = out[i].rows[0][2];
    out[i].width = n / gcd(c * c, n);
  }
  return out;
}

inline std::size_t terms_for(double im, const PeterssonOptions& opt) {
  const double r = std::exp(-2 * M_PI * im);
  // sqrt(3) * scale * sum_{k > m} k r^k <= tol / im
  double target = opt.series_tol / std::max(im, 1e-300);
  std::size_t m = 1;
  while (true) {
    double md = static_cast<double>(m);
    double tail = std::sqrt(3.0) * opt.coef_scale * std::pow(r, md + 1) * ((md + 1) - md * r) /
                  ((1 - r) * (1 - r));
    if (tail < target) return m;
    m = m < 16 ? m + 1 : m + m / 8;
  }
}

}  // namespace detail

/// Integrates g(z) conj(h(z)) y^2 over Gamma_0(N) \ H for weight-2 forms with real
/// q-expansion coefficients g[n], h[n] (index 0 ignored).
class PeterssonIntegrator {
 public:
  explicit PeterssonIntegrator(i64 level, PeterssonOptions opt = {})
      : level_(level), opt_(opt), cosets_(detail::coset_data(level)) {}

  i64 level() const { return level_; }
  std::size_t coset_count() const { return cosets_.size(); }

  /// Number of coefficients needed for the configured series tolerance.
  std::size_t required_terms() const {
    std::size_t need = 0;
    for (const auto& cs : cosets_) {
      scan<12>(cs, [&](double, double, std::complex<double> w, double) {
        need = std::max(need, detail::terms_for(w.imag(), opt_));
      });
    }
    return need;
  }

  PeterssonResult product(const std::vector<double>& g, const std::vector<double>& h) const {
    return gram({g, h})[0][1];
  }

  /// All pairwise products <f_i, f_j> in one pass over the quadrature nodes.
  std::vector<std::vector<PeterssonResult>> gram(const std::vector<std::vector<double>>& forms) const {
    const std::size_t need = required_terms();
    for (const auto& f : forms)
      if (f.size() < need + 1)
        throw Error(ErrorKind::InsufficientCoefficients,
                    "Petersson integration at level " + std::to_string(level_) + " needs " +
                        std::to_string(need) + " coefficients");
    const std::size_t k = forms.size(), nc = cosets_.size();
    using Mat = std::vector<std::complex<double>>;
    std::vector<Mat> lo(nc, Mat(k * k)), hi(nc, Mat(k * k));
    std::vector<std::vector<double>> tails(nc, std::vector<double>(k * k));
    auto work = [&](std::size_t begin, std::size_t step) {
      for (std::size_t i = begin; i < nc; i += step) {
        integrate<12>(cosets_[i], forms, lo[i], nullptr);
        integrate<20>(cosets_[i], forms, hi[i], &tails[i]);
      }
    };
    const unsigned t = std::max(1u, opt_.threads);
    if (t == 1) {
      work(0, 1);
    } else {
      std::vector<std::thread> pool;
      for (unsigned j = 0; j < t; ++j) pool.emplace_back(work, j, t);
      for (auto& th : pool) th.join();
    }
    std::vector<std::vector<PeterssonResult>> out(k, std::vector<PeterssonResult>(k));
    for (std::size_t e = 0; e < k * k; ++e) {
      std::complex<double> a = 0, b = 0;
      double tail = 0;
      for (std::size_t i = 0; i < nc; ++i) {  // fixed order
        a += lo[i][e];
        b += hi[i][e];
        tail += tails[i][e];
      }
      PeterssonResult& r = out[e / k][e % k];
      r.value = b.real();
      r.quadrature = std::abs(b - a);
      r.cusp_tail = tail;
      r.imaginary = std::abs(b.imag());
      r.error = r.quadrature + r.cusp_tail + r.imaginary + 1e-12 * std::abs(r.value);
      r.terms = need;
    }
    return out;
  }

  PeterssonResult norm(const std::vector<double>& f) const { return product(f, f); }

 private:
  // Visits quadrature nodes (x, y, reduced point w, weight / y^2 * |cz + d|^-4 folded in).
  template <unsigned P, class F>
  void scan(const detail::CosetData& cs, F&& visit) const {
    using Q = boost::math::quadrature::gauss<double, P>;
    const auto& ab = Q::abscissa();
    const auto& wt = Q::weights();
    std::vector<std::pair<double, double>> nodes;  // on [-1, 1]
    for (std::size_t k = 0; k < ab.size(); ++k) {
      if (ab[k] == 0) {
        nodes.push_back({0.0, wt[k]});
      } else {
        nodes.push_back({ab[k], wt[k]});
        nodes.push_back({-ab[k], wt[k]});
      }
    }
    const double top = opt_.cusp_height * static_cast<double>(cs.width);
    const double xpanels[3] = {-0.5, 0.0, 0.5};
    for (int px = 0; px < 2; ++px) {
      const double xa = xpanels[px], xb = xpanels[px + 1];
      for (const auto& [ux, wx] : nodes) {
        const double x = 0.5 * (xb - xa) * ux + 0.5 * (xa + xb);
        const double wxs = 0.5 * (xb - xa) * wx;
        double y0 = std::sqrt(1 - x * x);
        std::vector<double> cuts{y0};
        double y = 1.0;
        if (y > y0) cuts.push_back(y);
        while (y < top) {
          y = std::min(top, std::max(y * 1.25, y + 0.25));
          cuts.push_back(y);
        }
        for (std::size_t pc = 0; pc + 1 < cuts.size(); ++pc) {
          const double ya = cuts[pc], yb = cuts[pc + 1];
          for (const auto& [uy, wy] : nodes) {
            const double yy = 0.5 * (yb - ya) * uy + 0.5 * (ya + yb);
            const double wys = 0.5 * (yb - ya) * wy;
            visit(x, yy, reduce(cs, {x, yy}), wxs * wys);
          }
        }
      }
    }
  }

  // Representative of the coset acting on z with the largest imaginary part.
  static std::complex<double> reduce(const detail::CosetData& cs, std::complex<double> z) {
    double best = -1;
    std::complex<double> out;
    for (const auto& m : cs.rows) {
      std::complex<double> den = static_cast<double>(m[2]) * z + static_cast<double>(m[3]);
      double im = z.imag() / std::norm(den);
      if (im > best) {
        best = im;
        out = (static_cast<double>(m[0]) * z + static_cast<double>(m[1])) / den;
      }
    }
    return out;
  }

  template <unsigned P>
  void integrate(const detail::CosetData& cs, const std::vector<std::vector<double>>& forms,
                 std::vector<std::complex<double>>& sums, std::vector<double>* tails) const {
    const std::size_t k = forms.size();
    const double top = opt_.cusp_height * static_cast<double>(cs.width);
    std::vector<std::complex<double>> val(k);
    std::vector<double> top_abs(k * k, 0.0);
    scan<P>(cs, [&](double, double y, std::complex<double> w, double weight) {
      const std::size_t m = detail::terms_for(w.imag(), opt_);
      const std::complex<double> q = std::exp(std::complex<double>(0, 2 * M_PI) * w);
      std::fill(val.begin(), val.end(), std::complex<double>(0));
      std::complex<double> qn = q;
      for (std::size_t n = 1; n <= m; ++n) {
        for (std::size_t i = 0; i < k; ++i) val[i] += forms[i][n] * qn;
        qn *= q;
      }
      const double im = w.imag();
      const double scale = im * im / (y * y);
      const bool near_top = std::abs(y - top) < 0.2 * top;
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
          const std::complex<double> v = val[i] * std::conj(val[j]) * scale;
          sums[i * k + j] += weight * v;
          if (tails && near_top) top_abs[i * k + j] = std::max(top_abs[i * k + j], std::abs(v));
        }
    });
    if (tails)
      for (std::size_t e = 0; e < k * k; ++e)
        (*tails)[e] = top_abs[e] * static_cast<double>(cs.width) / (4 * M_PI) * 2.0;
  }

  i64 level_;
  PeterssonOptions opt_;
  std::vector<detail::CosetData> cosets_;
};

inline std::vector<double> to_doubles(const std::vector<Real>& a) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = static_cast<double>(a[i]);
  return out;
}

}  // namespace qcurve
