#include "gbspec/banded.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace gbspec {

template <class Scalar>
void BandedMatrix<Scalar>::apply(const Scalar* x, Scalar* y) const {
  for (std::size_t i = 0; i < dim_; ++i) y[i] = Scalar(0);
  for (std::size_t j = 0; j < dim_; ++j) {
    const Scalar* col = &store_[j * (bw_ + 1)];
    y[j] += col[0] * x[j];
    const std::size_t dmax = std::min(bw_, dim_ - 1 - j);
    for (std::size_t d = 1; d <= dmax; ++d) {
      y[j + d] += col[d] * x[j];
      y[j] += conj_s(col[d]) * x[j + d];
    }
  }
}

template <class Scalar>
double BandedMatrix<Scalar>::one_norm() const {
  std::vector<double> colsum(dim_, 0.0);
  for (std::size_t j = 0; j < dim_; ++j) {
    const Scalar* col = &store_[j * (bw_ + 1)];
    colsum[j] += std::abs(col[0]);
    const std::size_t dmax = std::min(bw_, dim_ - 1 - j);
    for (std::size_t d = 1; d <= dmax; ++d) {
      const double a = std::abs(col[d]);
      colsum[j] += a;
      colsum[j + d] += a;
    }
  }
  double m = 0.0;
  for (double s : colsum) m = std::max(m, s);
  return m;
}

namespace {

void print_value(std::ostream& os, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

void print_value(std::ostream& os, const cplx& v) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%.17g %.17g", v.real(), v.imag());
  os << buf;
}

}  // namespace

template <class Scalar>
void BandedMatrix<Scalar>::write_coordinate(std::ostream& os) const {
  for (std::size_t j = 0; j < dim_; ++j) {
    const std::size_t dmax = std::min(bw_, dim_ - 1 - j);
    for (std::size_t d = 0; d <= dmax; ++d) {
      const Scalar v = store_[j * (bw_ + 1) + d];
      if (v == Scalar(0)) continue;
      os << (j + d) << ' ' << j << ' ';
      print_value(os, v);
      os << '\n';
      if (d > 0) {
        os << j << ' ' << (j + d) << ' ';
        print_value(os, conj_s(v));
        os << '\n';
      }
    }
  }
}

template <class Scalar>
BandedLDLT<Scalar>::BandedLDLT(const BandedMatrix<Scalar>& A, double shift,
                               double breakdown_tol)
    : dim_(A.dim()),
      bw_(std::min(A.bandwidth() + 1, A.dim() - 1)),
      shift_(shift),
      d1_(A.dim(), 0.0),
      d21_(A.dim(), Scalar(0)),
      kind_(A.dim(), 0) {
  const std::size_t n = dim_;
  const std::size_t ld = bw_ + 1;
  band_.assign(n * ld, Scalar(0));

  // Working copy of A - shift*I with one extra band row for 2x2 fill.
  const std::size_t abw = A.bandwidth();
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t dmax = std::min(abw, n - 1 - j);
    for (std::size_t d = 0; d <= dmax; ++d) band_[j * ld + d] = A.at(j + d, j);
    band_[j * ld] -= Scalar(shift);
  }

  double scale = A.one_norm() + std::abs(shift);
  if (scale == 0.0) scale = 1.0;
  const double tol1 = breakdown_tol * scale;

  // alpha = (1 + sqrt(17)) / 8, the Bunch-Kaufman pivot threshold.
  const double alpha = 0.6403882032022076;

  std::vector<Scalar> w1(ld), w2(ld), l1(ld), l2(ld);

  std::size_t k = 0;
  while (k < n) {
    Scalar* colk = &band_[k * ld];
    const std::size_t reach = std::min(bw_, n - 1 - k);
    const double a = real_s(colk[0]);
    double lam = 0.0;
    for (std::size_t d = 1; d <= reach; ++d) lam = std::max(lam, std::abs(colk[d]));

    if (k == n - 1 || lam == 0.0 || std::abs(a) >= alpha * lam) {
      // 1x1 pivot.
      if (std::abs(a) <= tol1)
        throw FactorizationBreakdown("banded LDLT: zero 1x1 pivot at column " +
                                     std::to_string(k));
      kind_[k] = 1;
      d1_[k] = a;
      (a < 0.0 ? inertia_.negatives : inertia_.positives)++;
      // Rank-1 Schur update, then store L column in place.
      for (std::size_t c = 1; c <= reach; ++c) {
        const Scalar lc = conj_s(colk[c]) / a;  // conj(w_c)/a
        Scalar* colc = &band_[(k + c) * ld];
        for (std::size_t r = c; r <= reach; ++r) colc[r - c] -= colk[r] * lc;
      }
      for (std::size_t d = 1; d <= reach; ++d) colk[d] /= a;
      ++k;
    } else {
      // 2x2 pivot on rows (k, k+1).
      Scalar* colk1 = &band_[(k + 1) * ld];
      const Scalar b = colk[1];
      const double c2 = real_s(colk1[0]);
      const double det = a * c2 - std::norm(b);
      if (std::abs(det) <= tol1 * tol1)
        throw FactorizationBreakdown("banded LDLT: singular 2x2 pivot at column " +
                                     std::to_string(k));
      kind_[k] = 2;
      d1_[k] = a;
      d21_[k] = b;
      d1_[k + 1] = c2;
      if (det < 0.0) {
        inertia_.negatives++;
        inertia_.positives++;
      } else if (a + c2 < 0.0) {
        inertia_.negatives += 2;
      } else {
        inertia_.positives += 2;
      }

      const std::size_t reach1 = std::min(bw_, n - 2 - k);  // rows k+2 .. k+1+reach1
      for (std::size_t t = 1; t <= reach1; ++t) {
        const std::size_t r = k + 1 + t;
        w1[t] = (r - k <= bw_) ? colk[r - k] : Scalar(0);
        w2[t] = colk1[t];
        l1[t] = (w1[t] * c2 - w2[t] * b) / det;
        l2[t] = (w2[t] * a - w1[t] * conj_s(b)) / det;
      }
      for (std::size_t c = 1; c <= reach1; ++c) {
        const Scalar u1 = conj_s(w1[c]);
        const Scalar u2 = conj_s(w2[c]);
        Scalar* colc = &band_[(k + 1 + c) * ld];
        for (std::size_t r = c; r <= reach1; ++r)
          colc[r - c] -= l1[r] * u1 + l2[r] * u2;
      }
      for (std::size_t t = 1; t <= reach1; ++t) {
        const std::size_t r = k + 1 + t;
        if (r - k <= bw_) colk[r - k] = l1[t];
        colk1[t] = l2[t];
      }
      colk[1] = Scalar(0);  // the (k+1, k) slot belongs to D, not L
      k += 2;
    }
  }
}

template <class Scalar>
void BandedLDLT<Scalar>::solve_in_place(Scalar* x) const {
  const std::size_t n = dim_;
  const std::size_t ld = bw_ + 1;

  // L y = x (unit lower, column-oriented).
  for (std::size_t j = 0; j < n; ++j) {
    const Scalar xj = x[j];
    if (xj == Scalar(0)) continue;
    const Scalar* col = &band_[j * ld];
    const std::size_t dmax = std::min(bw_, n - 1 - j);
    for (std::size_t d = 1; d <= dmax; ++d) x[j + d] -= col[d] * xj;
  }

  // D z = y, blockwise.
  for (std::size_t k = 0; k < n;) {
    if (kind_[k] == 1) {
      x[k] /= d1_[k];
      ++k;
    } else {
      const double a = d1_[k], c = d1_[k + 1];
      const Scalar b = d21_[k];
      const double det = a * c - std::norm(b);
      const Scalar u = x[k], v = x[k + 1];
      x[k] = (u * c - conj_s(b) * v) / det;
      x[k + 1] = (v * a - b * u) / det;
      k += 2;
    }
  }

  // L^* w = z (column-oriented dot products).
  for (std::size_t j = n; j-- > 0;) {
    const Scalar* col = &band_[j * ld];
    const std::size_t dmax = std::min(bw_, n - 1 - j);
    Scalar s = x[j];
    for (std::size_t d = 1; d <= dmax; ++d) s -= conj_s(col[d]) * x[j + d];
    x[j] = s;
  }
}

template class BandedMatrix<double>;
template class BandedMatrix<cplx>;
template class BandedLDLT<double>;
template class BandedLDLT<cplx>;

}  // namespace gbspec
