#pragma once

#include <complex>
#include <cstddef>
#include <ostream>
#include <vector>

#include "gbspec/errors.hpp"

namespace gbspec {

using cplx = std::complex<double>;

inline double conj_s(double x) { return x; }
inline cplx conj_s(const cplx& x) { return std::conj(x); }
inline double real_s(double x) { return x; }
inline double real_s(const cplx& x) { return x.real(); }

// Symmetric (real) or Hermitian (complex) matrix in lower-band storage.
// Column j holds A(j+d, j) for d = 0..bandwidth at store[j*(bw+1)+d].
template <class Scalar>
class BandedMatrix {
 public:
  BandedMatrix(std::size_t dim, std::size_t bandwidth)
      : dim_(dim), bw_(dim == 0 ? 0 : std::min(bandwidth, dim - 1)) {
    if (dim == 0) throw PreconditionError("BandedMatrix: dimension must be positive");
    store_.assign(dim_ * (bw_ + 1), Scalar(0));
  }

  std::size_t dim() const { return dim_; }
  std::size_t bandwidth() const { return bw_; }

  // Lower-triangle accessor, row >= col, row - col <= bandwidth.
  Scalar& at(std::size_t row, std::size_t col) { return store_[col * (bw_ + 1) + (row - col)]; }
  const Scalar& at(std::size_t row, std::size_t col) const {
    return store_[col * (bw_ + 1) + (row - col)];
  }

  // Full (i, j) lookup honouring symmetry; zero outside the band.
  Scalar value(std::size_t i, std::size_t j) const {
    if (i < j) return conj_s(value(j, i));
    if (i - j > bw_) return Scalar(0);
    return at(i, j);
  }

  // Adds v to A(i, j) and conj(v) to A(j, i).  For i == j, v must be real
  // in the Hermitian case (not checked).
  void add_link(std::size_t i, std::size_t j, Scalar v) {
    if (i >= j)
      at(i, j) += v;
    else
      at(j, i) += conj_s(v);
  }

  void apply(const Scalar* x, Scalar* y) const;
  std::vector<Scalar> apply(const std::vector<Scalar>& x) const {
    std::vector<Scalar> y(dim_);
    apply(x.data(), y.data());
    return y;
  }

  // Maximum absolute column sum.
  double one_norm() const;

  // Plain-text coordinate dump: "row col value" per structurally stored
  // entry (both triangles), 17 significant digits, 0-based indices.
  void write_coordinate(std::ostream& os) const;

 private:
  std::size_t dim_, bw_;
  std::vector<Scalar> store_;
};

struct Inertia {
  std::size_t negatives = 0;
  std::size_t positives = 0;
};

// LDL^T (LDL^*) factorization of A - shift*I with Bunch-Kaufman style
// 1x1 / 2x2 pivoting restricted to adjacent rows, so no permutations are
// needed and the factor stays banded (bandwidth grows by at most one).
// Sylvester's law of inertia then gives eigenvalue counts from D.
// Throws FactorizationBreakdown when a pivot is smaller than
// breakdown_tol * ||A - shift I||_1.
template <class Scalar>
class BandedLDLT {
 public:
  BandedLDLT(const BandedMatrix<Scalar>& A, double shift,
             double breakdown_tol = 1e-13);

  const Inertia& inertia() const { return inertia_; }
  std::size_t dim() const { return dim_; }
  double shift() const { return shift_; }

  // x := (A - shift I)^{-1} x
  void solve_in_place(Scalar* x) const;
  void solve_in_place(std::vector<Scalar>& x) const { solve_in_place(x.data()); }

 private:
  std::size_t dim_, bw_;          // bw_ = working bandwidth (A.bandwidth()+1)
  double shift_;
  std::vector<Scalar> band_;      // unit lower factor, band layout
  std::vector<double> d1_;        // diagonal of D (real)
  std::vector<Scalar> d21_;       // subdiagonal of D for 2x2 blocks
  std::vector<char> kind_;        // 1 = 1x1 pivot, 2 = 2x2 lead, 0 = trailing half
  Inertia inertia_;
};

extern template class BandedMatrix<double>;
extern template class BandedMatrix<cplx>;
extern template class BandedLDLT<double>;
extern template class BandedLDLT<cplx>;

}  // namespace gbspec
