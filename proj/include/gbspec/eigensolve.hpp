#pragma once

#include <cstddef>
#include <vector>

#include "gbspec/banded.hpp"

namespace gbspec {

// Result of one inertia count.  status reports whether the shift had to be
// perturbed to complete the factorization.
struct InertiaCount {
  double shift = 0.0;
  std::size_t negatives = 0;  // #{ eigenvalues < shift }
  enum class Status { ok, pivot_perturbed } status = Status::ok;
};

struct EigOptions {
  double residual_tol = 1e-8;  // accepted residual, relative to ||A||_1
  int max_iter = 2000;         // linear-solve budget per extraction call
};

template <class Scalar>
struct EigenPairT {
  double value = 0.0;
  std::vector<Scalar> vector;
  double residual = 0.0;  // ||A v - lambda v||_2 for the unit vector v
};
using EigenPair = EigenPairT<double>;

struct SlicedValue {
  double value = 0.0;
  long multiplicity = 0;
};

// Sylvester inertia count of eigenvalues below sigma.
template <class Scalar>
InertiaCount count_below(const BandedMatrix<Scalar>& A, double sigma);

// count_below(beta) - count_below(alpha); counts multiplicity.
template <class Scalar>
long count_interval(const BandedMatrix<Scalar>& A, double alpha, double beta);

// All eigenvalues in [lo, hi] located by inertia bisection to absolute
// accuracy value_tol, with multiplicities.  Values only; fully deterministic.
template <class Scalar>
std::vector<SlicedValue> slice_eigenvalues(const BandedMatrix<Scalar>& A,
                                           double lo, double hi,
                                           double value_tol);

// The k smallest eigenvalues (with multiplicity), via shift-invert Lanczos
// from below the spectrum, cross-checked against an inertia count.
template <class Scalar>
std::vector<double> lowest_eigenvalues(const BandedMatrix<Scalar>& A,
                                       std::size_t k,
                                       const EigOptions& opts = {});

// The `count` eigenpairs closest to sigma, sorted by |lambda - sigma|.
// Throws NumericError if the iteration budget is exhausted first.
template <class Scalar>
std::vector<EigenPairT<Scalar>> eigenpairs_near(const BandedMatrix<Scalar>& A,
                                                double sigma, std::size_t count,
                                                const EigOptions& opts = {});

// All eigenpairs with alpha < lambda < beta, sorted by value.  Shift-invert
// Lanczos at the interval midpoint with locking, validated against the
// inertia count of the interval; falls back to slicing plus inverse
// iteration for anything the Lanczos sweep misses.
template <class Scalar>
std::vector<EigenPairT<Scalar>> eigen_range(const BandedMatrix<Scalar>& A,
                                            double alpha, double beta,
                                            const EigOptions& opts = {});

}  // namespace gbspec
