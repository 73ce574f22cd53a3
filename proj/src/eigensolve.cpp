#include "gbspec/eigensolve.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <memory>
#include <optional>

namespace gbspec {

namespace {

template <class Scalar>
double dot_real(const std::vector<Scalar>& x, const std::vector<Scalar>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += real_s(conj_s(x[i]) * y[i]);
  return s;
}

template <class Scalar>
Scalar dot_full(const std::vector<Scalar>& x, const std::vector<Scalar>& y) {
  Scalar s(0);
  for (std::size_t i = 0; i < x.size(); ++i) s += conj_s(x[i]) * y[i];
  return s;
}

template <class Scalar>
double norm2(const std::vector<Scalar>& x) {
  double s = 0.0;
  for (const auto& v : x) s += std::norm(cplx(v));
  return std::sqrt(s);
}

template <class Scalar>
void axpy(Scalar a, const std::vector<Scalar>& x, std::vector<Scalar>& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

template <class Scalar>
void scale(std::vector<Scalar>& x, double a) {
  for (auto& v : x) v *= a;
}

// Deterministic dense start vector; seq selects linearly independent patterns.
template <class Scalar>
std::vector<Scalar> det_start(std::size_t n, int seq) {
  std::vector<Scalar> v(n);
  const double c = 0.6180339887498949 + 0.37 * (seq + 1);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = Scalar(std::sin(c * static_cast<double>(i + 1)) +
                  0.25 * std::cos(0.1 + c * c * static_cast<double>(i + 1)));
  return v;
}

template <class Scalar>
void orthogonalize(std::vector<Scalar>& w,
                   const std::vector<std::vector<Scalar>>& basis) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& b : basis) axpy(-dot_full(b, w), b, w);
}

template <class Scalar>
BandedLDLT<Scalar> factor_with_retry(const BandedMatrix<Scalar>& A,
                                     double& sigma, bool& perturbed) {
  double delta = 1e-8 * A.one_norm();
  if (delta == 0.0) delta = 1e-8;
  for (int attempt = 0;; ++attempt) {
    try {
      return BandedLDLT<Scalar>(A, sigma);
    } catch (const FactorizationBreakdown&) {
      if (attempt >= 3) throw;
      sigma += delta;
      delta *= 10.0;
      perturbed = true;
    }
  }
}

// One Rayleigh quotient + true residual, re-using a single apply.
template <class Scalar>
std::pair<double, double> rayleigh_residual(const BandedMatrix<Scalar>& A,
                                            const std::vector<Scalar>& v) {
  std::vector<Scalar> av = A.apply(v);
  const double lambda = dot_real(v, av);
  double r2 = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    r2 += std::norm(cplx(av[i]) - lambda * cplx(v[i]));
  return {lambda, std::sqrt(r2)};
}

// Shift-invert Lanczos with full reorthogonalization and locking.  Collects
// eigenpairs nearest fct.shift() until `want` of them satisfy `accept` (all
// pairs found on the way are returned).  Budget counts linear solves.
template <class Scalar>
std::vector<EigenPairT<Scalar>> lanczos_nearest(
    const BandedMatrix<Scalar>& A, const BandedLDLT<Scalar>& fct,
    std::size_t want, const EigOptions& opts,
    const std::function<bool(double)>& accept, int* solves_used = nullptr) {
  const std::size_t n = A.dim();
  const double tol_res = opts.residual_tol * std::max(A.one_norm(), 1e-300);

  std::vector<EigenPairT<Scalar>> locked;
  std::vector<std::vector<Scalar>> locked_vecs;
  std::size_t accepted = 0;
  int solves = 0;
  int stale_restarts = 0;
  const std::size_t max_basis = std::min<std::size_t>(n, 250);

  auto count_accept = [&](double lam) { return !accept || accept(lam); };

  const int outer_cap = static_cast<int>(n) + 64;
  for (int outer = 0; outer < outer_cap; ++outer) {
    if (accepted >= want || locked.size() >= n) break;
    if (solves >= opts.max_iter || stale_restarts > 4) break;

    std::vector<Scalar> v = det_start<Scalar>(n, outer);
    orthogonalize(v, locked_vecs);
    const double nv = norm2(v);
    if (nv < 1e-10) continue;  // pattern degenerate against locked set
    scale(v, 1.0 / nv);

    std::vector<std::vector<Scalar>> basis{std::move(v)};
    std::vector<double> alpha, beta;  // T_j diagonal / off-diagonal
    bool progress_this_restart = false;

    while (solves < opts.max_iter) {
      std::vector<Scalar> w = basis.back();
      fct.solve_in_place(w.data());
      ++solves;
      orthogonalize(w, locked_vecs);
      alpha.push_back(dot_real(basis.back(), w));
      orthogonalize(w, basis);
      const double bj = norm2(w);
      const std::size_t j = alpha.size();
      const bool invariant = bj < 1e-13 || j >= max_basis;
      if (!invariant) {
        scale(w, 1.0 / bj);
        basis.push_back(std::move(w));
      }

      if (!invariant && j % 5 != 0) {
        beta.push_back(bj);
        continue;
      }

      // Ritz extraction from T_j; beta currently holds the j-1 inner couplings.
      Eigen::VectorXd dv(j), ev(j > 1 ? j - 1 : 0);
      for (std::size_t i = 0; i < j; ++i) dv[i] = alpha[i];
      for (std::size_t i = 0; i + 1 < j; ++i) ev[i] = beta[i];
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> th;
      th.computeFromTridiagonal(dv, ev);

      std::vector<std::size_t> order(j);
      for (std::size_t i = 0; i < j; ++i) order[i] = i;
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(th.eigenvalues()[a]) > std::abs(th.eigenvalues()[b]);
      });

      bool any_locked_now = false;
      for (std::size_t oi = 0; oi < j && accepted < want; ++oi) {
        const std::size_t i = order[oi];
        const double theta = th.eigenvalues()[i];
        if (std::abs(theta) < 1e-300) continue;
        const double est = (bj < 1e-13 ? 0.0 : bj) * std::abs(th.eigenvectors()(j - 1, i));
        if (est > 1e-7 * std::abs(theta)) continue;

        std::vector<Scalar> y(n, Scalar(0));
        for (std::size_t l = 0; l < j; ++l)
          axpy(Scalar(th.eigenvectors()(l, i)), basis[l], y);
        orthogonalize(y, locked_vecs);
        const double ny = norm2(y);
        if (ny < 1e-8) continue;  // already represented in the locked set
        scale(y, 1.0 / ny);
        auto [lam, res] = rayleigh_residual(A, y);
        if (res > tol_res) continue;

        EigenPairT<Scalar> pair;
        pair.value = lam;
        pair.residual = res;
        pair.vector = y;
        locked.push_back(pair);
        locked_vecs.push_back(std::move(y));
        if (count_accept(lam)) ++accepted;
        any_locked_now = true;
        progress_this_restart = true;
      }

      if (accepted >= want || invariant || any_locked_now) break;
      beta.push_back(bj);
    }

    stale_restarts = progress_this_restart ? 0 : stale_restarts + 1;
  }

  if (solves_used) *solves_used = solves;
  return locked;
}

template <class Scalar>
std::optional<EigenPairT<Scalar>> inverse_iterate(
    const BandedMatrix<Scalar>& A, const BandedLDLT<Scalar>& fct,
    const std::vector<std::vector<Scalar>>& ortho, const EigOptions& opts,
    int seq) {
  const std::size_t n = A.dim();
  const double tol_res = opts.residual_tol * std::max(A.one_norm(), 1e-300);
  std::vector<Scalar> x = det_start<Scalar>(n, seq);
  orthogonalize(x, ortho);
  double nx = norm2(x);
  if (nx < 1e-12) return std::nullopt;
  scale(x, 1.0 / nx);

  EigenPairT<Scalar> best;
  best.residual = 1e300;
  for (int it = 0; it < 25; ++it) {
    fct.solve_in_place(x);
    orthogonalize(x, ortho);
    nx = norm2(x);
    if (!(nx > 1e-300)) return std::nullopt;
    scale(x, 1.0 / nx);
    auto [lam, res] = rayleigh_residual(A, x);
    if (res < best.residual) {
      best.value = lam;
      best.residual = res;
      best.vector = x;
    }
    if (res <= tol_res) break;
  }
  if (best.residual <= tol_res) return best;
  return std::nullopt;
}

}  // namespace

template <class Scalar>
InertiaCount count_below(const BandedMatrix<Scalar>& A, double sigma) {
  InertiaCount out;
  out.shift = sigma;
  bool perturbed = false;
  double s = sigma;
  BandedLDLT<Scalar> f = factor_with_retry(A, s, perturbed);
  out.negatives = f.inertia().negatives;
  out.status = perturbed ? InertiaCount::Status::pivot_perturbed
                         : InertiaCount::Status::ok;
  out.shift = s;
  return out;
}

template <class Scalar>
long count_interval(const BandedMatrix<Scalar>& A, double alpha, double beta) {
  if (!(alpha <= beta)) throw PreconditionError("count_interval: requires alpha <= beta");
  if (alpha == beta) return 0;  // degenerate interval
  const auto lo = count_below(A, alpha);
  const auto hi = count_below(A, beta);
  return static_cast<long>(hi.negatives) - static_cast<long>(lo.negatives);
}

template <class Scalar>
std::vector<SlicedValue> slice_eigenvalues(const BandedMatrix<Scalar>& A,
                                           double lo, double hi,
                                           double value_tol) {
  if (!(lo < hi)) throw PreconditionError("slice_eigenvalues: requires lo < hi");
  if (!(value_tol > 0)) throw PreconditionError("slice_eigenvalues: value_tol must be positive");
  struct Item {
    double lo, hi;
    std::size_t nlo, nhi;
  };
  std::deque<Item> work;
  work.push_back({lo, hi, count_below(A, lo).negatives, count_below(A, hi).negatives});
  std::vector<SlicedValue> out;
  while (!work.empty()) {
    Item it = work.front();
    work.pop_front();
    const long k = static_cast<long>(it.nhi) - static_cast<long>(it.nlo);
    if (k <= 0) continue;
    if (it.hi - it.lo <= value_tol) {
      out.push_back({0.5 * (it.lo + it.hi), k});
      continue;
    }
    const double mid = 0.5 * (it.lo + it.hi);
    const std::size_t nmid = count_below(A, mid).negatives;
    work.push_back({it.lo, mid, it.nlo, nmid});
    work.push_back({mid, it.hi, nmid, it.nhi});
  }
  std::sort(out.begin(), out.end(),
            [](const SlicedValue& a, const SlicedValue& b) { return a.value < b.value; });
  return out;
}

template <class Scalar>
std::vector<double> lowest_eigenvalues(const BandedMatrix<Scalar>& A,
                                       std::size_t k, const EigOptions& opts) {
  if (k == 0) throw PreconditionError("lowest_eigenvalues: k must be >= 1");
  const std::size_t n = A.dim();
  k = std::min(k, n);

  // Gershgorin lower bound puts the shift below the whole spectrum; it can
  // be very pessimistic (e.g. 4/h^2 diagonals), which would compress the
  // shift-inverted separations, so tighten it by inertia bisection until
  // the shift sits just below the smallest eigenvalue.
  double glo = 1e300, ghi = -1e300;
  for (std::size_t i = 0; i < n; ++i) {
    double off = 0.0;
    for (std::size_t j = (i > A.bandwidth() ? i - A.bandwidth() : 0);
         j <= std::min(n - 1, i + A.bandwidth()); ++j)
      if (j != i) off += std::abs(A.value(i, j));
    const double d = real_s(A.value(i, i));
    glo = std::min(glo, d - off);
    ghi = std::max(ghi, d + off);
  }
  const double span = std::max(ghi - glo, 1e-9);
  double lo = glo - 1e-12 * span, hi = ghi + 1e-12 * span;
  for (int it = 0; it < 10 && hi - lo > 1e-4 * span; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (count_below(A, mid).negatives == 0)
      lo = mid;
    else
      hi = mid;
  }
  double sigma = lo;

  bool perturbed = false;
  BandedLDLT<Scalar> fct = factor_with_retry(A, sigma, perturbed);
  const std::size_t ask = std::min<std::size_t>(n, k + 2);
  auto pairs = lanczos_nearest(A, fct, ask, opts, {});
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return a.value < b.value; });

  bool valid = pairs.size() >= k;
  if (valid) {
    const double next = (pairs.size() > k) ? pairs[k].value : ghi + span;
    double split = 0.5 * (pairs[k - 1].value + next);
    if (!(split > pairs[k - 1].value))
      split = pairs[k - 1].value + 1e-9 * std::max(1.0, std::abs(pairs[k - 1].value));
    valid = count_below(A, split).negatives == k;
  }
  if (valid) {
    std::vector<double> vals(k);
    for (std::size_t i = 0; i < k; ++i) vals[i] = pairs[i].value;
    return vals;
  }

  // Lanczos missed something (e.g. multiplicity); slice instead.
  double top = sigma + span * 0.5;
  while (count_below(A, top).negatives < k) top += 0.5 * span;
  const double tol = std::max(1e-11 * (std::abs(top) + span), 1e-13);
  auto sliced = slice_eigenvalues(A, sigma, top, tol);
  std::vector<double> vals;
  for (const auto& sv : sliced)
    for (long c = 0; c < sv.multiplicity && vals.size() < k; ++c)
      vals.push_back(sv.value);
  if (vals.size() < k)
    throw NumericError("lowest_eigenvalues: could not isolate requested eigenvalues");
  return vals;
}

template <class Scalar>
std::vector<EigenPairT<Scalar>> eigenpairs_near(const BandedMatrix<Scalar>& A,
                                                double sigma, std::size_t count,
                                                const EigOptions& opts) {
  if (count == 0) throw PreconditionError("eigenpairs_near: count must be >= 1");
  count = std::min(count, A.dim());
  double s = sigma;
  bool perturbed = false;
  BandedLDLT<Scalar> fct = factor_with_retry(A, s, perturbed);
  int solves = 0;
  auto pairs = lanczos_nearest(A, fct, count, opts, {}, &solves);
  if (pairs.size() < count)
    throw NumericError("eigenpairs_near: shift " + std::to_string(sigma) +
                       " converged only " + std::to_string(pairs.size()) + "/" +
                       std::to_string(count) + " pairs within max_iter=" +
                       std::to_string(opts.max_iter));
  std::sort(pairs.begin(), pairs.end(), [&](const auto& a, const auto& b) {
    return std::abs(a.value - sigma) < std::abs(b.value - sigma);
  });
  pairs.resize(count);
  return pairs;
}

template <class Scalar>
std::vector<EigenPairT<Scalar>> eigen_range(const BandedMatrix<Scalar>& A,
                                            double alpha, double beta,
                                            const EigOptions& opts) {
  if (!(alpha < beta)) throw PreconditionError("eigen_range: requires alpha < beta");
  const long k = count_interval(A, alpha, beta);
  if (k <= 0) return {};

  auto inside = [&](double lam) { return lam > alpha && lam < beta; };
  double s = 0.5 * (alpha + beta);
  bool perturbed = false;
  BandedLDLT<Scalar> fct = factor_with_retry(A, s, perturbed);
  auto pairs = lanczos_nearest(A, fct, static_cast<std::size_t>(k), opts, inside);

  std::vector<EigenPairT<Scalar>> found;
  for (auto& p : pairs)
    if (inside(p.value)) found.push_back(std::move(p));

  if (static_cast<long>(found.size()) < k) {
    // Recover the missed ones bracket by bracket.
    const double tol = std::max((beta - alpha) / 4096.0, 1e-13);
    auto brackets = slice_eigenvalues(A, alpha, beta, tol);
    std::vector<std::vector<Scalar>> ortho;
    for (const auto& p : found) ortho.push_back(p.vector);
    for (const auto& br : brackets) {
      long have = 0;
      for (const auto& p : found)
        if (std::abs(p.value - br.value) <= 2.0 * tol) ++have;
      for (long c = have; c < br.multiplicity; ++c) {
        double sb = br.value + 0.01 * tol;
        bool pert = false;
        BandedLDLT<Scalar> fb = factor_with_retry(A, sb, pert);
        bool got = false;
        for (int seq = 0; seq < 6 && !got; ++seq) {
          auto p = inverse_iterate(A, fb, ortho, opts, seq);
          if (p && inside(p->value) && std::abs(p->value - br.value) <= 16.0 * tol) {
            ortho.push_back(p->vector);
            found.push_back(std::move(*p));
            got = true;
          }
        }
        if (!got)
          throw NumericError("eigen_range: failed to extract eigenvector near " +
                             std::to_string(br.value));
      }
    }
  }

  if (static_cast<long>(found.size()) != k)
    throw NumericError("eigen_range: inertia count " + std::to_string(k) +
                       " but " + std::to_string(found.size()) + " pairs extracted");
  std::sort(found.begin(), found.end(),
            [](const auto& a, const auto& b) { return a.value < b.value; });
  return found;
}

#define GBSPEC_INSTANTIATE(S)                                                     \
  template InertiaCount count_below<S>(const BandedMatrix<S>&, double);           \
  template long count_interval<S>(const BandedMatrix<S>&, double, double);        \
  template std::vector<SlicedValue> slice_eigenvalues<S>(const BandedMatrix<S>&,  \
                                                         double, double, double); \
  template std::vector<double> lowest_eigenvalues<S>(const BandedMatrix<S>&,      \
                                                     std::size_t,                 \
                                                     const EigOptions&);          \
  template std::vector<EigenPairT<S>> eigenpairs_near<S>(                         \
      const BandedMatrix<S>&, double, std::size_t, const EigOptions&);            \
  template std::vector<EigenPairT<S>> eigen_range<S>(const BandedMatrix<S>&,      \
                                                     double, double,              \
                                                     const EigOptions&);

GBSPEC_INSTANTIATE(double)
GBSPEC_INSTANTIATE(cplx)

#undef GBSPEC_INSTANTIATE

}  // namespace gbspec
