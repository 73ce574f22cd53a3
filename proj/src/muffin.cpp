#include "gbspec/muffin.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "gbspec/bessel.hpp"
#include "gbspec/discretize.hpp"
#include "gbspec/numutil.hpp"

namespace gbspec {

namespace {

// Masked-grid Dirichlet Laplacian on { inside(x,y) } with per-direction
// boundary clearances.  clearance(x, y, dir) returns the fraction of h from
// the node to the region boundary along dir (0:+x, 1:-x, 2:+y, 3:-y); only
// queried when the neighbour in that direction is outside.
template <class Inside, class Clearance>
BandedMatrix<double> masked_laplacian(double x_lo, double x_hi, double y_lo,
                                      double y_hi, double h, Inside inside,
                                      Clearance clearance, MaskScheme scheme,
                                      std::size_t* node_count) {
  const auto nx = static_cast<long>(std::ceil((x_hi - x_lo) / h));
  const auto ny = static_cast<long>(std::ceil((y_hi - y_lo) / h));
  auto xpos = [&](long i) { return x_lo + (static_cast<double>(i) + 0.5) * h; };
  auto ypos = [&](long j) { return y_lo + (static_cast<double>(j) + 0.5) * h; };

  std::vector<long> id(static_cast<std::size_t>(nx * ny), -1);
  long dim = 0;
  for (long i = 0; i < nx; ++i)
    for (long j = 0; j < ny; ++j)
      if (inside(xpos(i), ypos(j))) id[static_cast<std::size_t>(i * ny + j)] = dim++;
  if (node_count) *node_count = static_cast<std::size_t>(dim);
  if (dim == 0) throw NumericError("masked_laplacian: region contains no grid nodes");

  BandedMatrix<double> A(static_cast<std::size_t>(dim), static_cast<std::size_t>(ny));
  const double c = 1.0 / (h * h);
  const long dirs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};

  for (long i = 0; i < nx; ++i) {
    for (long j = 0; j < ny; ++j) {
      const long p = id[static_cast<std::size_t>(i * ny + j)];
      if (p < 0) continue;
      const double x = xpos(i), y = ypos(j);
      double diag = 0.0;
      for (int d = 0; d < 4; ++d) {
        const long i2 = i + dirs[d][0], j2 = j + dirs[d][1];
        const long q = (i2 >= 0 && i2 < nx && j2 >= 0 && j2 < ny)
                           ? id[static_cast<std::size_t>(i2 * ny + j2)]
                           : -1;
        if (q >= 0) {
          diag += c;
          if (q > p) A.add_link(static_cast<std::size_t>(q), static_cast<std::size_t>(p), -c);
        } else if (scheme == MaskScheme::ghost) {
          const double g = std::clamp(clearance(x, y, d), 1e-6, 1.0);
          diag += c / g;
        } else {
          diag += c;
        }
      }
      A.add_link(static_cast<std::size_t>(p), static_cast<std::size_t>(p), diag);
    }
  }
  return A;
}

}  // namespace

std::vector<double> disc_eigenvalues(double r, int k) {
  return disc_spectrum(r, k).values;
}

namespace {

DiscSpectrum disc_spectrum_zeros_upto(double r, double x_max, int k_cap) {
  std::vector<double> zeros;
  std::vector<int> orders;
  for (int nu = 0;; ++nu) {
    if (nu > 0 && bessel_j_zero(nu, 1) > x_max) break;
    for (double z : bessel_j_zeros_upto(nu, x_max)) {
      zeros.push_back(z);
      orders.push_back(nu);
    }
  }
  std::vector<std::size_t> ord(zeros.size());
  for (std::size_t i = 0; i < ord.size(); ++i) ord[i] = i;
  std::sort(ord.begin(), ord.end(),
            [&](std::size_t a, std::size_t b) { return zeros[a] < zeros[b]; });

  DiscSpectrum out;
  const double inv_r2 = 1.0 / (r * r);
  for (std::size_t oi = 0; oi < ord.size(); ++oi) {
    const double mu = zeros[ord[oi]] * zeros[ord[oi]] * inv_r2;
    const int mult = orders[ord[oi]] == 0 ? 1 : 2;
    if (!out.values.empty() && mu - out.values.back() <= 1e-9) {
      out.multiplicities.back() += mult;
      continue;
    }
    if (k_cap > 0 && static_cast<int>(out.values.size()) == k_cap) break;
    out.values.push_back(mu);
    out.multiplicities.push_back(mult);
  }
  return out;
}

}  // namespace

DiscSpectrum disc_spectrum(double r, int k) {
  if (!(r > 0.0)) throw PreconditionError("disc_eigenvalues: r must be positive");
  if (k < 1) throw PreconditionError("disc_eigenvalues: k must be >= 1");
  // The k-th zero of J_0 caps the search window: order 0 alone already
  // supplies k distinct eigenvalues.
  const double x_max = bessel_j_zero(0, k) * (1.0 + 1e-14) + 1e-12;
  return disc_spectrum_zeros_upto(r, x_max, k);
}

DiscSpectrum disc_spectrum_below(double r, double bound) {
  if (!(r > 0.0)) throw PreconditionError("disc_spectrum_below: r must be positive");
  if (!(bound > 0.0)) throw PreconditionError("disc_spectrum_below: bound must be positive");
  const double x_max = r * std::sqrt(bound);
  if (bessel_j_zero(0, 1) > x_max) return {};
  return disc_spectrum_zeros_upto(r, x_max, 0);
}

std::vector<double> cut_disc_eigenvalues(double r, double xi, int k, double h,
                                         MaskScheme scheme) {
  if (!(r > 0.0)) throw PreconditionError("cut_disc_eigenvalues: r must be positive");
  if (!(xi > -r) || !(xi <= r))
    throw PreconditionError("cut_disc_eigenvalues: xi must lie in (-r, r]");
  if (k < 1) throw PreconditionError("cut_disc_eigenvalues: k must be >= 1");
  if (!(h > 0.0) || h > r / 32.0 + 1e-15)
    throw PreconditionError("cut_disc_eigenvalues: mesh must satisfy h <= r/32");

  const double r2 = r * r;
  auto inside = [&](double x, double y) { return x * x + y * y < r2 && x < xi; };
  auto clearance = [&](double x, double y, int dir) {
    double d = h;
    switch (dir) {
      case 0: {  // +x
        const double s = r2 - y * y;
        if (s > 0.0) d = std::min(d, -x + std::sqrt(s));
        d = std::min(d, xi - x);
        break;
      }
      case 1: {  // -x
        const double s = r2 - y * y;
        if (s > 0.0) d = std::min(d, x + std::sqrt(s));
        break;
      }
      case 2: {  // +y
        const double s = r2 - x * x;
        if (s > 0.0) d = std::min(d, -y + std::sqrt(s));
        break;
      }
      case 3: {  // -y
        const double s = r2 - x * x;
        if (s > 0.0) d = std::min(d, y + std::sqrt(s));
        break;
      }
    }
    return d / h;
  };

  std::size_t nodes = 0;
  BandedMatrix<double> A = masked_laplacian(-r, std::min(xi, r), -r, r, h, inside,
                                            clearance, scheme, &nodes);
  if (nodes < static_cast<std::size_t>(k))
    throw NumericError("cut_disc_eigenvalues: fewer than k interior nodes (" +
                       std::to_string(nodes) + " < " + std::to_string(k) + ")");
  return lowest_eigenvalues(A, static_cast<std::size_t>(k));
}

std::vector<CutDisc> enumerate_cut_discs(double r, const RotationAngle& theta,
                                         double y_max) {
  if (!(theta.theta() > 0.0) || !(theta.theta() <= 0.25 * 3.14159265358979323846 + 1e-15))
    throw PreconditionError("enumerate_cut_discs: theta must lie in (0, pi/4]");
  if (!(y_max > 0.0)) throw PreconditionError("enumerate_cut_discs: y_max must be positive");
  if (!(r > 0.0) || !(r < 0.5))
    throw PreconditionError("enumerate_cut_discs: r must lie in (0, 1/2)");

  const double c = theta.cos(), s = theta.sin();
  std::vector<CutDisc> out;
  const long j_hi = static_cast<long>(std::ceil((y_max + r) / c)) + 2;
  for (long j = -2; j <= j_hi; ++j) {
    const double b = (static_cast<double>(j) + 0.5) * s;
    // |x'| < r  <=>  i + 1/2 in ((b - r)/c + b ... ) solved directly:
    // x' = (i+1/2) c - (j+1/2) s
    const double lo = ((static_cast<double>(j) + 0.5) * s - r) / c - 0.5;
    const double hi = ((static_cast<double>(j) + 0.5) * s + r) / c - 0.5;
    (void)b;
    for (long i = static_cast<long>(std::floor(lo)) - 1;
         i <= static_cast<long>(std::ceil(hi)) + 1; ++i) {
      const double cx = (static_cast<double>(i) + 0.5) * c - (static_cast<double>(j) + 0.5) * s;
      const double cy = (static_cast<double>(i) + 0.5) * s + (static_cast<double>(j) + 0.5) * c;
      if (std::abs(cx) < r && cy >= 0.0 && cy <= y_max) {
        CutDisc d;
        d.center_x = cx;
        d.center_y = cy;
        d.xi = -cx;
        out.push_back(d);
      }
    }
  }
  std::sort(out.begin(), out.end(),
            [](const CutDisc& a, const CutDisc& b) { return a.center_y < b.center_y; });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].index = static_cast<long>(i) + 1;
  return out;
}

SurfaceSpectrum muffin_surface_spectrum(double r, const RotationAngle& theta,
                                        double a, double b, double y_max, double h,
                                        MaskScheme scheme) {
  if (!(a < b)) throw PreconditionError("muffin_surface_spectrum: requires a < b");
  SurfaceSpectrum out;
  const auto discs = enumerate_cut_discs(r, theta, y_max);

  // Eigenvalues only depend on xi; cache per distinct xi.  Per cut disc we
  // need every mode whose full-disc value sits below b (lambda_k >= mu_k).
  const int kmax =
      std::max<int>(2, static_cast<int>(disc_spectrum_below(r, b).values.size()) + 1);

  std::map<long long, std::vector<double>> cache;  // key: round(xi / 1e-9)
  static const std::vector<double> kEmpty;
  auto eigs_for = [&](double xi) -> const std::vector<double>& {
    // Slivers of width below 4h cannot carry spectrum near the gap: by
    // domain monotonicity lambda_1 >= pi^2/(4h)^2 >> b at the mandated
    // mesh h <= r/32, so they are skipped rather than meshed.
    if (xi + r <= 4.0 * h) return kEmpty;
    const auto key = static_cast<long long>(std::llround(xi * 1e9));
    auto it = cache.find(key);
    if (it == cache.end())
      it = cache.emplace(key, cut_disc_eigenvalues(r, xi, kmax, h, scheme)).first;
    return it->second;
  };

  for (const auto& d : discs) {
    const auto& ev = eigs_for(d.xi);
    for (int k = 0; k < static_cast<int>(ev.size()); ++k) {
      const double lam = ev[static_cast<std::size_t>(k)];
      if (lam > a && lam < b) {
        SurfaceStateRow row;
        row.j = d.index;
        row.xi = d.xi;
        row.eta = d.center_y;
        row.k = k + 1;
        row.lambda = lam;
        out.rows.push_back(row);
      }
    }
  }

  for (const auto& d : discs) {
    bool seen = false;
    for (double x : out.distinct_xi)
      if (std::abs(x - d.xi) < 1e-9) seen = true;
    if (!seen) out.distinct_xi.push_back(d.xi);
  }
  std::sort(out.distinct_xi.begin(), out.distinct_xi.end());

  out.tan_rational = rational_approx(theta.tan(), 1000000, 1e-12).has_value();
  if (out.tan_rational && discs.size() >= 4) {
    // Periodicity check: the xi multiset of the first half already contains
    // every distinct value.
    std::vector<double> first_half;
    for (std::size_t i = 0; i < discs.size() / 2; ++i) first_half.push_back(discs[i].xi);
    std::sort(first_half.begin(), first_half.end());
    out.xi_periodic = true;
    for (double xi : out.distinct_xi) {
      bool found = false;
      for (double v : first_half)
        if (std::abs(v - xi) < 1e-9) {
          found = true;
          break;
        }
      if (!found) {
        out.xi_periodic = false;
        break;
      }
    }
  }
  return out;
}

std::vector<HeightRow> finite_height_convergence(
    double r, const RotationAngle& theta, const std::vector<double>& heights,
    double track_lo, double track_hi, double h, int box_half,
    const EigOptions& opts) {
  if (heights.empty()) throw PreconditionError("finite_height_convergence: no heights");
  for (std::size_t i = 1; i < heights.size(); ++i)
    if (!(heights[i] > heights[i - 1]))
      throw PreconditionError("finite_height_convergence: heights must increase");
  if (!(track_lo < track_hi))
    throw PreconditionError("finite_height_convergence: empty tracking window");

  const double c = theta.cos(), s = theta.sin();
  const double r2 = r * r;
  auto in_discs = [&](double x, double y) {
    const double dx = frac(x) - 0.5, dy = frac(y) - 0.5;
    return dx * dx + dy * dy < r2;
  };
  auto barrier = [&](double x, double y) {
    if (x >= 0.0) return in_discs(x, y) ? 0.0 : 1.0;
    // left half-plane: rotated lattice, membership via M_{-theta}
    const double xr = c * x + s * y, yr = -s * x + c * y;
    return in_discs(xr, yr) ? 0.0 : 1.0;
  };

  const GridSpec grid = GridSpec::box(box_half, h);
  std::vector<HeightRow> out;
  for (double height : heights) {
    auto A = assemble_on_grid<double>(grid.x_axis(), grid.y_axis(),
                                      [&](double x, double y) { return height * barrier(x, y); });
    auto pairs = eigen_range(A, track_lo, track_hi, opts);
    HeightRow row;
    row.height = height;
    for (const auto& p : pairs) row.lambdas.push_back(p.value);
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace gbspec
