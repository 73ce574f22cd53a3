#include "gbspec/discretize.hpp"

#include <cmath>

namespace gbspec {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

// Interleaves a periodic axis so that physical neighbours (including the
// wrap pair) sit at most two slots apart: 0, n-1, 1, n-2, ...
std::size_t fold_slot(std::size_t i, std::size_t n) {
  return (2 * i < n) ? 2 * i : 2 * (n - 1 - i) + 1;
}

std::size_t axis_slot(const Axis1D& a, std::size_t i) {
  return a.wrap ? fold_slot(i, a.count) : i;
}

void check_axis(const Axis1D& a) {
  if (a.count == 0) throw PreconditionError("assemble: axis with no nodes");
  if (!(a.spacing > 0.0)) throw PreconditionError("assemble: non-positive mesh width");
  if (a.wrap && a.count < 2)
    throw PreconditionError("assemble: periodic axis needs at least 2 nodes");
}

long positive_reciprocal(double h) {
  if (!(h > 0.0)) return 0;
  const double inv = 1.0 / h;
  const double r = std::round(inv);
  if (std::abs(inv - r) > 1e-9 * inv) return 0;
  return static_cast<long>(r);
}

}  // namespace

GridSpec GridSpec::box(int n, double h) {
  GridSpec g;
  g.domain = Domain::box;
  g.n = n;
  g.h = h;
  g.bx = g.by = Boundary::dirichlet;
  g.validate();
  return g;
}

GridSpec GridSpec::strip(int n, double h) {
  GridSpec g;
  g.domain = Domain::strip;
  g.n = n;
  g.h = h;
  g.bx = g.by = Boundary::periodic;
  g.validate();
  return g;
}

GridSpec GridSpec::cell(int px, int py, double h) {
  GridSpec g;
  g.domain = Domain::cell;
  g.px = px;
  g.py = py;
  g.h = h;
  g.bx = g.by = Boundary::periodic;
  g.validate();
  return g;
}

GridSpec GridSpec::bloch_cell(int px, int py, double h, double kx, double ky) {
  GridSpec g;
  g.domain = Domain::cell;
  g.px = px;
  g.py = py;
  g.h = h;
  g.bx = g.by = Boundary::bloch;
  g.kx = kx;
  g.ky = ky;
  g.validate();
  return g;
}

void GridSpec::validate() const {
  if (positive_reciprocal(h) == 0)
    throw PreconditionError("GridSpec: 1/h must be a positive integer (mesh commensurate with the unit cell)");
  if (domain == Domain::box || domain == Domain::strip) {
    if (n < 1) throw PreconditionError("GridSpec: half-width n must be >= 1");
  } else {
    if (px < 1 || py < 1) throw PreconditionError("GridSpec: cell periods must be >= 1");
  }
  const bool has_bloch = bx == Boundary::bloch || by == Boundary::bloch;
  if (has_bloch && domain != Domain::cell)
    throw PreconditionError("GridSpec: Bloch boundary is only available on cell domains");
  if (kx < 0.0 || kx >= kTwoPi || ky < 0.0 || ky >= kTwoPi)
    throw PreconditionError("GridSpec: Bloch phases must lie in [0, 2 pi)");
  if (domain == Domain::box && (bx != Boundary::dirichlet || by != Boundary::dirichlet))
    throw PreconditionError("GridSpec: box domains use Dirichlet boundaries");
}

Axis1D GridSpec::x_axis() const {
  Axis1D a;
  a.spacing = h;
  const auto q = static_cast<std::size_t>(positive_reciprocal(h));
  switch (domain) {
    case Domain::box:
    case Domain::strip:
      a.count = 2 * static_cast<std::size_t>(n) * q;
      a.origin = -static_cast<double>(n) + h / 2.0;
      break;
    case Domain::cell:
      a.count = static_cast<std::size_t>(px) * q;
      a.origin = h / 2.0;
      break;
  }
  a.wrap = bx != Boundary::dirichlet;
  a.phase = bx == Boundary::bloch ? kx : 0.0;
  return a;
}

Axis1D GridSpec::y_axis() const {
  Axis1D a;
  a.spacing = h;
  const auto q = static_cast<std::size_t>(positive_reciprocal(h));
  switch (domain) {
    case Domain::box:
      a.count = 2 * static_cast<std::size_t>(n) * q;
      a.origin = -static_cast<double>(n) + h / 2.0;
      break;
    case Domain::strip:
      a.count = q;
      a.origin = h / 2.0;
      break;
    case Domain::cell:
      a.count = static_cast<std::size_t>(py) * q;
      a.origin = h / 2.0;
      break;
  }
  a.wrap = by != Boundary::dirichlet;
  a.phase = by == Boundary::bloch ? ky : 0.0;
  return a;
}

template <class Scalar>
BandedMatrix<Scalar> assemble_on_grid(const Axis1D& ax, const Axis1D& ay,
                                      const std::function<double(double, double)>& q) {
  check_axis(ax);
  check_axis(ay);
  const std::size_t nx = ax.count, ny = ay.count;
  const std::size_t dim = nx * ny;
  const double cx = 1.0 / (ax.spacing * ax.spacing);
  const double cy = 1.0 / (ay.spacing * ay.spacing);

  auto idx = [&](std::size_t ix, std::size_t iy) {
    return axis_slot(ax, ix) * ny + axis_slot(ay, iy);
  };

  // First pass: bandwidth over all links.
  std::size_t bw = 0;
  auto widen = [&](std::size_t p, std::size_t r) {
    bw = std::max(bw, p > r ? p - r : r - p);
  };
  for (std::size_t ix = 0; ix < nx; ++ix) {
    if (ix + 1 < nx) widen(idx(ix, 0), idx(ix + 1, 0));
  }
  if (ax.wrap && nx > 1) widen(idx(nx - 1, 0), idx(0, 0));
  std::size_t bwy = 0;
  for (std::size_t iy = 0; iy < ny; ++iy)
    if (iy + 1 < ny) bwy = std::max(bwy, axis_slot(ay, iy) > axis_slot(ay, iy + 1)
                                             ? axis_slot(ay, iy) - axis_slot(ay, iy + 1)
                                             : axis_slot(ay, iy + 1) - axis_slot(ay, iy));
  if (ay.wrap && ny > 1) {
    const std::size_t a = axis_slot(ay, ny - 1), b = axis_slot(ay, 0);
    bwy = std::max(bwy, a > b ? a - b : b - a);
  }
  bw = std::max(bw, bwy);

  BandedMatrix<Scalar> A(dim, bw);

  for (std::size_t ix = 0; ix < nx; ++ix) {
    const double x = ax.pos(ix);
    for (std::size_t iy = 0; iy < ny; ++iy) {
      const double y = ay.pos(iy);
      const std::size_t p = idx(ix, iy);
      A.add_link(p, p, Scalar(2.0 * cx + 2.0 * cy + q(x, y)));
      if (iy + 1 < ny) A.add_link(idx(ix, iy + 1), p, Scalar(-cy));
    }
  }

  // y closing links, with the Bloch phase on the row of the last node.
  if (ay.wrap && ny >= 2) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const cplx w = -cy * cplx(std::cos(ay.phase), std::sin(ay.phase));
      if constexpr (std::is_same_v<Scalar, cplx>) {
        A.add_link(idx(ix, ny - 1), idx(ix, 0), w);
      } else {
        A.add_link(idx(ix, ny - 1), idx(ix, 0), w.real());
      }
    }
  }

  // x links.
  for (std::size_t iy = 0; iy < ny; ++iy) {
    for (std::size_t ix = 0; ix + 1 < nx; ++ix)
      A.add_link(idx(ix + 1, iy), idx(ix, iy), Scalar(-cx));
    if (ax.wrap && nx >= 2) {
      const cplx w = -cx * cplx(std::cos(ax.phase), std::sin(ax.phase));
      if constexpr (std::is_same_v<Scalar, cplx>) {
        A.add_link(idx(nx - 1, iy), idx(0, iy), w);
      } else {
        A.add_link(idx(nx - 1, iy), idx(0, iy), w.real());
      }
    }
  }

  return A;
}

BandedMatrix<double> assemble(const PeriodicPotential& v, const GridSpec& grid) {
  grid.validate();
  if (grid.bx == GridSpec::Boundary::bloch || grid.by == GridSpec::Boundary::bloch)
    throw PreconditionError("assemble: Bloch grids produce complex operators; use assemble_bloch");
  return assemble_on_grid<double>(grid.x_axis(), grid.y_axis(),
                                  [&](double x, double y) { return v(x, y); });
}

BandedMatrix<double> assemble(const GrainPotential& w, const GridSpec& grid) {
  grid.validate();
  if (grid.bx == GridSpec::Boundary::bloch || grid.by == GridSpec::Boundary::bloch)
    throw PreconditionError("assemble: Bloch grids are for periodic potentials only");
  return assemble_on_grid<double>(grid.x_axis(), grid.y_axis(),
                                  [&](double x, double y) { return w(x, y); });
}

BandedMatrix<cplx> assemble_bloch(const PeriodicPotential& v, const GridSpec& grid) {
  grid.validate();
  return assemble_on_grid<cplx>(grid.x_axis(), grid.y_axis(),
                                [&](double x, double y) { return v(x, y); });
}

BandedMatrix<cplx> bloch_fiber(const PeriodicPotential& v, double kx, double ky,
                               double h) {
  return assemble_bloch(v, GridSpec::bloch_cell(1, 1, h, kx, ky));
}

namespace {

// 4-point Gauss-Legendre on (lo, hi) applied to x -> g(x, y).
double gauss4_x(const GrainPotential& g, double lo, double hi, double y) {
  static const double node[4] = {-0.8611363115940526, -0.3399810435848563,
                                 0.3399810435848563, 0.8611363115940526};
  static const double weight[4] = {0.3478548451374538, 0.6521451548625461,
                                   0.6521451548625461, 0.3478548451374538};
  const double c = 0.5 * (lo + hi), r = 0.5 * (hi - lo);
  double s = 0.0;
  for (int i = 0; i < 4; ++i) s += weight[i] * g(c + r * node[i], y);
  return s * r;
}

}  // namespace

double seam_blended_sample(const GrainPotential& g, double x_lo, double x_hi,
                           double y) {
  const double mid = 0.5 * (x_lo + x_hi);
  if (!(x_lo < 0.0 && 0.0 < x_hi)) return g(mid, y);
  const double hx = x_hi - x_lo;
  const double zeta = -x_lo / hx;  // seam position inside the cell, in (0, 1)
  const double w = 2.0 * std::min(zeta, 1.0 - zeta);
  const double avg = (gauss4_x(g, x_lo, 0.0, y) + gauss4_x(g, 0.0, x_hi, y)) / hx;
  return (1.0 - w) * g(mid, y) + w * avg;
}

BandedMatrix<double> assemble_stretched(const GrainPotential& w,
                                        const StretchedCellSpec& spec) {
  if (!(spec.t >= 0.0) || !(spec.t <= 1.0))
    throw PreconditionError("assemble_stretched: t must lie in [0, 1]");
  if (w.kind() != GrainPotential::Kind::dislocation)
    throw PreconditionError("assemble_stretched: potential must be a dislocation kind");
  if (std::abs(w.parameter() - spec.t) > 1e-12)
    throw PreconditionError("assemble_stretched: potential t differs from spec t");
  if (spec.n < 1) throw PreconditionError("assemble_stretched: n must be >= 1");
  const long q = positive_reciprocal(spec.h);
  if (q == 0)
    throw PreconditionError("assemble_stretched: 1/h must be a positive integer");

  const double two_n = 2.0 * spec.n;
  Axis1D axx;
  axx.count = static_cast<std::size_t>(2 * spec.n * q);
  axx.spacing = (two_n + spec.t) * spec.h / two_n;
  axx.origin = -spec.n - spec.t + axx.spacing / 2.0;
  axx.wrap = true;

  Axis1D axy;
  axy.count = static_cast<std::size_t>(q);
  axy.spacing = spec.h;
  axy.origin = spec.h / 2.0;
  axy.wrap = true;

  const double half = axx.spacing / 2.0;
  return assemble_on_grid<double>(axx, axy, [&](double x, double y) {
    return seam_blended_sample(w, x - half, x + half, y);
  });
}

void insert_dirichlet_line_x(BandedMatrix<double>& A, const Axis1D& ax,
                             const Axis1D& ay, double xi) {
  if (ax.wrap)
    throw PreconditionError("insert_dirichlet_line_x: x axis must not be periodic");
  const double c = 1.0 / (ax.spacing * ax.spacing);
  const std::size_t ny = ay.count;
  for (std::size_t ix = 0; ix + 1 < ax.count; ++ix) {
    if (!(ax.pos(ix) < xi && xi < ax.pos(ix + 1))) continue;
    for (std::size_t iy = 0; iy < ny; ++iy) {
      const std::size_t p = ix * ny + iy, q = (ix + 1) * ny + iy;
      A.at(q, p) = 0.0;
      A.at(p, p) += c;
      A.at(q, q) += c;
    }
  }
}

double fd_residual(const Axis1D& ax, const Axis1D& ay,
                   const std::function<double(double, double)>& q,
                   const std::function<double(std::size_t, std::size_t)>& u,
                   double energy) {
  check_axis(ax);
  check_axis(ay);
  const double cx = 1.0 / (ax.spacing * ax.spacing);
  const double cy = 1.0 / (ay.spacing * ay.spacing);
  const std::size_t nx = ax.count, ny = ay.count;

  double r2 = 0.0, n2 = 0.0;
  std::vector<double> prev(ny, 0.0), cur(ny), next(ny);
  for (std::size_t iy = 0; iy < ny; ++iy) cur[iy] = u(0, iy);
  for (std::size_t ix = 0; ix < nx; ++ix) {
    if (ix + 1 < nx)
      for (std::size_t iy = 0; iy < ny; ++iy) next[iy] = u(ix + 1, iy);
    else
      std::fill(next.begin(), next.end(), 0.0);
    const double x = ax.pos(ix);
    for (std::size_t iy = 0; iy < ny; ++iy) {
      const double uc = cur[iy];
      const double ul = iy > 0 ? cur[iy - 1] : 0.0;
      const double ur = iy + 1 < ny ? cur[iy + 1] : 0.0;
      const double r = (2.0 * cx + 2.0 * cy + q(x, ay.pos(iy)) - energy) * uc -
                       cx * (prev[iy] + next[iy]) - cy * (ul + ur);
      r2 += r * r;
      n2 += uc * uc;
    }
    std::swap(prev, cur);
    std::swap(cur, next);
  }
  if (!(n2 > 0.0)) throw PreconditionError("fd_residual: zero vector");
  return std::sqrt(r2 / n2);
}

template BandedMatrix<double> assemble_on_grid<double>(
    const Axis1D&, const Axis1D&, const std::function<double(double, double)>&);
template BandedMatrix<cplx> assemble_on_grid<cplx>(
    const Axis1D&, const Axis1D&, const std::function<double(double, double)>&);

}  // namespace gbspec
