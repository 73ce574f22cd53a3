#include <algorithm>
#include <cmath>

#include "gbspec/experiments.hpp"
#include "gbspec/numutil.hpp"

namespace gbspec {

namespace {

double cross(double ax, double ay, double bx, double by) { return ax * by - ay * bx; }

bool on_segment(double px, double py, double qx, double qy, double rx, double ry) {
  return std::min(px, rx) - 1e-12 <= qx && qx <= std::max(px, rx) + 1e-12 &&
         std::min(py, ry) - 1e-12 <= qy && qy <= std::max(py, ry) + 1e-12;
}

// Inclusive 2D segment intersection (touching counts as crossing).
bool segments_intersect(double ax, double ay, double bx, double by, double cx,
                        double cy, double dx, double dy) {
  const double d1 = cross(dx - cx, dy - cy, ax - cx, ay - cy);
  const double d2 = cross(dx - cx, dy - cy, bx - cx, by - cy);
  const double d3 = cross(bx - ax, by - ay, cx - ax, cy - ay);
  const double d4 = cross(bx - ax, by - ay, dx - ax, dy - ay);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  const double tol = 1e-12;
  if (std::abs(d1) <= tol && on_segment(cx, cy, ax, ay, dx, dy)) return true;
  if (std::abs(d2) <= tol && on_segment(cx, cy, bx, by, dx, dy)) return true;
  if (std::abs(d3) <= tol && on_segment(ax, ay, cx, cy, bx, by)) return true;
  if (std::abs(d4) <= tol && on_segment(ax, ay, dx, dy, bx, by)) return true;
  return false;
}

// Clip segment p0-p1 to the halfplane x <= bound (or x >= bound).
bool clip_halfplane(std::array<double, 4>& seg, double bound, bool keep_below) {
  double x0 = seg[0], y0 = seg[1], x1 = seg[2], y1 = seg[3];
  auto in = [&](double x) { return keep_below ? x <= bound : x >= bound; };
  if (in(x0) && in(x1)) return true;
  if (!in(x0) && !in(x1)) return false;
  const double s = (bound - x0) / (x1 - x0);
  const double yi = y0 + s * (y1 - y0);
  if (in(x0)) {
    seg = {x0, y0, bound, yi};
  } else {
    seg = {bound, yi, x1, y1};
  }
  return true;
}

}  // namespace

DecoupleGeometry muffin_decouple_geometry(double r, const RotationAngle& theta,
                                          int box_half, double h) {
  if (!(r > 0.0) || !(r < 0.5))
    throw PreconditionError("muffin_decouple_geometry: r must lie in (0, 1/2)");
  DecoupleGeometry geom;
  geom.box_half = box_half;
  geom.h = h;

  const double c = theta.cos(), s = theta.sin();
  const double r2 = r * r;
  geom.barrier = [c, s, r2](double x, double y) {
    double xr = x, yr = y;
    if (x < 0.0) {  // rotated lattice on the left
      xr = c * x + s * y;
      yr = -s * x + c * y;
    }
    const double dx = frac(xr) - 0.5, dy = frac(yr) - 0.5;
    return dx * dx + dy * dy < r2 ? 0.0 : 1.0;
  };

  const double rho = (0.5 - r) / 2.0;
  const auto K = static_cast<double>(box_half);
  const long reach = 3 * box_half;

  // Straight grid lines in { x >= rho }.
  for (long m = 1; m < box_half; ++m)
    geom.cuts.push_back({static_cast<double>(m), -K, static_cast<double>(m), K});
  for (long m = -box_half + 1; m < box_half; ++m)
    geom.cuts.push_back({rho, static_cast<double>(m), K, static_cast<double>(m)});

  // Rotated grid lines in { x <= rho }.
  for (long m = -reach; m <= reach; ++m) {
    // vertical line x = m rotated by theta: M_theta(m, tau), tau in [-reach, reach]
    std::array<double, 4> seg = {
        c * static_cast<double>(m) + s * static_cast<double>(reach),
        s * static_cast<double>(m) - c * static_cast<double>(reach),
        c * static_cast<double>(m) - s * static_cast<double>(reach),
        s * static_cast<double>(m) + c * static_cast<double>(reach)};
    if (clip_halfplane(seg, rho, true)) geom.cuts.push_back(seg);
    // horizontal line y = m rotated by theta
    std::array<double, 4> seg2 = {
        -c * static_cast<double>(reach) - s * m,
        -s * static_cast<double>(reach) + c * m,
        c * static_cast<double>(reach) - s * m,
        s * static_cast<double>(reach) + c * m};
    if (clip_halfplane(seg2, rho, true)) geom.cuts.push_back(seg2);
  }

  // The dividing vertical line x = rho itself.
  geom.cuts.push_back({rho, -K, rho, K});
  return geom;
}

std::vector<std::pair<double, double>> decoupling_check(
    const DecoupleGeometry& geom, const std::vector<double>& heights) {
  if (heights.empty()) throw PreconditionError("decoupling_check: no heights");
  for (std::size_t i = 1; i < heights.size(); ++i)
    if (!(heights[i] > heights[i - 1]))
      throw PreconditionError("decoupling_check: heights must increase");
  if (!geom.barrier) throw PreconditionError("decoupling_check: missing barrier mask");

  const GridSpec grid = GridSpec::box(geom.box_half, geom.h);
  const Axis1D ax = grid.x_axis(), ay = grid.y_axis();
  const std::size_t nx = ax.count, ny = ay.count;
  const std::size_t dim = nx * ny;
  const double cc = 1.0 / (geom.h * geom.h);
  auto idx = [&](std::size_t i, std::size_t j) { return i * ny + j; };

  // Potential mask and severed links.
  std::vector<double> chi(dim);
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j)
      chi[idx(i, j)] = geom.barrier(ax.pos(i), ay.pos(j)) > 0.5 ? 1.0 : 0.0;

  auto link_cut = [&](double x0, double y0, double x1, double y1) {
    for (const auto& seg : geom.cuts)
      if (segments_intersect(x0, y0, x1, y1, seg[0], seg[1], seg[2], seg[3]))
        return true;
    return false;
  };

  std::vector<std::pair<std::size_t, std::size_t>> kept_links, severed;
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      if (i + 1 < nx) {
        const bool cut = link_cut(ax.pos(i), ay.pos(j), ax.pos(i + 1), ay.pos(j));
        (cut ? severed : kept_links).push_back({idx(i, j), idx(i + 1, j)});
      }
      if (j + 1 < ny) {
        const bool cut = link_cut(ax.pos(i), ay.pos(j), ax.pos(i), ay.pos(j + 1));
        (cut ? severed : kept_links).push_back({idx(i, j), idx(i, j + 1)});
      }
    }
  }

  // dist(S, boundary of U) > 0 on the grid: every severed link must join two
  // barrier nodes.
  for (const auto& [p, q] : severed)
    if (chi[p] != 1.0 || chi[q] != 1.0)
      throw PreconditionError(
          "decoupling_check: cut set S leaves the barrier region (dist(S, dU) <= 0 on the grid)");

  std::vector<std::pair<double, double>> out;
  for (double height : heights) {
    BandedMatrix<double> full(dim, ny);
    BandedMatrix<double> cutm(dim, ny);
    for (std::size_t p = 0; p < dim; ++p) {
      const double d = 4.0 * cc + height * chi[p];
      full.add_link(p, p, d);
      cutm.add_link(p, p, d);
    }
    for (const auto& [p, q] : kept_links) {
      full.add_link(q, p, -cc);
      cutm.add_link(q, p, -cc);
    }
    for (const auto& [p, q] : severed) {
      full.add_link(q, p, -cc);
      // Dirichlet wall at the link midpoint: the cut operator compensates
      // the removed coupling on both diagonals (a PSD change).
      cutm.add_link(p, p, cc);
      cutm.add_link(q, q, cc);
    }

    BandedLDLT<double> fa(full, -1.0);  // (H + 1)
    BandedLDLT<double> fb(cutm, -1.0);

    std::vector<double> x(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
    double norm_est = 0.0;
    for (int it = 0; it < 50; ++it) {
      std::vector<double> ya = x, yb = x;
      fa.solve_in_place(ya);
      fb.solve_in_place(yb);
      double nn = 0.0;
      for (std::size_t p = 0; p < dim; ++p) {
        ya[p] -= yb[p];
        nn += ya[p] * ya[p];
      }
      nn = std::sqrt(nn);
      if (nn < 1e-300) {
        norm_est = 0.0;
        break;
      }
      const double prev = norm_est;
      norm_est = nn;
      for (std::size_t p = 0; p < dim; ++p) x[p] = ya[p] / nn;
      if (it > 2 && std::abs(norm_est - prev) <= 1e-6 * norm_est) break;
    }
    out.push_back({height, norm_est});
  }
  return out;
}

}  // namespace gbspec
