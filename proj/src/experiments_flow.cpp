#include <algorithm>
#include <cmath>
#include <map>

#include "gbspec/experiments.hpp"
#include "gbspec/numutil.hpp"
#include "gbspec/parallel.hpp"

namespace gbspec {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

long reciprocal_int(double h) {
  const double inv = 1.0 / h;
  const double r = std::round(inv);
  if (!(h > 0.0) || std::abs(inv - r) > 1e-9 * inv) return 0;
  return static_cast<long>(r);
}

BandedMatrix<double> strip_operator(const PeriodicPotential& v, int n, double h,
                                    double t) {
  auto w = GrainPotential::dislocation(v, t);
  StretchedCellSpec spec;
  spec.t = t;
  spec.n = n;
  spec.h = h;
  return assemble_stretched(w, spec);
}

// Values-only extraction by inertia slicing: gap-edge branches that a
// shift-invert sweep struggles with are located to value_tol regardless.
std::vector<double> gap_values(const BandedMatrix<double>& A, const SpectralGap& gap,
                               double value_tol) {
  auto sliced = slice_eigenvalues(A, gap.a, gap.b, value_tol);
  std::vector<double> vals;
  for (const auto& s : sliced)
    for (long c = 0; c < s.multiplicity; ++c) vals.push_back(s.value);
  return vals;
}

// Greedy nearest-value matching between the previous branch ends and the new
// value list; unmatched values open new branches.
void extend_branches(std::vector<std::pair<int, double>>& active, int& next_id,
                     const std::vector<double>& vals, double match_window,
                     double t, std::vector<FlowBranchPoint>& out) {
  std::vector<int> assignment(vals.size(), -1);
  std::vector<bool> branch_used(active.size(), false);
  for (;;) {
    double best = match_window;
    long bi = -1, bj = -1;
    for (std::size_t i = 0; i < vals.size(); ++i) {
      if (assignment[i] >= 0) continue;
      for (std::size_t j = 0; j < active.size(); ++j) {
        if (branch_used[j]) continue;
        const double d = std::abs(vals[i] - active[j].second);
        if (d < best) {
          best = d;
          bi = static_cast<long>(i);
          bj = static_cast<long>(j);
        }
      }
    }
    if (bi < 0) break;
    assignment[static_cast<std::size_t>(bi)] = active[static_cast<std::size_t>(bj)].first;
    branch_used[static_cast<std::size_t>(bj)] = true;
  }
  std::vector<std::pair<int, double>> next_active;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    int id = assignment[i];
    if (id < 0) id = next_id++;
    next_active.push_back({id, vals[i]});
    out.push_back({t, id, vals[i]});
  }
  active = std::move(next_active);
}

}  // namespace

FlowRecord dislocation_flow(const PeriodicPotential& v, const SpectralGap& gap,
                            int n, const FlowOptions& opts) {
  if (n < 1) throw PreconditionError("dislocation_flow: n must be >= 1");
  if (opts.t_steps < 16) throw PreconditionError("dislocation_flow: t_steps must be >= 16");
  if (!(gap.a < gap.b)) throw PreconditionError("dislocation_flow: invalid gap");

  const double h = gap.h;
  const long q = reciprocal_int(h);
  if (q == 0) throw PreconditionError("dislocation_flow: 1/h must be a positive integer");
  if ((2 * n * q) % (2 * n + 1) != 0)
    throw PreconditionError(
        "dislocation_flow: mesh incommensurate with the t=1 cell; choose h = 1/(q(2n+1))");

  const int m = gap.band_index;
  const double width = gap.b - gap.a;

  // Certify the gap at both endpoint meshes.  At t = 0 the operator is the
  // plain h-mesh periodic operator; at t = 1 it is the periodic operator
  // with x spacing h1 = (2n+1)h/(2n) and y spacing h.  Either way its
  // spectrum is the exact union of x-fibers at ky = 0, which gives the
  // 2nm / (2n+1)m endpoint law.
  {
    auto certify = [&](std::size_t nodes_per_period, double hx, int periods) {
      Axis1D fx;
      fx.count = nodes_per_period;
      fx.spacing = hx;
      fx.origin = hx / 2.0;
      fx.wrap = true;
      Axis1D fy;
      fy.count = static_cast<std::size_t>(q);
      fy.spacing = h;
      fy.origin = h / 2.0;
      fy.wrap = true;
      // The band hulls that define (a, b) may be attained on this very
      // fiber family, so certify with equality slack.
      const double tol = 1e-7 * (1.0 + std::abs(gap.b));
      for (int j = 0; j <= (periods + 1) / 2; ++j) {  // k and 2pi-k: equal spectra
        fx.phase = kTwoPi * j / periods;
        auto F = assemble_on_grid<cplx>(fx, fy,
                                        [&](double x, double y) { return v(x, y); });
        auto vals = lowest_eigenvalues(F, static_cast<std::size_t>(m) + 1);
        const bool ok = vals[static_cast<std::size_t>(m) - 1] <= gap.a + tol &&
                        vals[static_cast<std::size_t>(m)] >= gap.b - tol;
        if (!ok)
          throw NumericError(
              "dislocation_flow: gap not certified at an endpoint mesh (mesh too "
              "coarse or gap misidentified)");
      }
    };
    certify(static_cast<std::size_t>(q), h, 2 * n);
    certify(static_cast<std::size_t>((2 * n * q) / (2 * n + 1)),
            (2.0 * n + 1.0) * h / (2.0 * n), 2 * n + 1);
  }

  FlowRecord rec;
  rec.n = n;
  rec.h = h;
  rec.gap = gap;
  rec.m = m;

  // Sample grid in t, refined where a branch moves more than a tenth of the
  // gap width between neighbouring samples.
  std::vector<double> ts(static_cast<std::size_t>(opts.t_steps));
  for (int i = 0; i < opts.t_steps; ++i)
    ts[static_cast<std::size_t>(i)] = static_cast<double>(i) / (opts.t_steps - 1);

  std::map<double, std::pair<std::vector<double>, long>> samples;
  const double record_tol = width * 1e-4;
  auto sample_at = [&](double t) {
    auto A = strip_operator(v, n, h, t);
    auto vals = gap_values(A, gap, record_tol);
    const long below = static_cast<long>(count_below(A, gap.a).negatives);
    return std::make_pair(vals, below);
  };

  {
    std::vector<std::pair<std::vector<double>, long>> first(ts.size());
    parallel_for(ts.size(), opts.workers,
                 [&](std::size_t i) { first[i] = sample_at(ts[i]); });
    for (std::size_t i = 0; i < ts.size(); ++i) samples[ts[i]] = first[i];
  }

  for (int depth = 0; depth < opts.max_refine_depth; ++depth) {
    std::vector<double> inserts;
    auto it = samples.begin();
    auto prev = it++;
    for (; it != samples.end(); prev = it++) {
      const auto& v1 = prev->second.first;
      const auto& v2 = it->second.first;
      bool need = v1.size() != v2.size();
      if (!need)
        for (std::size_t i = 0; i < v1.size(); ++i)
          if (std::abs(v1[i] - v2[i]) > 0.1 * width) need = true;
      if (need && it->first - prev->first > 1e-4)
        inserts.push_back(0.5 * (prev->first + it->first));
    }
    if (inserts.empty()) break;
    std::vector<std::pair<std::vector<double>, long>> res(inserts.size());
    parallel_for(inserts.size(), opts.workers,
                 [&](std::size_t i) { res[i] = sample_at(inserts[i]); });
    for (std::size_t i = 0; i < inserts.size(); ++i) samples[inserts[i]] = res[i];
  }

  for (const auto& kv : samples) {
    rec.t_grid.push_back(kv.first);
    rec.count_below_a.push_back(kv.second.second);
  }

  // Endpoint count law: 2nm at t=0, (2n+1)m at t=1.
  const long expect0 = 2l * n * m, expect1 = (2l * n + 1) * m;
  if (rec.count_below_a.front() != expect0 || rec.count_below_a.back() != expect1)
    throw NumericError("dislocation_flow: endpoint count law violated (got " +
                       std::to_string(rec.count_below_a.front()) + "/" +
                       std::to_string(rec.count_below_a.back()) + ", expected " +
                       std::to_string(expect0) + "/" + std::to_string(expect1) +
                       "); mesh too coarse or gap misidentified");

  // Branch record (display/refinement data; crossings use inertia counts).
  {
    std::vector<std::pair<int, double>> active;
    int next_id = 0;
    for (const auto& kv : samples)
      extend_branches(active, next_id, kv.second.first, 0.25 * width, kv.first,
                      rec.branch_points);
  }

  // Crossings per requested energy, by bisecting the integer count
  // N_E(t) = #{eigenvalues below E}.
  const double tol_abs = opts.crossing_tol_rel * width;
  for (double E : opts.energies) {
    if (!(E > gap.a) || !(E < gap.b))
      throw PreconditionError("dislocation_flow: requested energy outside the gap");
    auto count_E = [&](double t) {
      auto A = strip_operator(v, n, h, t);
      return static_cast<long>(count_below(A, E).negatives);
    };
    std::vector<long> ce(rec.t_grid.size());
    parallel_for(rec.t_grid.size(), opts.workers,
                 [&](std::size_t i) { ce[i] = count_E(rec.t_grid[i]); });

    bool found = false;
    for (std::size_t i = 0; i + 1 < rec.t_grid.size() && !found; ++i) {
      if (ce[i] == ce[i + 1]) continue;
      double lo = rec.t_grid[i], hi = rec.t_grid[i + 1];
      long clo = ce[i];
      for (int it = 0; it < 64 && hi - lo > 1e-14; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (count_E(mid) != clo)
          hi = mid;
        else
          lo = mid;
      }
      const double t_star = 0.5 * (lo + hi);
      auto A = strip_operator(v, n, h, t_star);
      // precise local slice around E confirms an eigenvalue within tol_abs
      auto nearby = slice_eigenvalues(A, E - 8.0 * tol_abs, E + 8.0 * tol_abs,
                                      tol_abs / 16.0);
      double best = 1e300, lam_at = 0.0;
      for (const auto& s : nearby)
        if (std::abs(s.value - E) < best) {
          best = std::abs(s.value - E);
          lam_at = s.value;
        }
      if (best <= tol_abs) {
        rec.crossings.push_back({E, t_star, lam_at});
        found = true;
      }
    }
    if (!found)
      throw NumericError("dislocation_flow: no crossing located for E = " +
                         std::to_string(E));
  }

  return rec;
}

double ApproxEigenfunction::value(std::size_t ix, std::size_t iy) const {
  const double x = grid_x.pos(ix);
  const double y = grid_y.pos(iy);
  const double half = 0.5 * static_cast<double>(n);
  const double phi = plateau_cutoff(x, 0.5 * half, half);
  if (phi == 0.0) return 0.0;
  const double psi = plateau_cutoff(y, 0.5 * half, half);
  if (psi == 0.0) return 0.0;
  const long sx = static_cast<long>(ix) + ix_offset;
  const long sy = (static_cast<long>(iy) + iy_mod_offset) % static_cast<long>(strip_ny);
  return norm_scale * phi * psi *
         strip_vector[static_cast<std::size_t>(sx) * strip_ny + static_cast<std::size_t>(sy)];
}

std::vector<double> ApproxEigenfunction::materialize() const {
  std::vector<double> out(grid_x.count * grid_y.count);
  for (std::size_t ix = 0; ix < grid_x.count; ++ix)
    for (std::size_t iy = 0; iy < grid_y.count; ++iy)
      out[ix * grid_y.count + iy] = value(ix, iy);
  return out;
}

double ApproxEigenfunction::translated_residual(const GrainPotential& rotation_potential,
                                                std::int64_t N) const {
  Axis1D ys = grid_y;
  ys.origin += static_cast<double>(N);
  const double half = grid_x.spacing / 2.0;
  return fd_residual(
      grid_x, ys,
      [&](double x, double y) {
        return seam_blended_sample(rotation_potential, x - half, x + half, y);
      },
      [&](std::size_t ix, std::size_t iy) { return value(ix, iy); }, energy);
}

ApproxEigenfunction build_approximate_eigenfunction(const PeriodicPotential& v,
                                                    const FlowRecord& flow,
                                                    double energy, int n,
                                                    const EigOptions& opts) {
  const FlowCrossing* seed = nullptr;
  for (const auto& c : flow.crossings)
    if (std::abs(c.energy - energy) <= 1e-9 * (flow.gap.b - flow.gap.a))
      seed = &c;
  if (!seed)
    throw PreconditionError("build_approximate_eigenfunction: E has no crossing in the flow record");
  if (n < 2) throw PreconditionError("build_approximate_eigenfunction: n must be >= 2");

  const double h = flow.h;
  const long q = reciprocal_int(h);
  const SpectralGap& gap = flow.gap;
  const double width = gap.b - gap.a;

  // Re-refine the crossing at this n by bisecting the below-E count.
  auto count_E = [&](double t) {
    auto A = strip_operator(v, n, h, t);
    return static_cast<long>(count_below(A, energy).negatives);
  };
  double delta = std::max(2.0 / (flow.t_grid.size() > 1
                                     ? static_cast<double>(flow.t_grid.size() - 1)
                                     : 16.0),
                          0.02);
  double lo = 0.0, hi = 0.0;
  bool bracketed = false;
  for (; delta <= 0.31; delta *= 2.0) {
    lo = std::max(seed->t_E - delta, 1e-6);
    hi = std::min(seed->t_E + delta, 1.0 - 1e-6);
    if (count_E(lo) != count_E(hi)) {
      bracketed = true;
      break;
    }
  }
  if (!bracketed)
    throw NumericError("build_approximate_eigenfunction: crossing did not persist at n = " +
                       std::to_string(n));
  long clo = count_E(lo);
  for (int it = 0; it < 80 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (count_E(mid) != clo)
      hi = mid;
    else
      lo = mid;
  }
  const double t_star = 0.5 * (lo + hi);

  auto A = strip_operator(v, n, h, t_star);
  auto pairs = eigenpairs_near(A, energy, 1, opts);
  const auto& pair = pairs.front();
  if (std::abs(pair.value - energy) > 1e-4 * width)
    throw NumericError("build_approximate_eigenfunction: refined crossing eigenvalue drifted");

  ApproxEigenfunction u;
  u.n = n;
  u.energy = energy;
  u.t = t_star;
  u.h = h;
  u.strip_residual = pair.residual;

  // Unfold the strip eigenvector to natural (ix, iy) order.
  const std::size_t nx = static_cast<std::size_t>(2 * n * q);
  const std::size_t ny = static_cast<std::size_t>(q);
  u.strip_nx = nx;
  u.strip_ny = ny;
  u.hx = (2.0 * n + t_star) * h / (2.0 * n);
  u.strip_x0 = -n - t_star + u.hx / 2.0;
  u.strip_vector.assign(nx * ny, 0.0);
  auto fold = [](std::size_t i, std::size_t count) {
    return (2 * i < count) ? 2 * i : 2 * (count - 1 - i) + 1;
  };
  for (std::size_t ix = 0; ix < nx; ++ix)
    for (std::size_t iy = 0; iy < ny; ++iy)
      u.strip_vector[ix * ny + iy] = pair.vector[fold(ix, nx) * ny + fold(iy, ny)];

  // Canonical grid: x on the stretched strip mesh restricted to |x| <= X0,
  // y on the h mesh over [-Y0, Y0], X0/Y0 integers covering the support
  // [-n/2, n/2] plus a margin.
  const auto x0_target = static_cast<double>(n) / 2.0 + 1.0;
  long ix_lo = 0, ix_hi = static_cast<long>(nx) - 1;
  while (ix_lo < static_cast<long>(nx) &&
         u.strip_x0 + u.hx * static_cast<double>(ix_lo) < -x0_target)
    ++ix_lo;
  while (ix_hi >= 0 && u.strip_x0 + u.hx * static_cast<double>(ix_hi) > x0_target)
    --ix_hi;
  if (ix_lo >= ix_hi)
    throw NumericError("build_approximate_eigenfunction: empty canonical grid");
  u.ix_offset = ix_lo;
  u.grid_x.count = static_cast<std::size_t>(ix_hi - ix_lo + 1);
  u.grid_x.spacing = u.hx;
  u.grid_x.origin = u.strip_x0 + u.hx * static_cast<double>(ix_lo);

  const long y0 = static_cast<long>(std::ceil(static_cast<double>(n) / 2.0 + 1.0));
  u.grid_y.count = static_cast<std::size_t>(2 * y0 * q);
  u.grid_y.spacing = h;
  u.grid_y.origin = -static_cast<double>(y0) + h / 2.0;
  u.iy_mod_offset = 0;  // y0 is an integer, so the mesh phase matches the strip

  // Normalize in the cell-area-weighted l2 norm.
  u.norm_scale = 1.0;
  double s2 = 0.0;
  for (std::size_t ix = 0; ix < u.grid_x.count; ++ix)
    for (std::size_t iy = 0; iy < u.grid_y.count; ++iy) {
      const double val = u.value(ix, iy);
      s2 += val * val;
    }
  s2 *= u.hx * h;
  if (!(s2 > 0.0))
    throw NumericError("build_approximate_eigenfunction: cutoff annihilated the eigenvector");
  u.norm_scale = 1.0 / std::sqrt(s2);

  auto w_t = GrainPotential::dislocation(v, t_star);
  const double half = u.hx / 2.0;
  u.residual = fd_residual(
      u.grid_x, u.grid_y,
      [&](double x, double y) { return seam_blended_sample(w_t, x - half, x + half, y); },
      [&](std::size_t ix, std::size_t iy) { return u.value(ix, iy); }, energy);
  if (u.residual > width / 2.0)
    throw NumericError("build_approximate_eigenfunction: residual " +
                       std::to_string(u.residual) + " exceeds the gap half-width at n = " +
                       std::to_string(n));
  return u;
}

}  // namespace gbspec
