#include <algorithm>
#include <cmath>

#include "gbspec/experiments.hpp"
#include "gbspec/parallel.hpp"

namespace gbspec {

FillReport rotation_gap_fill(const PeriodicPotential& v, const SpectralGap& gap,
                             double eps, const std::vector<double>& thetas, int n,
                             const ApproxEigenfunction* apx,
                             const FillOptions& opts) {
  const double width = gap.b - gap.a;
  if (!(eps > 0.0) || !(eps < width / 2.0))
    throw PreconditionError("rotation_gap_fill: eps must lie in (0, (b-a)/2)");
  for (double th : thetas)
    if (!(th >= 0.0) || !(th < 1.5707963267948966))
      throw PreconditionError("rotation_gap_fill: theta must lie in [0, pi/2)");

  const int K = std::max(1, static_cast<int>(std::floor(width / eps + 1e-9)));
  const GridSpec grid = GridSpec::box(n, gap.h);

  struct PerTheta {
    std::vector<long> counts;
    double residual = -1.0;
    bool has_alignment = false;
    FillAlignment alignment;
  };
  std::vector<PerTheta> results(thetas.size());

  parallel_for(thetas.size(), opts.workers, [&](std::size_t w) {
    const double th = thetas[w];
    const RotationAngle angle(th);
    auto R = GrainPotential::rotation(v, angle);
    auto A = assemble(R, grid);
    std::vector<long> cum(static_cast<std::size_t>(K) + 1);
    for (int i = 0; i <= K; ++i) {
      const double sigma = gap.a + width * static_cast<double>(i) / K;
      cum[static_cast<std::size_t>(i)] =
          static_cast<long>(count_below(A, sigma).negatives);
    }
    PerTheta out;
    out.counts.resize(static_cast<std::size_t>(K));
    for (int i = 0; i < K; ++i)
      out.counts[static_cast<std::size_t>(i)] =
          cum[static_cast<std::size_t>(i) + 1] - cum[static_cast<std::size_t>(i)];

    if (apx && th > 0.0) {
      auto al = find_alignment(angle, apx->t, eps, opts.m_max);
      if (al) {
        // The translated support must sit inside the box Q_n.
        const double x_extent = std::max(std::abs(apx->grid_x.origin),
                                         std::abs(apx->grid_x.pos(apx->grid_x.count - 1)));
        const double y_half = std::abs(apx->grid_y.origin) + apx->grid_y.spacing;
        if (x_extent < n && static_cast<double>(al->N) + y_half < n) {
          out.residual = apx->translated_residual(R, al->N);
          out.has_alignment = true;
          out.alignment.theta = th;
          out.alignment.solution = *al;
          out.alignment.residual = out.residual;
          const double s = static_cast<double>(apx->n) / 2.0;
          out.alignment.mismatch = mismatch_bound(
              v, angle, apx->t,
              Rect{-s, s, static_cast<double>(al->N) - s, static_cast<double>(al->N) + s});
        }
      }
    }
    results[w] = std::move(out);
  });

  FillReport report;
  for (std::size_t w = 0; w < thetas.size(); ++w) {
    for (int i = 0; i < K; ++i) {
      FillRow row;
      row.theta = thetas[w];
      row.n = n;
      row.alpha = gap.a + width * static_cast<double>(i) / K;
      row.beta = gap.a + width * static_cast<double>(i + 1) / K;
      row.count = results[w].counts[static_cast<std::size_t>(i)];
      row.residual = results[w].residual;
      report.rows.push_back(row);
    }
    if (results[w].has_alignment) report.alignments.push_back(results[w].alignment);
  }
  return report;
}

ScalingReport count_scaling(const GrainPotential& w, const SpectralGap& gap,
                            double alpha, double beta, const std::vector<int>& n_list,
                            const ScalingOptions& opts) {
  if (n_list.size() < 3)
    throw PreconditionError("count_scaling: n_list needs at least 3 values");
  for (std::size_t i = 1; i < n_list.size(); ++i)
    if (n_list[i] <= n_list[i - 1])
      throw PreconditionError("count_scaling: n_list must increase");
  if (!(alpha < beta)) throw PreconditionError("count_scaling: requires alpha < beta");

  const double theta_col =
      w.kind() == GrainPotential::Kind::rotation ? w.parameter() : 0.0;

  std::vector<ScalingRow> rows(n_list.size());
  parallel_for(n_list.size(), opts.workers, [&](std::size_t i) {
    const int n = n_list[i];
    const GridSpec grid = GridSpec::box(n, gap.h);
    auto A = assemble(w, grid);
    auto pairs = eigen_range(A, alpha, beta, opts.eig);

    long kept = 0;
    if (opts.mass_filter) {
      const Axis1D ax = grid.x_axis();
      const std::size_t ny = grid.y_axis().count;
      const double inner = static_cast<double>(n) / 2.0;
      for (const auto& p : pairs) {
        double total = 0.0, in = 0.0;
        for (std::size_t ix = 0; ix < ax.count; ++ix) {
          double col = 0.0;
          for (std::size_t iy = 0; iy < ny; ++iy) {
            const double u = p.vector[ix * ny + iy];
            col += u * u;
          }
          total += col;
          if (std::abs(ax.pos(ix)) < inner) in += col;
        }
        if (in >= 0.5 * total) ++kept;
      }
    } else {
      kept = static_cast<long>(pairs.size());
    }

    ScalingRow row;
    row.n = n;
    row.theta = theta_col;
    row.alpha = alpha;
    row.beta = beta;
    row.count = kept;
    row.count_over_n = static_cast<double>(kept) / n;
    row.count_over_nlogn = static_cast<double>(kept) / (n * std::log(static_cast<double>(n)));
    rows[i] = row;
  });

  ScalingReport report;
  report.rows = rows;
  double sn = 0, sc = 0, snn = 0, snc = 0;
  const auto count_d = [&](std::size_t i) { return static_cast<double>(rows[i].count); };
  for (std::size_t i = 0; i < rows.size(); ++i) {
    sn += rows[i].n;
    sc += count_d(i);
    snn += static_cast<double>(rows[i].n) * rows[i].n;
    snc += rows[i].n * count_d(i);
  }
  const double m = static_cast<double>(rows.size());
  report.slope = (m * snc - sn * sc) / (m * snn - sn * sn);
  return report;
}

LocalizationProfile localization_profile(const EigenPair& pair,
                                         const GridSpec& box_grid,
                                         const SpectralGap& gap) {
  const double margin = (gap.b - gap.a) / 10.0;
  if (!(pair.value > gap.a + margin) || !(pair.value < gap.b - margin))
    throw PreconditionError(
        "localization_profile: eigenvalue must sit inside the gap, away from the edges by (b-a)/10");

  const Axis1D ax = box_grid.x_axis();
  const std::size_t ny = box_grid.y_axis().count;
  if (pair.vector.size() != ax.count * ny)
    throw PreconditionError("localization_profile: vector does not match the grid");

  // Mass per |x| column, then tail sums.
  double total = 0.0;
  std::vector<double> colmass(ax.count, 0.0);
  for (std::size_t ix = 0; ix < ax.count; ++ix) {
    double col = 0.0;
    for (std::size_t iy = 0; iy < ny; ++iy) {
      const double u = pair.vector[ix * ny + iy];
      col += u * u;
    }
    colmass[ix] = col;
    total += col;
  }

  LocalizationProfile prof;
  prof.energy = pair.value;
  const int n = box_grid.n;
  for (int w = 1; w <= n / 2; ++w) {
    double beyond = 0.0;
    for (std::size_t ix = 0; ix < ax.count; ++ix)
      if (std::abs(ax.pos(ix)) > static_cast<double>(w)) beyond += colmass[ix];
    prof.w_grid.push_back(static_cast<double>(w));
    prof.mass_beyond.push_back(beyond / total);
  }

  // Least-squares slope of log M(w) over the resolvable entries.
  double sw = 0, sl = 0, sww = 0, swl = 0;
  int cnt = 0;
  for (std::size_t i = 0; i < prof.w_grid.size(); ++i) {
    if (prof.mass_beyond[i] < 1e-15) break;
    const double lw = std::log(prof.mass_beyond[i]);
    sw += prof.w_grid[i];
    sl += lw;
    sww += prof.w_grid[i] * prof.w_grid[i];
    swl += prof.w_grid[i] * lw;
    ++cnt;
  }
  prof.alpha_hat = cnt >= 2 ? (cnt * swl - sw * sl) / (cnt * sww - sw * sw) : 0.0;

  const int wq = std::max(1, n / 4);
  prof.mass_quarter = prof.mass_beyond[static_cast<std::size_t>(
      std::min<std::size_t>(prof.mass_beyond.size() - 1, static_cast<std::size_t>(wq - 1)))];
  return prof;
}

}  // namespace gbspec
