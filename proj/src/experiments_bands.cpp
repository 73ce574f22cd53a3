#include <algorithm>
#include <cmath>

#include "gbspec/experiments.hpp"
#include "gbspec/parallel.hpp"

namespace gbspec {

namespace {
constexpr double kTwoPi = 6.28318530717958647692;
}

BandSweep band_sweep(const PeriodicPotential& v, double h, int momentum_grid,
                     int nbands, int workers) {
  if (momentum_grid < 8)
    throw PreconditionError("band_sweep: momentum_grid must be >= 8");
  if (nbands < 2) throw PreconditionError("band_sweep: nbands must be >= 2");

  const int M = momentum_grid;
  const std::size_t nk = static_cast<std::size_t>(M) * static_cast<std::size_t>(M);
  std::vector<std::vector<double>> fiber_vals(nk);

  // Spectra at k and 2pi - k coincide (complex conjugation), so compute one
  // representative per pair.
  std::vector<long> partner(nk, -1);
  std::vector<std::size_t> jobs;
  for (int i = 0; i < M; ++i) {
    for (int j = 0; j < M; ++j) {
      const std::size_t id = static_cast<std::size_t>(i) * M + j;
      const int ci = (M - i) % M, cj = (M - j) % M;
      const std::size_t cid = static_cast<std::size_t>(ci) * M + cj;
      if (cid < id) {
        partner[id] = static_cast<long>(cid);
      } else {
        jobs.push_back(id);
      }
    }
  }

  parallel_for(jobs.size(), workers, [&](std::size_t w) {
    const std::size_t id = jobs[w];
    const int i = static_cast<int>(id) / M, j = static_cast<int>(id) % M;
    const double kx = kTwoPi * i / M, ky = kTwoPi * j / M;
    auto A = bloch_fiber(v, kx, ky, h);
    fiber_vals[id] = lowest_eigenvalues(A, static_cast<std::size_t>(nbands));
  });
  for (std::size_t id = 0; id < nk; ++id)
    if (partner[id] >= 0) fiber_vals[id] = fiber_vals[static_cast<std::size_t>(partner[id])];

  BandSweep sweep;
  sweep.h = h;
  sweep.momentum_grid = M;
  sweep.nbands = nbands;
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) {
      const std::size_t id = static_cast<std::size_t>(i) * M + j;
      for (int b = 0; b < nbands; ++b)
        sweep.rows.push_back({kTwoPi * i / M, kTwoPi * j / M, b + 1,
                              fiber_vals[id][static_cast<std::size_t>(b)]});
    }

  // Band hulls over the momentum grid; first open interval between
  // consecutive hulls is the gap.
  std::vector<double> lo(static_cast<std::size_t>(nbands), 1e300);
  std::vector<double> hi(static_cast<std::size_t>(nbands), -1e300);
  for (const auto& row : sweep.rows) {
    auto b = static_cast<std::size_t>(row.band - 1);
    lo[b] = std::min(lo[b], row.lambda);
    hi[b] = std::max(hi[b], row.lambda);
  }
  for (int b = 0; b + 1 < nbands; ++b) {
    const double a = hi[static_cast<std::size_t>(b)];
    const double bb = lo[static_cast<std::size_t>(b) + 1];
    if (bb > a + 1e-9) {
      SpectralGap g;
      g.a = a;
      g.b = bb;
      g.band_index = b + 1;
      g.h = h;
      g.momentum_grid = M;
      sweep.gap = g;
      break;
    }
  }
  return sweep;
}

std::optional<SpectralGap> find_gap(const PeriodicPotential& v, double h,
                                    int momentum_grid, int nbands, int workers) {
  return band_sweep(v, h, momentum_grid, nbands, workers).gap;
}

}  // namespace gbspec
