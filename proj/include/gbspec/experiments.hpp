#pragma once

#include <array>
#include <optional>
#include <vector>

#include "gbspec/alignment.hpp"
#include "gbspec/discretize.hpp"
#include "gbspec/eigensolve.hpp"
#include "gbspec/potentials.hpp"

namespace gbspec {

// An interval (a, b) certified free of fiber eigenvalues over the sampled
// momentum grid at mesh h.  band_index = number of bands entirely below the
// gap, i.e. the per-period eigenvalue count m.
struct SpectralGap {
  double a = 0.0;
  double b = 0.0;
  int band_index = 0;
  double h = 0.0;
  int momentum_grid = 0;
};

struct BandSweepRow {
  double kx = 0.0, ky = 0.0;
  int band = 0;  // 1-based
  double lambda = 0.0;
};

struct BandSweep {
  std::vector<BandSweepRow> rows;
  std::optional<SpectralGap> gap;  // first open gap between band hulls
  double h = 0.0;
  int momentum_grid = 0;
  int nbands = 0;
};

BandSweep band_sweep(const PeriodicPotential& v, double h, int momentum_grid,
                     int nbands = 8, int workers = 1);
std::optional<SpectralGap> find_gap(const PeriodicPotential& v, double h,
                                    int momentum_grid, int nbands = 8,
                                    int workers = 1);

// ---------------------------------------------------------------------------
// Dislocation spectral flow on the periodic strip.

struct FlowCrossing {
  double energy = 0.0;
  double t_E = 0.0;
  double lambda_at_tE = 0.0;
};

struct FlowBranchPoint {
  double t = 0.0;
  int branch = 0;
  double lambda = 0.0;
};

struct FlowRecord {
  int n = 0;
  double h = 0.0;
  SpectralGap gap;
  int m = 0;                          // per-period count below the gap
  std::vector<double> t_grid;         // after refinement, ascending
  std::vector<long> count_below_a;    // parallel to t_grid
  std::vector<FlowBranchPoint> branch_points;  // sorted by (t, branch)
  std::vector<FlowCrossing> crossings;
};

struct FlowOptions {
  int t_steps = 33;
  std::vector<double> energies;        // crossings requested at these E
  double crossing_tol_rel = 1e-6;      // |lambda(t_E) - E| <= rel * (b - a)
  int max_refine_depth = 6;            // branch-continuity step refinement
  EigOptions eig{1e-10, 4000};
  int workers = 1;
};

// Requires a mesh commensurate with both cell endpoints: 1/h and
// 2n/((2n+1)h) must be integers (i.e. h = 1/(q(2n+1))).  Verifies the
// endpoint count law N(t=0) = 2nm, N(t=1) = (2n+1)m exactly.
FlowRecord dislocation_flow(const PeriodicPotential& v, const SpectralGap& gap,
                            int n, const FlowOptions& opts);

// ---------------------------------------------------------------------------
// Compactly supported approximate eigenfunctions (strip eigenvector, smooth
// x-cutoff, periodic y-extension, y-cutoff).

class ApproxEigenfunction {
 public:
  int n = 0;            // support scale: vanishes outside [-n/2, n/2]^2
  double energy = 0.0;
  double t = 0.0;       // refined crossing parameter at this n
  double h = 0.0;       // y mesh width; x mesh width is h (2n+t)/(2n)
  double hx = 0.0;
  double residual = 0.0;        // ||(D_t - E) u|| / ||u|| on the half-width-n box
  double strip_residual = 0.0;  // eigensolver residual of the strip pair

  // Canonical evaluation grid: covers the support plus a one-unit margin,
  // x nodes on the stretched strip mesh, y nodes on the h mesh.
  Axis1D grid_x, grid_y;
  double value(std::size_t ix, std::size_t iy) const;

  // Dense values on the canonical grid, row-major (ix * ny + iy).
  std::vector<double> materialize() const;

  // ||(R_theta - E) u(., . - N)||: residual of the y-translated function
  // against the rotation operator, evaluated exactly on the aligned product
  // grid (valid as long as the translated support sits inside the box).
  double translated_residual(const GrainPotential& rotation_potential,
                             std::int64_t N) const;

  std::vector<double> strip_vector;  // natural (ix * ny + iy) order, unit norm
  std::size_t strip_nx = 0, strip_ny = 0;
  double strip_x0 = 0.0;  // x-position of strip node 0
  long ix_offset = 0;     // canonical ix -> strip ix + ix_offset
  long iy_mod_offset = 0; // canonical iy -> strip ((iy + off) mod ny)
  double norm_scale = 1.0;
};

// Takes the flow crossing nearest E as a seed, re-refines the crossing at
// this n, applies the cutoffs and records the dislocation residual.
// Throws NumericError if the residual exceeds the gap half-width.
ApproxEigenfunction build_approximate_eigenfunction(const PeriodicPotential& v,
                                                    const FlowRecord& flow,
                                                    double energy, int n,
                                                    const EigOptions& opts = {1e-10, 4000});

// ---------------------------------------------------------------------------
// Rotation gap filling and eigenvalue-count scaling.

struct FillRow {
  double theta = 0.0;
  int n = 0;
  double alpha = 0.0, beta = 0.0;
  long count = 0;
  double residual = -1.0;  // translated-eigenfunction residual; < 0 when absent
};

struct FillAlignment {
  double theta = 0.0;
  AlignmentSolution solution;
  double residual = 0.0;
  double mismatch = 0.0;  // mismatch_bound on the translated support box
};

struct FillReport {
  std::vector<FillRow> rows;
  std::vector<FillAlignment> alignments;
};

struct FillOptions {
  std::int64_t m_max = 200000;
  EigOptions eig;
  int workers = 1;
};

// For each theta: counts of R_theta^(n) (Dirichlet box, mesh gap.h) in every
// subinterval of the uniform partition of (a, b) into floor((b-a)/eps)
// pieces; plus, when an alignment for (theta, apx->t, eps) exists and the
// translated support fits in the box, the translated residual.
FillReport rotation_gap_fill(const PeriodicPotential& v, const SpectralGap& gap,
                             double eps, const std::vector<double>& thetas, int n,
                             const ApproxEigenfunction* apx,
                             const FillOptions& opts = {});

struct ScalingRow {
  int n = 0;
  double theta = 0.0;
  double alpha = 0.0, beta = 0.0;
  long count = 0;  // interface states: middle-half energies, inner-half mass
  double count_over_n = 0.0;
  double count_over_nlogn = 0.0;
};

struct ScalingReport {
  std::vector<ScalingRow> rows;
  double slope = 0.0;  // least-squares slope of count vs n
};

struct ScalingOptions {
  bool mass_filter = true;  // keep states with >= half their mass in |x| < n/2
  EigOptions eig;
  int workers = 1;
};

ScalingReport count_scaling(const GrainPotential& w, const SpectralGap& gap,
                            double alpha, double beta, const std::vector<int>& n_list,
                            const ScalingOptions& opts = {});

// ---------------------------------------------------------------------------
// Localization profile of a gap eigenfunction on a Dirichlet box.

struct LocalizationProfile {
  double energy = 0.0;
  std::vector<double> w_grid;
  std::vector<double> mass_beyond;  // M(w) = mass fraction at |x| > w
  double alpha_hat = 0.0;           // least-squares slope of log M(w)
  double mass_quarter = 0.0;        // M(n/4)
};

LocalizationProfile localization_profile(const EigenPair& pair,
                                         const GridSpec& box_grid,
                                         const SpectralGap& gap);

// ---------------------------------------------------------------------------
// Dirichlet decoupling inside a high barrier (resolvent difference at +1).

struct DecoupleGeometry {
  int box_half = 4;
  double h = 0.0625;
  std::function<double(double, double)> barrier;        // chi_U indicator (0/1)
  std::vector<std::array<double, 4>> cuts;              // segments (x0,y0,x1,y1)
};

// Grid analog of the rotated muffin-tin barrier geometry: U is the
// complement of the (rotated) disc lattice, S the grid lines Gamma on
// x > rho, the rotated lines on x < rho, and the vertical line x = rho,
// with rho = (1/2 - r)/2.
DecoupleGeometry muffin_decouple_geometry(double r, const RotationAngle& theta,
                                          int box_half, double h);

// For each barrier height: || (H + 1)^{-1} - (H_S + 1)^{-1} || estimated by
// power iteration (50 steps, relative tolerance 1e-6), where H_S removes all
// couplings across the cut segments.  Checks dist(S, non-U nodes) > 0.
std::vector<std::pair<double, double>> decoupling_check(
    const DecoupleGeometry& geom, const std::vector<double>& heights);

}  // namespace gbspec
