#pragma once

#include <vector>

#include "gbspec/eigensolve.hpp"
#include "gbspec/potentials.hpp"

namespace gbspec {

// A rotated-lattice disc meeting the y-axis.  xi is the signed distance of
// the y-axis from the disc center, oriented so the kept piece (x < 0) is
// congruent to the sample domain C_{r,xi} = { p in D_r : x(p) < 1/2 + xi }:
// xi = -<center x>, and xi -> r means the disc is almost untouched.
struct CutDisc {
  long index = 0;  // 1-based, by increasing center height
  double center_x = 0.0;
  double center_y = 0.0;
  double xi = 0.0;
};

struct DiscSpectrum {
  std::vector<double> values;       // distinct, ascending
  std::vector<int> multiplicities;  // 1 for order 0, 2 per nonzero order
};

// k smallest distinct Dirichlet eigenvalues (j_{nu,s}/r)^2 of the radius-r disc.
std::vector<double> disc_eigenvalues(double r, int k);
DiscSpectrum disc_spectrum(double r, int k);

// All distinct disc eigenvalues below the energy bound.
DiscSpectrum disc_spectrum_below(double r, double bound);

enum class MaskScheme {
  staircase,  // drop outside neighbours, plain diagonal
  ghost       // linear ghost extrapolation: boundary-distance diagonal weights
};

// k lowest Dirichlet eigenvalues of the cut disc C_{r,xi} on a masked grid
// of mesh width h (h <= r/32 required).
std::vector<double> cut_disc_eigenvalues(double r, double xi, int k, double h,
                                         MaskScheme scheme = MaskScheme::ghost);

// All rotated-grid discs M_theta(i+1/2, j+1/2) with |center x| < r and
// center y in [0, y_max], sorted by height.  theta in (0, pi/4].
std::vector<CutDisc> enumerate_cut_discs(double r, const RotationAngle& theta,
                                         double y_max);

struct SurfaceStateRow {
  long j = 0;
  double xi = 0.0;
  double eta = 0.0;
  int k = 0;
  double lambda = 0.0;
};

struct SurfaceSpectrum {
  std::vector<SurfaceStateRow> rows;  // eigenvalues inside (a, b) only
  bool tan_rational = false;
  bool xi_periodic = false;  // distinct xi set saturates (rational tan theta)
  std::vector<double> distinct_xi;
};

// Surface-state eigenvalues of the infinite-wall muffin tin: each cut disc
// mapped through cut_disc_eigenvalues and filtered to the gap (a, b).
SurfaceSpectrum muffin_surface_spectrum(double r, const RotationAngle& theta,
                                        double a, double b, double y_max, double h,
                                        MaskScheme scheme = MaskScheme::ghost);

struct HeightRow {
  double height = 0.0;
  std::vector<double> lambdas;  // ascending, inside the tracking window
};

// Eigenvalues of H = -Delta + height * V_{r,theta} on the Dirichlet box
// (-box_half, box_half)^2 inside the window (track_lo, track_hi), per height.
// V_{r,theta} is 0 on the (rotated) muffin discs and 1 outside.
std::vector<HeightRow> finite_height_convergence(
    double r, const RotationAngle& theta, const std::vector<double>& heights,
    double track_lo, double track_hi, double h, int box_half,
    const EigOptions& opts = {});

}  // namespace gbspec
