#pragma once

#include <functional>

#include "gbspec/banded.hpp"
#include "gbspec/potentials.hpp"

namespace gbspec {

// One mesh axis: `count` nodes at origin + i*spacing (cell midpoints).
// wrap adds the periodic closing link, optionally with a Bloch phase.
struct Axis1D {
  std::size_t count = 0;
  double spacing = 0.0;
  double origin = 0.0;
  bool wrap = false;
  double phase = 0.0;

  double pos(std::size_t i) const { return origin + spacing * static_cast<double>(i); }
};

struct GridSpec {
  enum class Domain { box, strip, cell };
  enum class Boundary { dirichlet, periodic, bloch };

  double h = 0.0625;
  Domain domain = Domain::box;
  int n = 4;           // half-width for box/strip
  int px = 1, py = 1;  // periods for cell
  Boundary bx = Boundary::dirichlet, by = Boundary::dirichlet;
  double kx = 0.0, ky = 0.0;  // Bloch phases in [0, 2 pi)

  static GridSpec box(int n, double h);
  static GridSpec strip(int n, double h);  // (-n, n) x (0, 1), periodic both
  static GridSpec cell(int px, int py, double h);
  static GridSpec bloch_cell(int px, int py, double h, double kx, double ky);

  void validate() const;
  Axis1D x_axis() const;
  Axis1D y_axis() const;
};

// Dislocation cell (-n - t, n) x (0, 1) resampled onto the fixed t = 0 mesh:
// the node count stays 2n/h while the x spacing stretches by (2n + t)/(2n).
struct StretchedCellSpec {
  double t = 0.0;
  int n = 1;
  double h = 0.0625;
};

// Low-level assembler: 5-point stencil with per-axis spacing on the product
// grid, potential sampled at node coordinates.  Node ordering folds periodic
// axes so wrap links stay inside the band.
template <class Scalar>
BandedMatrix<Scalar> assemble_on_grid(const Axis1D& ax, const Axis1D& ay,
                                      const std::function<double(double, double)>& q);

BandedMatrix<double> assemble(const PeriodicPotential& v, const GridSpec& grid);
BandedMatrix<double> assemble(const GrainPotential& w, const GridSpec& grid);
BandedMatrix<cplx> assemble_bloch(const PeriodicPotential& v, const GridSpec& grid);

// Hermitian fiber on the unit cell with phase factors on wrap-around links.
BandedMatrix<cplx> bloch_fiber(const PeriodicPotential& v, double kx, double ky,
                               double h);

// Seam-aware sample of a grain potential on the x-cell (x_lo, x_hi): the
// midpoint value away from the interface; cells strictly straddling x = 0
// blend in an exact per-branch cell average with a weight that vanishes as
// the seam reaches a cell boundary.  The blend keeps matrix entries
// continuous in the dislocation parameter while reducing to pure midpoint
// sampling whenever the seam lies on a cell boundary (t = 0, 1 on
// commensurate meshes).
double seam_blended_sample(const GrainPotential& g, double x_lo, double x_hi,
                           double y);

// w must be a dislocation GrainPotential whose parameter equals spec.t.
// Potential sampled with seam_blended_sample on the stretched x-cells.
BandedMatrix<double> assemble_stretched(const GrainPotential& w,
                                        const StretchedCellSpec& spec);

// Relative residual ||(H - E) u||/||u|| evaluated without materializing the
// matrix: H is the 5-point operator with the given axis spacings, Dirichlet
// outside the index range.  u is read through the callable.
double fd_residual(const Axis1D& ax, const Axis1D& ay,
                   const std::function<double(double, double)>& q,
                   const std::function<double(std::size_t, std::size_t)>& u,
                   double energy);

// Imposes a Dirichlet wall on the vertical line x = xi: every x-link whose
// segment crosses the line is severed and both endpoint diagonals are
// compensated by 1/hx^2.  The change is c (e_p + e_q)(e_p + e_q)^T per link,
// positive semidefinite, so no eigenvalue can decrease.  Requires an
// unfolded (non-periodic) x axis.
void insert_dirichlet_line_x(BandedMatrix<double>& A, const Axis1D& ax,
                             const Axis1D& ay, double xi);

}  // namespace gbspec
