#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "gbspec/potentials.hpp"

namespace gbspec {

// Translation (x, y) -> (x + tan theta, y + 1/cos theta) on the unit torus.
class TorusTranslation {
 public:
  explicit TorusTranslation(const RotationAngle& theta);

  std::pair<double, double> step() const;  // both components in [0, 1)
  // m-fold iterate of (0, 0), accumulated with compensated summation.
  std::pair<double, double> iterate(std::int64_t m) const;

 private:
  long double tan_, sec_;
};

// Integer m (with nearest integer N to m/cos theta) witnessing
//   |(m tan theta)~ - t| < eps/4   and   dist(m/cos theta, Z) < eps/4.
struct AlignmentSolution {
  std::int64_t m = 0;
  std::int64_t N = 0;
  double theta = 0.0;
  double t = 0.0;
  double epsilon = 0.0;
  double residual_x = 0.0;  // |(m tan theta)~ - t|
  double residual_y = 0.0;  // dist(m / cos theta, Z)
};

struct SpacedAlignmentSet {
  std::vector<AlignmentSolution> solutions;  // sorted by m
  std::int64_t spacing_nu = 0;
  std::int64_t horizon_n = 0;
  double density_estimate = 0.0;  // count / horizon
};

// Nonzero integer triple with |n_i| <= denominator_cap satisfying
// n1 + n2 tan theta + n3 / cos theta = 0 to tolerance 1e-10, if one exists.
// An empty result means theta behaves ergodically at working precision.
std::optional<std::array<std::int64_t, 3>> rational_dependence(
    const RotationAngle& theta, std::int64_t denominator_cap);

// Smallest m <= m_max satisfying both alignment conditions for (theta, t, eps).
std::optional<AlignmentSolution> find_alignment(const RotationAngle& theta, double t,
                                                double eps, std::int64_t m_max);

// Greedy first-fit collection of qualifying m in (0, n/4) with pairwise
// spacing |m_s - m_r| >= 2 nu.
SpacedAlignmentSet find_spaced_alignments(const RotationAngle& theta, double t,
                                          double eps, std::int64_t nu,
                                          std::int64_t horizon);

}  // namespace gbspec
