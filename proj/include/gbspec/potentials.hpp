#pragma once

#include <cstdint>
#include <optional>

#include "gbspec/errors.hpp"

namespace gbspec {

// Rotation angle theta in [0, pi/2) with cached trigonometry.
class RotationAngle {
 public:
  explicit RotationAngle(double theta);

  double theta() const { return theta_; }
  double cos() const { return cos_; }
  double sin() const { return sin_; }
  double tan() const { return tan_; }
  double sec() const { return 1.0 / cos_; }

 private:
  double theta_, cos_, sin_, tan_;
};

// Z^2-periodic Lipschitz potential with an exactly known Lipschitz constant.
//   cosine_sum:    V(x,y) = A (2 + cos 2 pi x + cos 2 pi y),    L = 2 pi A sqrt(2)
//   smooth_muffin: 0 inside discs of the given radius around lattice-cell
//                  centers, rising linearly over `ramp` to the plateau A,
//                  L = A / ramp
//   flat:          identically 0
class PeriodicPotential {
 public:
  enum class Family { cosine_sum, smooth_muffin, flat };

  static PeriodicPotential cosine_sum(double amplitude);
  static PeriodicPotential smooth_muffin(double amplitude, double radius, double ramp);
  static PeriodicPotential flat();

  double operator()(double x, double y) const;
  double lipschitz_constant() const { return lipschitz_; }
  Family family() const { return family_; }
  double amplitude() const { return amplitude_; }
  double radius() const { return radius_; }
  double ramp() const { return ramp_; }

 private:
  PeriodicPotential(Family f, double a, double r, double w, double lip)
      : family_(f), amplitude_(a), radius_(r), ramp_(w), lipschitz_(lip) {}
  Family family_;
  double amplitude_, radius_, ramp_, lipschitz_;
};

// Piecewise grain-boundary composition, split along the y-axis.  The closed
// right half-plane x >= 0 always carries the unrotated/unshifted branch.
class GrainPotential {
 public:
  enum class Kind {
    rotation,               // V on x>=0, V o M_{-theta} on x<0
    dislocation,            // V on x>=0, V(x+t, y) on x<0
    symmetric_rotation,     // V o M_{-theta/2} on x>=0, V o M_{theta/2} on x<0
    symmetric_dislocation,  // V(x-t/2, y) on x>=0, V(x+t/2, y) on x<0
    two_sided               // V_right on x>=0, V_left on x<0
  };

  static GrainPotential rotation(const PeriodicPotential& v, const RotationAngle& theta);
  static GrainPotential dislocation(const PeriodicPotential& v, double t);
  static GrainPotential symmetric_rotation(const PeriodicPotential& v,
                                           const RotationAngle& theta);
  static GrainPotential symmetric_dislocation(const PeriodicPotential& v, double t);
  static GrainPotential two_sided(const PeriodicPotential& left,
                                  const PeriodicPotential& right);

  double operator()(double x, double y) const;

  Kind kind() const { return kind_; }
  double parameter() const { return param_; }  // theta or t; 0 for two_sided
  const PeriodicPotential& base() const { return right_; }
  const PeriodicPotential& left_base() const { return left_; }

 private:
  GrainPotential(Kind k, const PeriodicPotential& l, const PeriodicPotential& r, double p)
      : kind_(k), left_(l), right_(r), param_(p) {}
  Kind kind_;
  PeriodicPotential left_, right_;
  double param_;
  double cos_ = 1.0, sin_ = 0.0;  // cached for the rotation kinds
};

// Axis-aligned rectangle (x0, x1) x (y0, y1).
struct Rect {
  double x0, x1, y0, y1;
  // Q_n(0, eta) = (-n, n) x (eta - n, eta + n)
  static Rect q_box(double n, double eta) { return {-n, n, eta - n, eta + n}; }
  bool empty() const { return !(x0 < x1) || !(y0 < y1); }
};

// Supremum over a dense sample grid of the pointwise Lipschitz bound
//   L * dist( (X, Y), Z^2 ),  X = x (cos t - 1) - t + y sin t,
//                             Y = -x sin t + y (cos t - 1),
// which dominates |V_theta - W_t| at every sampled point.  At least
// `samples_per_unit` samples per unit length per axis.
double mismatch_bound(const PeriodicPotential& v, const RotationAngle& theta,
                      double t, const Rect& box, int samples_per_unit = 100);

// If cos(theta) == q/p in lowest terms (continued fractions, denominator at
// most 10^6, tolerance 1e-12) and p^2 - q^2 is a perfect square, the grain
// potential V_theta is p-periodic in y; returns p, else nothing.
std::optional<std::int64_t> pythagorean_period(const RotationAngle& theta);

}  // namespace gbspec
