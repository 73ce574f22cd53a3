#include "gbspec/potentials.hpp"

#include <cmath>

#include "gbspec/numutil.hpp"

namespace gbspec {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 6.28318530717958647692;
}  // namespace

RotationAngle::RotationAngle(double theta) : theta_(theta) {
  if (!(theta >= 0.0) || !(theta < kPi / 2.0))
    throw PreconditionError("RotationAngle: theta must lie in [0, pi/2)");
  cos_ = std::cos(theta);
  sin_ = std::sin(theta);
  tan_ = sin_ / cos_;
}

PeriodicPotential PeriodicPotential::cosine_sum(double amplitude) {
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude))
    throw PreconditionError("cosine_sum: amplitude must be finite and >= 0");
  return {Family::cosine_sum, amplitude, 0.0, 0.0, kTwoPi * amplitude * std::sqrt(2.0)};
}

PeriodicPotential PeriodicPotential::smooth_muffin(double amplitude, double radius,
                                                   double ramp) {
  if (!(amplitude >= 0.0) || !(radius > 0.0) || !(radius < 0.5) || !(ramp > 0.0))
    throw PreconditionError("smooth_muffin: need amplitude >= 0, 0 < radius < 1/2, ramp > 0");
  return {Family::smooth_muffin, amplitude, radius, ramp, amplitude / ramp};
}

PeriodicPotential PeriodicPotential::flat() {
  return {Family::flat, 0.0, 0.0, 0.0, 0.0};
}

double PeriodicPotential::operator()(double x, double y) const {
  switch (family_) {
    case Family::cosine_sum:
      return amplitude_ * (2.0 + std::cos(kTwoPi * x) + std::cos(kTwoPi * y));
    case Family::smooth_muffin: {
      // Distance to the nearest cell-center (i+1/2, j+1/2).
      const double dx = frac(x) - 0.5;
      const double dy = frac(y) - 0.5;
      const double d = std::sqrt(dx * dx + dy * dy);
      return amplitude_ * std::clamp((d - radius_) / ramp_, 0.0, 1.0);
    }
    case Family::flat:
      return 0.0;
  }
  return 0.0;
}

GrainPotential GrainPotential::rotation(const PeriodicPotential& v,
                                        const RotationAngle& theta) {
  GrainPotential g(Kind::rotation, v, v, theta.theta());
  g.cos_ = theta.cos();
  g.sin_ = theta.sin();
  return g;
}

GrainPotential GrainPotential::dislocation(const PeriodicPotential& v, double t) {
  if (!(t >= 0.0) || !(t <= 1.0))
    throw PreconditionError("dislocation: t must lie in [0, 1]");
  return {Kind::dislocation, v, v, t};
}

GrainPotential GrainPotential::symmetric_rotation(const PeriodicPotential& v,
                                                  const RotationAngle& theta) {
  GrainPotential g(Kind::symmetric_rotation, v, v, theta.theta());
  g.cos_ = std::cos(theta.theta() / 2.0);
  g.sin_ = std::sin(theta.theta() / 2.0);
  return g;
}

GrainPotential GrainPotential::symmetric_dislocation(const PeriodicPotential& v,
                                                     double t) {
  if (!(t >= 0.0) || !(t <= 1.0))
    throw PreconditionError("symmetric_dislocation: t must lie in [0, 1]");
  return {Kind::symmetric_dislocation, v, v, t};
}

GrainPotential GrainPotential::two_sided(const PeriodicPotential& left,
                                         const PeriodicPotential& right) {
  return {Kind::two_sided, left, right, 0.0};
}

double GrainPotential::operator()(double x, double y) const {
  switch (kind_) {
    case Kind::rotation:
      // M_{-theta} (x, y) = (x cos + y sin, -x sin + y cos)
      if (x >= 0.0) return right_(x, y);
      return right_(cos_ * x + sin_ * y, -sin_ * x + cos_ * y);
    case Kind::dislocation:
      if (x >= 0.0) return right_(x, y);
      return right_(x + param_, y);
    case Kind::symmetric_rotation:
      if (x >= 0.0) return right_(cos_ * x + sin_ * y, -sin_ * x + cos_ * y);
      return right_(cos_ * x - sin_ * y, sin_ * x + cos_ * y);
    case Kind::symmetric_dislocation:
      if (x >= 0.0) return right_(x - param_ / 2.0, y);
      return right_(x + param_ / 2.0, y);
    case Kind::two_sided:
      return x >= 0.0 ? right_(x, y) : left_(x, y);
  }
  return 0.0;
}

double mismatch_bound(const PeriodicPotential& v, const RotationAngle& theta,
                      double t, const Rect& box, int samples_per_unit) {
  if (box.empty()) throw PreconditionError("mismatch_bound: empty box");
  if (samples_per_unit < 1)
    throw PreconditionError("mismatch_bound: samples_per_unit must be >= 1");
  const double L = v.lipschitz_constant();
  const double c1 = theta.cos() - 1.0;
  const double s = theta.sin();

  const auto nx = static_cast<long>(std::ceil((box.x1 - box.x0) * samples_per_unit)) + 1;
  const auto ny = static_cast<long>(std::ceil((box.y1 - box.y0) * samples_per_unit)) + 1;
  const double hx = (box.x1 - box.x0) / static_cast<double>(nx - 1 ? nx - 1 : 1);
  const double hy = (box.y1 - box.y0) / static_cast<double>(ny - 1 ? ny - 1 : 1);

  double sup2 = 0.0;
  for (long i = 0; i < nx; ++i) {
    const double x = box.x0 + hx * static_cast<double>(i);
    for (long j = 0; j < ny; ++j) {
      const double y = box.y0 + hy * static_cast<double>(j);
      const double X = x * c1 - t + y * s;
      const double Y = -x * s + y * c1;
      const double dx = dist_to_integer(X);
      const double dy = dist_to_integer(Y);
      sup2 = std::max(sup2, dx * dx + dy * dy);
    }
  }
  return L * std::sqrt(sup2);
}

std::optional<std::int64_t> pythagorean_period(const RotationAngle& theta) {
  auto pq = rational_approx(theta.cos(), 1000000, 1e-12);
  if (!pq) return std::nullopt;
  const std::int64_t q = pq->first;   // numerator: cos = q/p
  const std::int64_t p = pq->second;  // denominator
  if (q < 0 || q > p) return std::nullopt;
  if (!perfect_square(p * p - q * q)) return std::nullopt;
  return p;
}

}  // namespace gbspec
