#include "gbspec/alignment.hpp"

#include <cmath>

#include "gbspec/numutil.hpp"

namespace gbspec {

TorusTranslation::TorusTranslation(const RotationAngle& theta) {
  const auto th = static_cast<long double>(theta.theta());
  tan_ = std::tan(th);
  sec_ = 1.0L / std::cos(th);
}

std::pair<double, double> TorusTranslation::step() const {
  return {static_cast<double>(frac_ld(tan_)), static_cast<double>(frac_ld(sec_))};
}

std::pair<double, double> TorusTranslation::iterate(std::int64_t m) const {
  // Kahan-compensated accumulation of the two step components, reduced
  // mod 1 on the fly so the fractional signal survives large m.
  const long double sx = frac_ld(tan_), sy = frac_ld(sec_);
  long double ax = 0.0L, ay = 0.0L, cx = 0.0L, cy = 0.0L;
  for (std::int64_t i = 0; i < m; ++i) {
    long double yx = sx - cx, t = ax + yx;
    cx = (t - ax) - yx;
    ax = t >= 1.0L ? t - 1.0L : t;
    long double yy = sy - cy, u = ay + yy;
    cy = (u - ay) - yy;
    ay = u >= 1.0L ? u - 1.0L : u;
  }
  return {static_cast<double>(frac_ld(ax)), static_cast<double>(frac_ld(ay))};
}

std::optional<std::array<std::int64_t, 3>> rational_dependence(
    const RotationAngle& theta, std::int64_t denominator_cap) {
  if (denominator_cap < 1)
    throw PreconditionError("rational_dependence: denominator_cap must be >= 1");
  const long double tn = std::tan(static_cast<long double>(theta.theta()));
  const long double sc = 1.0L / std::cos(static_cast<long double>(theta.theta()));
  const long double tol = 1e-10L;
  for (std::int64_t n2 = -denominator_cap; n2 <= denominator_cap; ++n2) {
    for (std::int64_t n3 = -denominator_cap; n3 <= denominator_cap; ++n3) {
      if (n2 == 0 && n3 == 0) continue;
      const long double v = static_cast<long double>(n2) * tn +
                            static_cast<long double>(n3) * sc;
      const auto n1 = static_cast<std::int64_t>(std::llroundl(-v));
      if (n1 < -denominator_cap || n1 > denominator_cap) continue;
      if (std::fabs(static_cast<double>(v + static_cast<long double>(n1))) <= tol)
        return std::array<std::int64_t, 3>{n1, n2, n3};
    }
  }
  return std::nullopt;
}

std::optional<AlignmentSolution> find_alignment(const RotationAngle& theta, double t,
                                                double eps, std::int64_t m_max) {
  if (!(t > 0.0) || !(t < 1.0)) throw PreconditionError("find_alignment: t must lie in (0,1)");
  if (!(eps > 0.0)) throw PreconditionError("find_alignment: eps must be positive");
  if (m_max < 1) throw PreconditionError("find_alignment: m_max must be >= 1");

  const long double th = static_cast<long double>(theta.theta());
  const long double tn = std::tan(th);
  const long double sc = 1.0L / std::cos(th);
  const long double sx = frac_ld(tn), sy = frac_ld(sc);
  const double quarter = eps / 4.0;

  long double ax = 0.0L, ay = 0.0L;  // fractional parts of m*tan, m*sec
  for (std::int64_t m = 1; m <= m_max; ++m) {
    ax += sx;
    if (ax >= 1.0L) ax -= 1.0L;
    ay += sy;
    if (ay >= 1.0L) ay -= 1.0L;
    const double rx = std::fabs(static_cast<double>(ax) - t);
    const double fy = static_cast<double>(ay);
    const double ry = std::min(fy, 1.0 - fy);
    if (rx < quarter && ry < quarter) {
      AlignmentSolution sol;
      sol.m = m;
      sol.N = static_cast<std::int64_t>(
          std::llroundl(static_cast<long double>(m) * sc));
      sol.theta = theta.theta();
      sol.t = t;
      sol.epsilon = eps;
      sol.residual_x = rx;
      sol.residual_y = ry;
      return sol;
    }
  }
  return std::nullopt;
}

SpacedAlignmentSet find_spaced_alignments(const RotationAngle& theta, double t,
                                          double eps, std::int64_t nu,
                                          std::int64_t horizon) {
  if (nu < 1) throw PreconditionError("find_spaced_alignments: nu must be >= 1");
  if (horizon < 8 * nu)
    throw PreconditionError("find_spaced_alignments: horizon must be >= 8 nu");
  if (!(t > 0.0) || !(t < 1.0))
    throw PreconditionError("find_spaced_alignments: t must lie in (0,1)");
  if (!(eps > 0.0)) throw PreconditionError("find_spaced_alignments: eps must be positive");

  const long double th = static_cast<long double>(theta.theta());
  const long double tn = std::tan(th);
  const long double sc = 1.0L / std::cos(th);
  const long double sx = frac_ld(tn), sy = frac_ld(sc);
  const double quarter = eps / 4.0;

  SpacedAlignmentSet set;
  set.spacing_nu = nu;
  set.horizon_n = horizon;

  std::int64_t last_accepted = -(1ll << 60);
  long double ax = 0.0L, ay = 0.0L;
  const std::int64_t m_cap = horizon / 4;  // m ranges over (0, n/4)
  for (std::int64_t m = 1; m < m_cap; ++m) {
    ax += sx;
    if (ax >= 1.0L) ax -= 1.0L;
    ay += sy;
    if (ay >= 1.0L) ay -= 1.0L;
    if (m - last_accepted < 2 * nu) continue;
    const double rx = std::fabs(static_cast<double>(ax) - t);
    const double fy = static_cast<double>(ay);
    const double ry = std::min(fy, 1.0 - fy);
    if (rx < quarter && ry < quarter) {
      AlignmentSolution sol;
      sol.m = m;
      sol.N = static_cast<std::int64_t>(
          std::llroundl(static_cast<long double>(m) * sc));
      sol.theta = theta.theta();
      sol.t = t;
      sol.epsilon = eps;
      sol.residual_x = rx;
      sol.residual_y = ry;
      set.solutions.push_back(sol);
      last_accepted = m;
    }
  }
  set.density_estimate =
      static_cast<double>(set.solutions.size()) / static_cast<double>(horizon);
  return set;
}

}  // namespace gbspec
