#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>

namespace gbspec {

// Fractional part x - floor(x), mapped into [0, 1).
inline double frac(double x) {
  double f = x - std::floor(x);
  if (f >= 1.0) f = 0.0;  // guard against x - floor(x) == 1 after rounding
  return f;
}

inline long double frac_ld(long double x) {
  long double f = x - std::floor(x);
  if (f >= 1.0L) f = 0.0L;
  return f;
}

// Distance from x to the nearest integer.
inline double dist_to_integer(double x) {
  double f = frac(x);
  return std::min(f, 1.0 - f);
}

// Continued-fraction reconstruction of x as p/q in lowest terms with
// q <= max_den and |x - p/q| <= tol.  Returns (p, q), q >= 1.
std::optional<std::pair<std::int64_t, std::int64_t>> rational_approx(
    double x, std::int64_t max_den, double tol);

// Exact integer square root test: returns r with r*r == v, if it exists.
std::optional<std::int64_t> perfect_square(std::int64_t v);

// C^2 quintic step: 0 for s <= 0, 1 for s >= 1, 6s^5 - 15s^4 + 10s^3 between.
inline double smoothstep(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

// Plateau cutoff: 1 on |x| <= inner, 0 on |x| >= outer, quintic in between.
inline double plateau_cutoff(double x, double inner, double outer) {
  return smoothstep((outer - std::abs(x)) / (outer - inner));
}

// FNV-1a hash, used for config provenance stamps.
std::uint64_t fnv1a(const void* data, std::size_t len);

}  // namespace gbspec
