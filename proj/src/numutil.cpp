#include "gbspec/numutil.hpp"

#include <cstring>

namespace gbspec {

std::optional<std::pair<std::int64_t, std::int64_t>> rational_approx(
    double x, std::int64_t max_den, double tol) {
  // Convergents of the continued fraction of x.  Stop at the first one that
  // reproduces x within tol; give up once the denominator exceeds max_den.
  double y = x;
  std::int64_t p0 = 1, q0 = 0;  // p_{-1}/q_{-1}
  std::int64_t p1 = 0, q1 = 1;  // p_0/q_0 seeds so that p/q -> floor(x) first
  for (int iter = 0; iter < 64; ++iter) {
    double fl = std::floor(y);
    if (fl > 9.2e18 || fl < -9.2e18) break;
    auto a = static_cast<std::int64_t>(fl);
    std::int64_t p = a * p0 + p1;
    std::int64_t q = a * q0 + q1;
    if (q > max_den || q < 0) break;
    if (q > 0 && std::abs(x - static_cast<double>(p) / static_cast<double>(q)) <= tol) {
      if (p == 0) return std::make_pair<std::int64_t, std::int64_t>(0, 1);
      return std::make_pair(p, q);
    }
    p1 = p0; q1 = q0;
    p0 = p; q0 = q;
    double rem = y - fl;
    if (rem < 1e-18) break;
    y = 1.0 / rem;
  }
  return std::nullopt;
}

std::optional<std::int64_t> perfect_square(std::int64_t v) {
  if (v < 0) return std::nullopt;
  auto r = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(v))));
  for (std::int64_t c = r - 1; c <= r + 1; ++c)
    if (c >= 0 && c * c == v) return c;
  return std::nullopt;
}

std::uint64_t fnv1a(const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 1469598103934665603ull;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace gbspec
