#include "gbspec/bessel.hpp"

#include <cmath>
#include <cstddef>

#include "gbspec/errors.hpp"

namespace gbspec {

namespace {

double bessel_series(int nu, double x) {
  // Ascending series; safe from cancellation for x <= ~4.
  const double x2 = 0.25 * x * x;
  double term = 1.0;
  for (int i = 1; i <= nu; ++i) term *= 0.5 * x / static_cast<double>(i);
  double sum = term;
  for (int m = 1; m < 80; ++m) {
    term *= -x2 / (static_cast<double>(m) * static_cast<double>(m + nu));
    sum += term;
    if (std::abs(term) < 1e-18 * (std::abs(sum) + 1e-300)) break;
  }
  return sum;
}

double bessel_miller(int nu, double x) {
  // Backward recurrence f_{m-1} = (2m/x) f_m - f_{m+1}, normalized with
  // J_0 + 2 J_2 + 2 J_4 + ... = 1.
  const int top = std::max(nu, static_cast<int>(std::ceil(x))) + 42;
  const int start = top + (top % 2);  // even start keeps the sum bookkeeping simple
  double fp = 0.0;          // f_{m+1}
  double fc = 1e-155;       // f_m
  double sum = 0.0;
  double fnu = 0.0;
  for (int m = start; m >= 1; --m) {
    const double fm = (2.0 * m / x) * fc - fp;
    fp = fc;
    fc = fm;
    if (m - 1 == nu) fnu = fc;
    if ((m - 1) % 2 == 0) sum += (m - 1 == 0) ? fc : 2.0 * fc;
    if (std::abs(fc) > 1e250) {
      fc *= 1e-250;
      fp *= 1e-250;
      sum *= 1e-250;
      fnu *= 1e-250;
    }
  }
  return fnu / sum;
}

}  // namespace

double bessel_j(int nu, double x) {
  if (nu < 0) throw PreconditionError("bessel_j: order must be >= 0");
  if (!(x >= 0.0)) throw PreconditionError("bessel_j: x must be >= 0");
  if (x == 0.0) return nu == 0 ? 1.0 : 0.0;
  if (x <= 4.0) return bessel_series(nu, x);
  return bessel_miller(nu, x);
}

double bessel_j_zero(int nu, int s) {
  if (s < 1) throw PreconditionError("bessel_j_zero: s must be >= 1");
  int found = 0;
  // J_nu > 0 on (0, j_{nu,1}); successive zeros are at least ~pi apart,
  // so a 0.2 scan step cannot skip one.
  double x = std::max(static_cast<double>(nu), 0.5);
  double f = bessel_j(nu, x);
  while (f == 0.0) {  // pathological grid point; nudge
    x += 1e-9;
    f = bessel_j(nu, x);
  }
  const double step = 0.2;
  for (int guard = 0; guard < 2000000; ++guard) {
    const double x2 = x + step;
    const double f2 = bessel_j(nu, x2);
    if (f == 0.0 || f * f2 < 0.0) {
      ++found;
      if (found == s) {
        double lo = x, hi = x2;
        double flo = f;
        for (int it = 0; it < 200; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double fm = bessel_j(nu, mid);
          if (fm == 0.0) return mid;
          if (flo * fm < 0.0) {
            hi = mid;
          } else {
            lo = mid;
            flo = fm;
          }
          if (hi - lo < 1e-12) break;
        }
        return 0.5 * (lo + hi);
      }
    }
    x = x2;
    f = f2;
  }
  throw NumericError("bessel_j_zero: zero not found (nu=" + std::to_string(nu) +
                     ", s=" + std::to_string(s) + ")");
}

std::vector<double> bessel_j_zeros_upto(int nu, double x_max) {
  std::vector<double> out;
  for (int s = 1;; ++s) {
    const double z = bessel_j_zero(nu, s);
    if (z > x_max) break;
    out.push_back(z);
    if (out.size() > 10000) throw NumericError("bessel_j_zeros_upto: runaway enumeration");
  }
  return out;
}

}  // namespace gbspec
