#pragma once

#include <vector>

namespace gbspec {

// J_nu(x) for integer nu >= 0: ascending series for small x, Miller's
// normalized backward recurrence otherwise.  No external special-function
// dependency; good to ~1e-13 relative over the range used here.
double bessel_j(int nu, double x);

// s-th positive zero of J_nu (s >= 1), bracketed by scanning and refined by
// bisection to 1e-12.
double bessel_j_zero(int nu, int s);

// All zeros of J_nu in (0, x_max], ascending.
std::vector<double> bessel_j_zeros_upto(int nu, double x_max);

}  // namespace gbspec
