#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gbspec/bessel.hpp"
#include "gbspec/muffin.hpp"

using namespace gbspec;

namespace {

// Independent oracle: ascending-series evaluation of J_nu (plain double
// arithmetic is fine for the x <= 30 range probed here) plus bisection.
double series_j(int nu, double x) {
  const double x2 = 0.25 * x * x;
  double term = 1.0;
  for (int i = 1; i <= nu; ++i) term *= 0.5 * x / i;
  double sum = term;
  for (int m = 1; m < 200; ++m) {
    term *= -x2 / (static_cast<double>(m) * (m + nu));
    sum += term;
    if (std::abs(term) < 1e-19 * (std::abs(sum) + 1e-30) && m > nu) break;
  }
  return sum;
}

double series_zero(int nu, double lo, double hi) {
  double flo = series_j(nu, lo);
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = series_j(nu, mid);
    if (flo * fm <= 0.0)
      hi = mid;
    else {
      lo = mid;
      flo = fm;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("bessel evaluation against the standard library") {
  for (int nu : {0, 1, 2, 5, 9}) {
    for (double x = 0.25; x <= 40.0; x += 0.7) {
      const double ours = bessel_j(nu, x);
      const double ref = std::cyl_bessel_j(static_cast<double>(nu), x);
      CHECK(std::abs(ours - ref) <= 1e-12 * (1.0 + std::abs(ref)));
    }
  }
}

TEST_CASE("first disc eigenvalue matches independent series bisection to 1e-10") {
  auto mu = disc_eigenvalues(1.0, 1);
  const double j01 = series_zero(0, 2.0, 3.0);
  CHECK(std::abs(mu[0] - j01 * j01) <= 1e-10);
  CHECK(mu[0] == doctest::Approx(5.7831859629467).epsilon(1e-10));
}

TEST_CASE("disc eigenvalue scaling law mu_k(r) r^2 is r-independent") {
  auto ref = disc_eigenvalues(1.0, 6);
  for (double r : {0.1, 0.25, 0.4}) {
    auto mu = disc_eigenvalues(r, 6);
    for (int k = 0; k < 6; ++k)
      CHECK(std::abs(mu[static_cast<std::size_t>(k)] * r * r -
                     ref[static_cast<std::size_t>(k)]) <= 1e-8);
  }
  // strict ordering
  for (int k = 0; k + 1 < 6; ++k) CHECK(ref[static_cast<std::size_t>(k)] < ref[static_cast<std::size_t>(k) + 1]);
}

TEST_CASE("disc spectrum multiplicities: order zero single, higher orders double") {
  auto spec = disc_spectrum(1.0, 5);
  // j01, j11, j21, j02, j31 -> multiplicities 1, 2, 2, 1, 2
  CHECK(spec.multiplicities[0] == 1);
  CHECK(spec.multiplicities[1] == 2);
  CHECK(spec.multiplicities[2] == 2);
  CHECK(spec.multiplicities[3] == 1);
  CHECK(spec.multiplicities[4] == 2);
}

TEST_CASE("cut disc eigenvalues") {
  const double r = 0.25;
  auto mu = disc_eigenvalues(r, 3);

  SUBCASE("xi = r reproduces the full disc within 2% at h = r/64") {
    auto lam = cut_disc_eigenvalues(r, r, 1, r / 64.0);
    CHECK(std::abs(lam[0] - mu[0]) / mu[0] < 0.02);
  }
  SUBCASE("half disc ground state is the odd disc mode (j_{1,1}/r)^2") {
    auto lam = cut_disc_eigenvalues(r, 0.0, 1, r / 64.0);
    const double j11 = series_zero(1, 3.5, 4.2);
    CHECK(std::abs(lam[0] - j11 * j11 / (r * r)) / (j11 * j11 / (r * r)) < 0.02);
  }
  SUBCASE("a nearly vanished piece pushes the ground state up tenfold") {
    auto lam = cut_disc_eigenvalues(r, -0.9 * r, 1, r / 64.0);
    CHECK(lam[0] > 10.0 * mu[0]);
  }
  SUBCASE("domain monotonicity: lambda_1 nonincreasing in xi") {
    double prev = 1e300;
    for (double xi : {-0.15, -0.05, 0.05, 0.15, 0.25}) {
      auto lam = cut_disc_eigenvalues(r, xi, 1, r / 40.0);
      CHECK(lam[0] <= prev * (1.0 + 1e-12));
      prev = lam[0];
    }
  }
  SUBCASE("continuity in xi: halving delta shrinks the increment") {
    auto at = [&](double xi) { return cut_disc_eigenvalues(r, xi, 1, r / 64.0)[0]; };
    for (double xi : {-0.05, 0.05, 0.15}) {
      const double d1 = std::abs(at(xi + 0.04) - at(xi));
      const double d2 = std::abs(at(xi + 0.02) - at(xi));
      const double d3 = std::abs(at(xi + 0.01) - at(xi));
      CHECK(d3 < d2);
      CHECK(d2 < d1);
    }
  }
  SUBCASE("mesh rule and degenerate masks are rejected") {
    CHECK_THROWS_AS(cut_disc_eigenvalues(r, 0.0, 1, r / 8.0), PreconditionError);
    CHECK_THROWS_AS(cut_disc_eigenvalues(r, 1.5 * r, 1, r / 64.0), PreconditionError);
    CHECK_THROWS_AS(cut_disc_eigenvalues(r, -0.999999 * r, 4000, r / 32.0), NumericError);
  }
}

TEST_CASE("ghost masking beats the staircase order under h-halving") {
  const double r = 0.25;
  auto mu = disc_eigenvalues(r, 1);
  auto order_of = [&](MaskScheme scheme) {
    const double l1 = cut_disc_eigenvalues(r, r, 1, r / 32.0, scheme)[0];
    const double l2 = cut_disc_eigenvalues(r, r, 1, r / 64.0, scheme)[0];
    const double l3 = cut_disc_eigenvalues(r, r, 1, r / 128.0, scheme)[0];
    return std::log2(std::abs(l1 - l2) / std::abs(l2 - l3));
  };
  CHECK(order_of(MaskScheme::ghost) >= 1.5);
}

TEST_CASE("enumerate_cut_discs geometry") {
  SUBCASE("tan = 1/3 has a disc centered exactly on the y-axis") {
    const RotationAngle th(std::atan(1.0 / 3.0));
    auto discs = enumerate_cut_discs(0.25, th, 40.0);
    REQUIRE(!discs.empty());
    bool has_half = false;
    for (const auto& d : discs)
      if (std::abs(d.xi) < 1e-9) has_half = true;
    CHECK(has_half);
    for (std::size_t i = 1; i < discs.size(); ++i)
      CHECK(discs[i].center_y >= discs[i - 1].center_y);
    for (const auto& d : discs) CHECK(std::abs(d.xi) < 0.25);
  }
  SUBCASE("tan = 2/3 with small r has no cut discs at all") {
    const RotationAngle th(std::atan(2.0 / 3.0));
    auto discs = enumerate_cut_discs(0.1, th, 200.0);
    CHECK(discs.empty());
  }
  SUBCASE("enumeration soundness by brute-force index scan") {
    const double r = 0.3, ymax = 25.0;
    const RotationAngle th(0.29);
    auto discs = enumerate_cut_discs(r, th, ymax);
    std::size_t brute = 0;
    for (int i = -100; i <= 100; ++i)
      for (int j = -100; j <= 100; ++j) {
        const double cx = (i + 0.5) * th.cos() - (j + 0.5) * th.sin();
        const double cy = (i + 0.5) * th.sin() + (j + 0.5) * th.cos();
        if (std::abs(cx) < r && cy >= 0.0 && cy <= ymax) ++brute;
      }
    CHECK(discs.size() == brute);
  }
}

TEST_CASE("surface spectrum: rational angles give a finite, periodic state set") {
  const double r = 0.3;
  auto mu = disc_eigenvalues(r, 2);
  const RotationAngle th(std::atan(0.5));
  auto s1 = muffin_surface_spectrum(r, th, mu[0], mu[1], 30.0, r / 40.0);
  auto s2 = muffin_surface_spectrum(r, th, mu[0], mu[1], 60.0, r / 40.0);
  CHECK(s1.tan_rational);
  CHECK(s1.xi_periodic);
  CHECK(s2.distinct_xi.size() == s1.distinct_xi.size());
  // distinct eigenvalue set stops growing when y_max doubles
  auto distinct_values = [](const SurfaceSpectrum& s) {
    std::vector<double> vals;
    for (const auto& row : s.rows) {
      bool seen = false;
      for (double v : vals)
        if (std::abs(v - row.lambda) < 1e-7) seen = true;
      if (!seen) vals.push_back(row.lambda);
    }
    return vals.size();
  };
  CHECK(distinct_values(s2) == distinct_values(s1));
}
