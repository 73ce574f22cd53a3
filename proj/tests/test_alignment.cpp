#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gbspec/alignment.hpp"
#include "gbspec/numutil.hpp"

using namespace gbspec;

namespace {
const double pi = 3.14159265358979323846;
}

TEST_CASE("torus orbit matches direct multiplication to 1e-9") {
  for (double th : {0.05, 0.31, 1.1}) {
    const RotationAngle a(th);
    const TorusTranslation T(a);
    for (std::int64_t m : {1ll, 17ll, 1000ll, 250000ll}) {
      const auto [fx, fy] = T.iterate(m);
      const long double tn = std::tan(static_cast<long double>(th));
      const long double sc = 1.0L / std::cos(static_cast<long double>(th));
      const double ex = static_cast<double>(frac_ld(static_cast<long double>(m) * tn));
      const double ey = static_cast<double>(frac_ld(static_cast<long double>(m) * sc));
      CHECK(std::abs(fx - ex) <= 1e-9);
      CHECK(std::abs(fy - ey) <= 1e-9);
    }
  }
}

TEST_CASE("torus step components live in [0, 1)") {
  const TorusTranslation T{RotationAngle(1.3)};
  const auto [sx, sy] = T.step();
  CHECK(sx >= 0.0);
  CHECK(sx < 1.0);
  CHECK(sy >= 0.0);
  CHECK(sy < 1.0);
}

TEST_CASE("rational dependence detection") {
  SUBCASE("tan(pi/4) = 1 gives a small triple") {
    auto dep = rational_dependence(RotationAngle(pi / 4.0), 5);
    REQUIRE(dep.has_value());
    const auto [n1, n2, n3] = *dep;
    const double tn = std::tan(pi / 4.0), sc = 1.0 / std::cos(pi / 4.0);
    CHECK(std::abs(n1 + n2 * tn + n3 * sc) <= 1e-10);
    CHECK((n1 != 0 || n2 != 0 || n3 != 0));
  }
  SUBCASE("cos = 4/5: tan = 3/4 and sec = 5/4 are rationally dependent") {
    auto dep = rational_dependence(RotationAngle(std::acos(0.8)), 20);
    REQUIRE(dep.has_value());
    const auto [n1, n2, n3] = *dep;
    CHECK(std::abs(n1 + n2 * 0.75 + n3 * 1.25) <= 1e-10);
  }
  SUBCASE("arctan(pi) shows no dependence up to cap 50") {
    CHECK(!rational_dependence(RotationAngle(std::atan(pi)), 50).has_value());
  }
  SUBCASE("resonance: fractional parts of m tan theta take finitely many values") {
    const RotationAngle a(std::acos(0.8));
    REQUIRE(rational_dependence(a, 20).has_value());
    const TorusTranslation T(a);
    std::vector<double> seen;
    for (int m = 1; m <= 200; ++m) {
      const double f = T.iterate(m).first;
      bool is_new = true;
      for (double s : seen)
        if (std::abs(s - f) < 1e-9) is_new = false;
      if (is_new) seen.push_back(f);
    }
    CHECK(seen.size() == 4);  // quarters: tan = 3/4
  }
}

TEST_CASE("find_alignment basics") {
  SUBCASE("returned residuals satisfy the invariants by re-evaluation") {
    const RotationAngle a(0.05);
    auto sol = find_alignment(a, 0.5, 0.2, 1000000);
    REQUIRE(sol.has_value());
    CHECK(sol->residual_x < 0.05);
    CHECK(sol->residual_y < 0.05);
    const long double tn = std::tan(0.05L), sc = 1.0L / std::cos(0.05L);
    const double fx = static_cast<double>(frac_ld(sol->m * tn));
    const double fy = static_cast<double>(frac_ld(sol->m * sc));
    CHECK(std::abs(std::abs(fx - 0.5) - sol->residual_x) <= 1e-9);
    CHECK(std::abs(std::min(fy, 1.0 - fy) - sol->residual_y) <= 1e-9);
    CHECK(std::abs(static_cast<double>(sol->m) / std::cos(0.05) -
                   static_cast<double>(sol->N)) < 0.05);
  }
  SUBCASE("minimality: smallest qualifying m (exhaustive cross-check)") {
    const RotationAngle a(0.31);
    auto sol = find_alignment(a, 0.37, 0.35, 50000);
    REQUIRE(sol.has_value());
    const long double tn = std::tan(0.31L), sc = 1.0L / std::cos(0.31L);
    for (std::int64_t m = 1; m < sol->m; ++m) {
      const double fx = static_cast<double>(frac_ld(m * tn));
      const double fy = static_cast<double>(frac_ld(m * sc));
      const bool ok =
          std::abs(fx - 0.37) < 0.35 / 4.0 && std::min(fy, 1.0 - fy) < 0.35 / 4.0;
      CHECK(!ok);
    }
  }
  SUBCASE("resonant cos = 4/5 never hits a narrow window") {
    CHECK(!find_alignment(RotationAngle(std::acos(0.8)), 0.37, 0.01, 100000).has_value());
  }
  SUBCASE("theta = 0 cannot match a positive t") {
    CHECK(!find_alignment(RotationAngle(0.0), 0.5, 0.2, 100000).has_value());
  }
  SUBCASE("preconditions") {
    CHECK_THROWS_AS(find_alignment(RotationAngle(0.1), 0.0, 0.2, 10), PreconditionError);
    CHECK_THROWS_AS(find_alignment(RotationAngle(0.1), 0.5, -1.0, 10), PreconditionError);
    CHECK_THROWS_AS(find_alignment(RotationAngle(0.1), 0.5, 0.2, 0), PreconditionError);
  }
}

TEST_CASE("spaced alignments") {
  SUBCASE("spacing and horizon invariants hold") {
    const RotationAngle a(0.05);
    auto set = find_spaced_alignments(a, 0.5, 0.2, 4, 4000);
    CHECK(!set.solutions.empty());
    for (std::size_t i = 0; i < set.solutions.size(); ++i) {
      CHECK(set.solutions[i].m < 1000);  // m < n/4
      CHECK(set.solutions[i].residual_x < 0.05);
      CHECK(set.solutions[i].residual_y < 0.05);
      if (i > 0) CHECK(set.solutions[i].m - set.solutions[i - 1].m >= 8);
    }
    CHECK(set.density_estimate ==
          doctest::Approx(static_cast<double>(set.solutions.size()) / 4000.0));
  }
  SUBCASE("density within a factor 4 of the Birkhoff rate eps^2/(8 nu)") {
    auto set = find_spaced_alignments(RotationAngle(0.05), 0.5, 0.2, 4, 4000);
    const double predicted = 0.2 * 0.2 / (8.0 * 4.0);
    CHECK(set.density_estimate > predicted / 4.0);
    CHECK(set.density_estimate < predicted * 4.0);
  }
  SUBCASE("doubling the horizon changes the density by < 50% (non-resonant)") {
    auto s1 = find_spaced_alignments(RotationAngle(0.05), 0.5, 0.2, 4, 4000);
    auto s2 = find_spaced_alignments(RotationAngle(0.05), 0.5, 0.2, 4, 8000);
    CHECK(std::abs(s2.density_estimate - s1.density_estimate) <
          0.5 * s1.density_estimate);
  }
  SUBCASE("vacuous window gives the empty set") {
    auto set = find_spaced_alignments(RotationAngle(std::acos(0.8)), 0.37, 0.01, 4, 4000);
    CHECK(set.solutions.empty());
    CHECK(set.density_estimate == 0.0);
  }
}
