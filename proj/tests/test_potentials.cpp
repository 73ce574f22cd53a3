#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gbspec/potentials.hpp"

using namespace gbspec;

namespace {
const double pi = 3.14159265358979323846;
}

TEST_CASE("Z^2 periodicity by sampling") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-8.0, 8.0);
  std::uniform_int_distribution<int> shift(-5, 5);
  const PeriodicPotential pots[] = {PeriodicPotential::cosine_sum(30.0),
                                    PeriodicPotential::smooth_muffin(40.0, 0.3, 0.15),
                                    PeriodicPotential::flat()};
  for (const auto& v : pots) {
    for (int i = 0; i < 10000; ++i) {
      const double x = u(rng), y = u(rng);
      const int sx = shift(rng), sy = shift(rng);
      CHECK(v(x + sx, y + sy) == doctest::Approx(v(x, y)).epsilon(1e-12));
    }
  }
}

TEST_CASE("Lipschitz audit on nearby sample pairs") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-3.0, 3.0), d(-0.05, 0.05);
  const PeriodicPotential pots[] = {PeriodicPotential::cosine_sum(30.0),
                                    PeriodicPotential::smooth_muffin(40.0, 0.3, 0.15)};
  for (const auto& v : pots) {
    const double L = v.lipschitz_constant();
    for (int i = 0; i < 10000; ++i) {
      const double x = u(rng), y = u(rng), dx = d(rng), dy = d(rng);
      const double dv = std::abs(v(x + dx, y + dy) - v(x, y));
      CHECK(dv <= L * std::hypot(dx, dy) * (1.0 + 1e-9) + 1e-12);
    }
  }
}

TEST_CASE("flat family evaluates to zero and cosine amplitude-zero likewise") {
  auto f = PeriodicPotential::flat();
  auto c0 = PeriodicPotential::cosine_sum(0.0);
  CHECK(f(0.3, -2.7) == 0.0);
  CHECK(c0(1.234, 5.0) == 0.0);
  CHECK(f.lipschitz_constant() == 0.0);
}

TEST_CASE("grain potential piecewise evaluation") {
  auto v = PeriodicPotential::cosine_sum(3.0);

  SUBCASE("right half-plane is unrotated") {
    auto g = GrainPotential::rotation(v, RotationAngle(0.3));
    CHECK(g(1.2, 5.0) == v(1.2, 5.0));
    CHECK(g(0.0, -1.7) == v(0.0, -1.7));  // ties at x = 0 go right
  }
  SUBCASE("theta = 0 rotation is the identity everywhere") {
    auto g = GrainPotential::rotation(v, RotationAngle(0.0));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (int i = 0; i < 100; ++i) {
      const double x = u(rng), y = u(rng);
      CHECK(g(x, y) == doctest::Approx(v(x, y)).epsilon(1e-15));
    }
  }
  SUBCASE("dislocation shifts the left branch") {
    auto g = GrainPotential::dislocation(v, 0.5);
    CHECK(g(-0.25, 0.0) == doctest::Approx(v(0.25, 0.0)).epsilon(1e-15));
  }
  SUBCASE("left branch of the rotation applies M_{-theta}") {
    const RotationAngle th(0.3);
    auto g = GrainPotential::rotation(v, th);
    const double x = -1.3, y = 2.1;
    const double xr = th.cos() * x + th.sin() * y;
    const double yr = -th.sin() * x + th.cos() * y;
    CHECK(g(x, y) == doctest::Approx(v(xr, yr)).epsilon(1e-15));
  }
  SUBCASE("two-sided with equal potentials is the periodic potential") {
    auto g = GrainPotential::two_sided(v, v);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (int i = 0; i < 100; ++i) {
      const double x = u(rng), y = u(rng);
      CHECK(g(x, y) == v(x, y));
    }
  }
  SUBCASE("continuity across the seam at theta = t = 0") {
    auto gr = GrainPotential::rotation(v, RotationAngle(0.0));
    auto gd = GrainPotential::dislocation(v, 0.0);
    for (double y = -2.0; y <= 2.0; y += 0.1) {
      CHECK(std::abs(gr(-1e-12, y) - gr(1e-12, y)) < 1e-10);
      CHECK(std::abs(gd(-1e-12, y) - gd(1e-12, y)) < 1e-10);
    }
  }
  SUBCASE("symmetric kinds split the parameter") {
    const RotationAngle th(0.4);
    auto gs = GrainPotential::symmetric_rotation(v, th);
    const double c = std::cos(0.2), s = std::sin(0.2);
    CHECK(gs(1.0, 1.0) == doctest::Approx(v(c + s, -s + c)).epsilon(1e-14));
    CHECK(gs(-1.0, 1.0) == doctest::Approx(v(-c - s, -s + c)).epsilon(1e-14));
    auto gd = GrainPotential::symmetric_dislocation(v, 0.4);
    CHECK(gd(1.0, 0.0) == doctest::Approx(v(0.8, 0.0)).epsilon(1e-14));
    CHECK(gd(-1.0, 0.0) == doctest::Approx(v(-0.8, 0.0)).epsilon(1e-14));
  }

  SUBCASE("parameter range is validated") {
    CHECK_THROWS_AS(GrainPotential::dislocation(v, 1.5), PreconditionError);
    CHECK_THROWS_AS(RotationAngle(2.0), PreconditionError);
    CHECK_THROWS_AS(RotationAngle(-0.1), PreconditionError);
  }
}

TEST_CASE("rotation angle caches are consistent") {
  for (double th : {0.0, 0.1, 0.5, 1.2, 1.5}) {
    RotationAngle a(th);
    CHECK(std::abs(a.cos() * a.cos() + a.sin() * a.sin() - 1.0) <= 1e-14);
    CHECK(a.tan() == doctest::Approx(a.sin() / a.cos()).epsilon(1e-14));
  }
}

TEST_CASE("mismatch bound: closed-form spot values") {
  auto v = PeriodicPotential::cosine_sum(2.0);
  const double L = v.lipschitz_constant();

  SUBCASE("single point (0,0): bound is L min(t, 1-t)") {
    for (double t : {0.2, 0.5, 0.8}) {
      const Rect pt{-1e-9, 1e-9, -1e-9, 1e-9};
      const double b = mismatch_bound(v, RotationAngle(0.7), t, pt);
      CHECK(b == doctest::Approx(L * std::min(t, 1.0 - t)).epsilon(1e-6));
    }
  }
  SUBCASE("theta = 0, t = 0 gives zero on any box") {
    CHECK(mismatch_bound(v, RotationAngle(0.0), 0.0, Rect::q_box(3.0, 7.0)) == 0.0);
  }
  SUBCASE("empty box rejected") {
    CHECK_THROWS_AS(mismatch_bound(v, RotationAngle(0.1), 0.5, Rect{1, 1, 0, 2}),
                    PreconditionError);
  }
}

TEST_CASE("mismatch soundness: sampled sup |V_theta - W_t| <= bound") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> uth(0.005, 0.6), ut(0.05, 0.95), ub(0.5, 3.0),
      uc(-4.0, 4.0);
  auto v = PeriodicPotential::cosine_sum(1.5);
  for (int rep = 0; rep < 12; ++rep) {
    const RotationAngle th(uth(rng));
    const double t = ut(rng);
    const double cx = uc(rng), cy = uc(rng), hw = ub(rng);
    const Rect box{cx - hw, cx + hw, cy - hw, cy + hw};
    const double bound = mismatch_bound(v, th, t, box);
    auto vt = GrainPotential::rotation(v, th);
    auto wt = GrainPotential::dislocation(v, t);
    double sup = 0.0;
    for (int i = 0; i <= 60; ++i)
      for (int j = 0; j <= 60; ++j) {
        const double x = box.x0 + (box.x1 - box.x0) * i / 60.0;
        const double y = box.y0 + (box.y1 - box.y0) * j / 60.0;
        sup = std::max(sup, std::abs(vt(x, y) - wt(x, y)));
      }
    CHECK(sup <= bound * (1.0 + 1e-9) + 1e-9);
  }
}

TEST_CASE("pythagorean periods") {
  SUBCASE("cos = 4/5 gives period 5") {
    const double theta = std::acos(0.8);
    auto p = pythagorean_period(RotationAngle(theta));
    REQUIRE(p.has_value());
    CHECK(*p == 5);
  }
  SUBCASE("theta = 0 gives period 1") {
    auto p = pythagorean_period(RotationAngle(0.0));
    REQUIRE(p.has_value());
    CHECK(*p == 1);
  }
  SUBCASE("cos = 1/2 is rational but not pythagorean") {
    CHECK(!pythagorean_period(RotationAngle(std::acos(0.5))).has_value());
  }
  SUBCASE("irrational cosine yields nothing") {
    CHECK(!pythagorean_period(RotationAngle(pi / 4.0)).has_value());
    CHECK(!pythagorean_period(RotationAngle(0.3)).has_value());
  }
  SUBCASE("V_theta is p-periodic in y on both half-planes") {
    const double theta = std::acos(0.8);
    auto v = PeriodicPotential::cosine_sum(2.0);
    auto g = GrainPotential::rotation(v, RotationAngle(theta));
    const auto p = pythagorean_period(RotationAngle(theta));
    REQUIRE(p.has_value());
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-6.0, 6.0);
    for (int i = 0; i < 2000; ++i) {
      const double x = u(rng), y = u(rng);
      CHECK(std::abs(g(x, y + static_cast<double>(*p)) - g(x, y)) <= 1e-12);
    }
  }
}
