#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "shearlab/error.hpp"
#include "shearlab/profiles.hpp"

using namespace shearlab;
using std::numbers::pi;

TEST_CASE("evaluate matches hand derivatives") {
  const auto s = ShearProfile::preset("sin");
  const auto c = ShearProfile::preset("cos");
  const auto s3 = ShearProfile::preset("sin3");
  CHECK(s.evaluate(pi / 2) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(c.evaluate(0.0, 1)) < 1e-15);
  // (sin^3)'' = 6 sin cos^2 - 3 sin^3, which is -3 at pi/2.
  CHECK(s3.evaluate(pi / 2, 2) == doctest::Approx(-3.0).epsilon(1e-13));
  for (double y : {0.1, 1.3, 2.9, 5.0}) {
    const double sn = std::sin(y);
    const double cs = std::cos(y);
    CHECK(s3.evaluate(y) == doctest::Approx(sn * sn * sn).epsilon(1e-13));
    CHECK(s3.evaluate(y, 1) == doctest::Approx(3 * sn * sn * cs).epsilon(1e-12));
  }
}

TEST_CASE("evaluate is periodic and consistent with finite differences") {
  const TrigMode modes[] = {{1, 0.3, -0.7}, {2, 0.1, 0.2}, {5, -0.05, 0.01}};
  const auto u = ShearProfile::from_modes(modes);
  for (int d = 0; d <= 6; ++d) {
    for (double y : {-3.0, 0.0, 0.7, 4.4}) {
      CHECK(u.evaluate(y + 2 * pi, d) == doctest::Approx(u.evaluate(y, d)).epsilon(1e-12).scale(1.0));
    }
  }
  double prev_err = 0.0;
  for (double h : {1e-2, 5e-3}) {
    double err = 0.0;
    for (int d = 0; d < 4; ++d) {
      for (int j = 0; j < 50; ++j) {
        const double y = 2 * pi * j / 50;
        const double fd = (u.evaluate(y + h, d) - u.evaluate(y - h, d)) / (2 * h);
        err = std::max(err, std::abs(fd - u.evaluate(y, d + 1)));
      }
    }
    if (prev_err > 0.0) CHECK(prev_err / err == doctest::Approx(4.0).epsilon(0.05));
    prev_err = err;
  }
}

TEST_CASE("profile construction rejects bad input") {
  const TrigMode zero[] = {{1, 0.0, 0.0}};
  const TrigMode bad_index[] = {{0, 1.0, 0.0}};
  const TrigMode bad_value[] = {{1, NAN, 0.0}};
  CHECK_THROWS_AS((void)ShearProfile::from_modes(zero), InvalidArgument);
  CHECK_THROWS_AS((void)ShearProfile::from_modes(bad_index), InvalidArgument);
  CHECK_THROWS_AS((void)ShearProfile::from_modes(bad_value), InvalidArgument);
  CHECK_THROWS_AS((void)ShearProfile::preset("tan"), InvalidArgument);
  CHECK_THROWS_AS((void)ShearProfile::linear_debug(0.0), InvalidArgument);
}

TEST_CASE("linear debug profile") {
  const auto u = ShearProfile::linear_debug(2.5);
  CHECK_FALSE(u.periodic());
  CHECK(u.evaluate(3.0) == 7.5);
  CHECK(u.evaluate(-1.0, 1) == 2.5);
  CHECK(u.evaluate(0.4, 2) == 0.0);
  CHECK(critical_points(u).empty());
}

namespace {

void check_points(const std::vector<CriticalPoint>& cps, std::vector<std::pair<double, int>> expected) {
  REQUIRE(cps.size() == expected.size());
  for (const auto& [loc, order] : expected) {
    bool found = false;
    for (const auto& cp : cps) {
      if (torus_distance(cp.location, loc) < 1e-9) {
        CHECK(cp.order == order);
        found = true;
      }
    }
    CHECK_MESSAGE(found, "missing critical point near ", loc);
  }
}

}  // namespace

TEST_CASE("critical points of the presets") {
  check_points(critical_points(ShearProfile::preset("cos")), {{0.0, 1}, {pi, 1}});
  check_points(critical_points(ShearProfile::preset("sin")), {{pi / 2, 1}, {3 * pi / 2, 1}});
  // u' = 3 sin^2 y cos y: double zeros at 0 and pi, simple ones at pi/2 and 3pi/2.
  check_points(critical_points(ShearProfile::preset("sin3")),
               {{0.0, 2}, {pi, 2}, {pi / 2, 1}, {3 * pi / 2, 1}});
  CHECK(max_order(ShearProfile::preset("sin")) == 1);
  CHECK(max_order(ShearProfile::preset("sin3")) == 2);
  CHECK(max_order(ShearProfile::preset("cos2")) == 1);
  CHECK(critical_points(ShearProfile::preset("cos2")).size() == 4);
}

TEST_CASE("Taylor constants hold on a dense grid and balls are disjoint") {
  for (const char* name : {"sin", "cos", "sin3", "cos2"}) {
    const auto u = ShearProfile::preset(name);
    const auto cps = critical_points(u);
    for (std::size_t i = 0; i < cps.size(); ++i) {
      const auto& cp = cps[i];
      CHECK(cp.radius > 0.0);
      CHECK(cp.c1 > 0.0);
      CHECK(cp.c3 > 0.0);
      CHECK(cp.c1 <= cp.c2);
      CHECK(cp.c3 <= cp.c4);
      for (int j = -5000; j <= 5000; ++j) {
        if (j == 0) continue;
        const double dz = cp.radius * j / 5000.0;
        const double a = std::abs(dz);
        const double d1 = std::abs(u.evaluate(cp.location + dz, 1));
        const double d2 = std::abs(u.evaluate(cp.location + dz, 2));
        REQUIRE(d1 >= cp.c1 * std::pow(a, cp.order));
        REQUIRE(d1 <= cp.c2 * std::pow(a, cp.order));
        REQUIRE(d2 >= cp.c3 * std::pow(a, cp.order - 1));
        REQUIRE(d2 <= cp.c4 * std::pow(a, cp.order - 1));
      }
      for (std::size_t j = i + 1; j < cps.size(); ++j) {
        CHECK(torus_distance(cp.location, cps[j].location) > cp.radius + cps[j].radius);
      }
    }
  }
}

TEST_CASE("no roots are missed on random profiles") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<TrigMode> modes;
    for (int m = 1; m <= 4; ++m) modes.push_back({m, coef(rng), coef(rng)});
    const auto u = ShearProfile::from_modes(modes);
    const auto cps = critical_points(u);
    // Every sign change of u' on a fine grid lies next to a located root.
    const int n = 1 << 12;
    for (int j = 0; j < n; ++j) {
      const double a = 2 * pi * j / n;
      const double b = 2 * pi * (j + 1) / n;
      if (u.evaluate(a, 1) * u.evaluate(b, 1) < 0.0) {
        bool near = false;
        for (const auto& cp : cps) near = near || torus_distance(cp.location, 0.5 * (a + b)) < 2 * pi / n;
        CHECK(near);
      }
    }
    for (const auto& cp : cps) CHECK(std::abs(u.evaluate(cp.location, 1)) < 1e-9);
  }
}

TEST_CASE("presets are listed in a stable order with n0 in the description") {
  const auto a = list_presets();
  const auto b = list_presets();
  REQUIRE(a.size() == b.size());
  std::vector<std::string> names;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].name == b[i].name);
    names.push_back(a[i].name);
  }
  CHECK(names == std::vector<std::string>{"sin", "sin3", "cos", "cos2", "linear"});
  CHECK(a[0].description.find("n0 = 1") != std::string::npos);
  CHECK(a[1].description.find("n0 = 2") != std::string::npos);
  CHECK(a[2].description.find("n0 = 1") != std::string::npos);
}
