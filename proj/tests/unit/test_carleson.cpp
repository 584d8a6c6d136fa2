#include <doctest.h>

#include <cmath>

#include "sqfn/carleson.hpp"
#include "sqfn/errors.hpp"
#include "sqfn/kernel_io.hpp"

using namespace sqfn;

TEST_CASE("constant field gives log-scale Carleson values per cube") {
  Grid g(Box::interval(-4.0, 4.0), 1.0 / 32);
  ScaleGrid sg(1.0 / 64, 2.0, 4);
  CarlesonField f = theta_one_field(ThetaOperator(meanzero_spec(1, 2, 0.5), g), sg);
  CHECK(f.x_constant);
  CarlesonReport c = carleson_constant(f, CubeFamily::dyadic(g.box(), 0, 3));
  REQUIRE(c.cubes.size() == 15);
  // F = 1/4 and sum_{t_j <= l} w_j = ln(min(l, 2) * 64) for dyadic l.
  for (const CubeValue& v : c.cubes) {
    double ref = 0.25 * std::log(std::min(v.cube.side, 2.0) * 64.0);
    CHECK(v.value == doctest::Approx(ref).epsilon(1e-13));
  }
  CHECK(c.supremum == doctest::Approx(0.25 * std::log(128.0)).epsilon(1e-13));
  CarlesonReport s = strong_carleson_constant(f, CubeFamily::dyadic(g.box(), 0, 3));
  CHECK(s.supremum == doctest::Approx(c.supremum).epsilon(1e-13));
  REQUIRE(s.point.has_value());
}

TEST_CASE("pure mean-zero operators carry no Carleson mass") {
  Grid g(Box::interval(-4.0, 4.0), 1.0 / 32);
  CarlesonField f = theta_one_field(ThetaOperator(meanzero_spec(1, 1), g), ScaleGrid(0.125, 1.0, 4));
  CHECK(carleson_constant(f, CubeFamily::dyadic(g.box(), 0, 2)).supremum < 1e-24);
}

TEST_CASE("make_field validates its input") {
  Grid g(Box::interval(0.0, 1.0), 0.25);
  ScaleGrid sg(0.5, 1.0, 1);
  ScaleField bad{sg, {SampledFunction::constant(g, -1.0)}};
  CHECK_THROWS_AS(make_field(bad, NodeMask(g.size(), true)), ContractError);
  ScaleField good{sg, {SampledFunction::constant(g, 1.0)}};
  CHECK_NOTHROW(make_field(good, NodeMask(g.size(), true)));
  CHECK_THROWS(make_field(good, NodeMask(g.size() + 1, true)));
}

TEST_CASE("cubes must stay inside the certified region") {
  Grid g(Box::interval(-1.0, 1.0), 0.25);
  ScaleGrid sg(0.5, 1.0, 1);
  ScaleField sf{sg, {SampledFunction::constant(g, 1.0)}};
  NodeMask m = guard_band(g, 0.5);
  CarlesonField f = make_field(sf, m);
  CHECK_THROWS_AS(carleson_constant(f, CubeFamily::dyadic(g.box(), 0, 0)), ContractError);
  CHECK_NOTHROW(carleson_constant(f, CubeFamily::from_list({Box::interval(-0.5, 0.5)})));
}

TEST_CASE("tents over unions of intervals") {
  Tent t({Box::interval(0.0, 4.0)});
  CHECK(t.contains({2.0, 0.0}, 1.0));
  CHECK(t.contains({2.0, 0.0}, 2.0));
  CHECK_FALSE(t.contains({2.0, 0.0}, 2.5));
  CHECK_FALSE(t.contains({5.0, 0.0}, 0.1));

  Tent u({Box::interval(0.0, 1.0), Box::interval(2.0, 3.0)});
  CHECK(u.contains({0.5, 0.0}, 0.4));
  CHECK_FALSE(u.contains({1.5, 0.0}, 0.1));
  CHECK_FALSE(u.contains({1.0, 0.0}, 1.5));

  Tent v({Box::interval(0.0, 1.0), Box::interval(1.0, 2.0)});
  CHECK(v.contains({1.0, 0.0}, 0.9));
}

TEST_CASE("tent containment in two dimensions") {
  // L-shaped set: [0,2]^2 minus [1,2]x[1,2].
  Tent t({Box::square(0.0, 0.0, 1.0), Box::square(1.0, 0.0, 1.0), Box::square(0.0, 1.0, 1.0)});
  CHECK(t.contains({0.5, 0.5}, 0.5));
  CHECK(t.contains({1.0, 0.5}, 0.5));
  CHECK_FALSE(t.contains({1.5, 1.5}, 0.1));
  CHECK_FALSE(t.contains({0.9, 0.9}, 0.3));
}

TEST_CASE("closed-form bound constants") {
  std::vector<double> ap{2.0, 3.0}, ps{2.0, 4.0};
  // r = (1, 1/3).
  double ref = (1.0 + std::pow(2.0, 2.0)) * (1.0 + std::pow(3.0, 1.5)) + 4.0 * 2.0 * std::cbrt(3.0);
  CHECK(bound_constant_43(ap, ps, 4.0, 2) == doctest::Approx(ref).epsilon(1e-15));
  std::vector<double> qs{2.0, 3.0};
  // s = (1, 1/2).
  double c0 = (2.0 * 4.0) * (2.0 * std::pow(2.0, 1.5)) + 2.0 * std::sqrt(2.0);
  CHECK(c0_of_B(2.0, qs, 1.0, 2) == doctest::Approx(c0).epsilon(1e-15));
  CHECK_THROWS_AS(c0_of_B(1.0, qs, 1.0, 2), ParameterError);
}

TEST_CASE("two-cube pairs must be nested") {
  Grid g(Box::interval(-4.0, 4.0), 1.0 / 32);
  ThetaOperator op(bump_spec(1, 1), g);
  std::vector<CubePair> pairs{{Box::interval(0.0, 0.25), Box::interval(0.5, 1.0)}};
  CHECK_THROWS_AS(two_cube_constant(op, pairs, ScaleGrid(1.0 / 16, 1.0, 2)), ContractError);
}

TEST_CASE("two-cube constant of a convolution operator") {
  // On R the difference is phi_t * chi_(2Q \ 2R), which is positive once t
  // exceeds the gap l(R)/2 between R and 2Q \ 2R.
  Grid g(Box::interval(-4.0, 4.0), 1.0 / 32);
  ThetaOperator op(bump_spec(1, 1), g);
  std::vector<CubePair> pairs{{Box::interval(0.0, 0.25), Box::interval(0.0, 1.0)}};
  CarlesonReport r = two_cube_constant(op, pairs, ScaleGrid(1.0 / 16, 1.0, 2));
  CHECK(std::isfinite(r.supremum));
  CHECK(r.supremum > 0.0);
}
