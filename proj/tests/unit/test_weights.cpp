#include <doctest.h>

#include <cmath>

#include "sqfn/errors.hpp"
#include "sqfn/weights.hpp"

using namespace sqfn;

namespace {

// Value on the cubes [0, r]: (avg |x|^a)(avg |x|^(-a/(p-1)))^(p-1), which
// does not depend on r; cubes away from the origin give less.
double power_ap_1d(double a, double p) {
  double s = -a / (p - 1.0);
  return 1.0 / (1.0 + a) * std::pow(1.0 / (1.0 + s), p - 1.0);
}

}  // namespace

TEST_CASE("A_p constant of constants and powers") {
  CubeFamily fam = CubeFamily::dyadic(Box::interval(-1.0, 1.0), 0, 8);
  CHECK(ap_constant(WeightFn::constant(1, 5.0), 3.0, fam).value == 1.0);
  ApEstimate e = ap_constant(WeightFn::power(1, 0.5), 2.0, fam);
  CHECK(e.value == doctest::Approx(power_ap_1d(0.5, 2.0)).epsilon(1e-13));
  CHECK(e.value == doctest::Approx(4.0 / 3.0).epsilon(1e-13));
  CHECK(e.cube.lo(0) * e.cube.hi(0) == 0.0);
  CHECK(ap_constant(WeightFn::power(1, -0.4), 1.5, fam).value ==
        doctest::Approx(power_ap_1d(-0.4, 1.5)).epsilon(1e-13));
  CHECK_THROWS_AS(ap_constant(WeightFn::power(1, 0.5), 1.0, fam), ParameterError);
}

TEST_CASE("A_p is monotone under family enlargement and scale invariant") {
  WeightFn w = WeightFn::from_rule(1, "exp", [](const Point& x) { return std::exp(x[0]); });
  double small = ap_constant(w, 2.0, CubeFamily::dyadic(Box::interval(-1.0, 1.0), 2, 5)).value;
  double large = ap_constant(w, 2.0, CubeFamily::dyadic(Box::interval(-1.0, 1.0), 0, 5)).value;
  CHECK(large >= small);
  CHECK(small > 1.0);
  CHECK(ap_constant(w.scaled(9.0), 2.0, CubeFamily::dyadic(Box::interval(-1.0, 1.0), 0, 5)).value == large);
}

TEST_CASE("A_p duality") {
  CubeFamily fam = CubeFamily::dyadic(Box::interval(-1.0, 1.0), 0, 8);
  const double p = 4.0, pp = 4.0 / 3.0;
  WeightFn w = WeightFn::power(1, 1.2);
  double lhs = ap_constant(w.pow(1.0 - pp), pp, fam).value;
  double rhs = std::pow(ap_constant(w, p, fam).value, pp - 1.0);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("two-dimensional power weights") {
  WeightFn w = WeightFn::power(2, 0.5);
  Box q = Box::square(0.0, 0.0, 1.0);
  // int_[0,1]^2 |x|^(1/2) dx by polar split is not elementary; compare the
  // refined quadrature against a fine midpoint sum.
  double mid = 0.0;
  const int n = 800;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double x = (i + 0.5) / n, y = (j + 0.5) / n;
      mid += std::pow(x * x + y * y, 0.25);
    }
  mid /= double(n) * n;
  CHECK(w.shape_integral(q) == doctest::Approx(mid).epsilon(1e-6));
  CHECK_THROWS_AS(WeightFn::power(2, -2.5).shape_integral(q), DegenerateWeightError);
  CHECK(power_weight_in_ap(2, 1.9, 2.0));
  CHECK_FALSE(power_weight_in_ap(2, 2.0, 2.0));
  CHECK_FALSE(power_weight_in_ap(1, -1.0, 3.0));
}

TEST_CASE("weighted norms") {
  Grid g(Box::interval(0.0, 1.0), 1.0 / 64);
  SampledFunction one = SampledFunction::constant(g, 1.0);
  CHECK(weighted_lp_norm(one, one, 2.0) == doctest::Approx(1.0).epsilon(1e-15));
  SampledFunction x = sample(g, [](const Point& p) { return p[0]; });
  // (int_0^1 x^3 * x dx)^(1/3) with the trapezoid rule at h = 1/64 is close to 5^(-1/3).
  CHECK(weighted_lp_norm(x, x, 3.0) == doctest::Approx(std::pow(0.2, 1.0 / 3.0)).epsilon(1e-4));
  CHECK_THROWS_AS(weighted_lp_norm(one, one, 0.0), ParameterError);
  std::vector<double> ps{4.0, 4.0};
  CHECK(holder_index(ps) == 2.0);
  std::vector<double> ps2{2.0, 2.0};
  CHECK(holder_index(ps2) == 1.0);
}

TEST_CASE("union and intersection measures") {
  std::vector<Box> e{Box::interval(0.0, 1.0), Box::interval(0.5, 2.0)};
  CHECK(union_measure(e) == 2.0);
  CHECK(intersection_measure(e, Box::interval(1.5, 3.5)) == 0.5);
  std::vector<Box> s{Box::square(0.0, 0.0, 1.0), Box::square(0.5, 0.5, 1.0)};
  CHECK(union_measure(s) == 1.75);
  CHECK(intersection_measure(s, Box::square(1.0, 0.0, 1.0)) == 0.25);
}

TEST_CASE("CZ decomposition") {
  std::vector<Box> e{Box::interval(0.0, 0.25)};
  std::vector<Box> q = cz_decompose(e, 0.5, Box::interval(0.0, 1.0), 6);
  REQUIRE(q.size() == 1);
  CHECK(q[0] == Box::interval(0.0, 0.25));
  std::vector<Box> e2{Box::interval(0.0, 0.75)};
  std::vector<Box> q2 = cz_decompose(e2, 0.5, Box::interval(0.0, 1.0), 6);
  REQUIRE(q2.size() == 1);
  CHECK(q2[0] == Box::interval(0.0, 1.0));
  CHECK_THROWS_AS(cz_decompose(e, 1.0, Box::interval(0.0, 1.0), 6), ParameterError);
}

TEST_CASE("decay bound for a unit weight") {
  // w = 1, p = 2, d = 1: int (1 + |x|)^-2 dx = 2, of which 2/65 lies beyond
  // |x| = 64, and |B(0, 1)| = 2. The ball is sampled by cell fractions.
  Grid g(Box::interval(-64.0, 64.0), 1.0 / 16);
  Lemma44Result r = lemma44_check(WeightFn::constant(1), 2.0, {0.0, 0.0}, 1.0, g);
  CHECK(r.tail_bound == doctest::Approx(2.0 / 65.0).epsilon(1e-8));
  CHECK(r.norm == doctest::Approx(std::sqrt(2.0)).epsilon(1e-3));
  CHECK(r.ball_norm == doctest::Approx(std::sqrt(2.0)).epsilon(1e-2));
  CHECK(r.ratio_ball == doctest::Approx(1.0).epsilon(1e-2));
  CHECK(r.ratio_maximal <= r.ratio_ball);
}
