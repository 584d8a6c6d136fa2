#include <doctest.h>

#include <cmath>

#include "sqfn/errors.hpp"
#include "sqfn/kernel_io.hpp"
#include "sqfn/operators.hpp"

using namespace sqfn;

namespace {

SampledFunction gaussian(const Grid& g, double c, double s) {
  return sample(g, [=](const Point& x) {
    double u = (x[0] - c) / s;
    return std::exp(-0.5 * u * u);
  });
}

double max_abs_diff(const SampledFunction& a, const SampledFunction& b, const NodeMask& m) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (m[i]) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST_CASE("bump spec reproduces constants away from the boundary") {
  Grid g(Box::interval(-4.0, 4.0), 1.0 / 32);
  ThetaOperator op(bump_spec(1, 2, 3.0), g);
  std::vector<SampledFunction> ones(2, SampledFunction::constant(g, 1.0));
  SampledFunction v = op.apply(0.5, ones);
  NodeMask m = guard_band(g, op.reach(0.5));
  for (std::size_t i = 0; i < v.size(); ++i)
    if (m[i]) CHECK(v[i] == doctest::Approx(3.0).epsilon(1e-13));
  SampledFunction u = op.apply_to_ones(0.5);
  CHECK(u.max_abs() == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("general quadrature agrees with the product path") {
  Grid g(Box::interval(-2.0, 2.0), 1.0 / 16);
  MLKernelSpec spec = ex37_spec(1, 1, 0.5, BetaChoice::rough);
  ThetaOperator prod(spec, g);
  ThetaOperator gen(spec, g, EvalStrategy::general_quadrature);
  std::vector<SampledFunction> fs{gaussian(g, 0.2, 0.5)};
  NodeMask all(g.size(), true);
  CHECK(max_abs_diff(prod.apply(0.25, fs), gen.apply(0.25, fs), all) < 1e-12);
}

TEST_CASE("split_theta leaves a remainder that annihilates constants") {
  Grid g(Box::interval(-4.0, 4.0), 1.0 / 32);
  ThetaOperator op(meanzero_spec(1, 2, 0.5), g);
  auto [R, U] = split_theta(op);
  SampledFunction r1 = R.apply_to_ones(0.5);
  CHECK(r1.max_abs() < 1e-14);
  CHECK(U.apply_to_ones(0.5).max_abs() == doctest::Approx(0.5));
}

TEST_CASE("dyadic maximal function of an indicator") {
  Grid g(Box::interval(-2.0, 2.0), 1.0 / 8);
  SampledFunction chi = sample_indicator(g, Box::interval(0.0, 1.0));
  SampledFunction M = hl_maximal(chi, CubeFamily::dyadic(g.box(), 0, 2));
  // Cube averages are trapezoid sums of the cell-fraction samples, which are
  // 1/2 at the endpoints 0 and 1. x = 1/2: [0,1] gives (1/4 + 7 + 1/4)/8.
  // x = 3/2: [0,2] gives (1/4 + 7 + 1/2)/16. x = -1/2: [-2,2] gives 8/32.
  CHECK(M.at({0.5, 0.0}) == doctest::Approx(0.9375).epsilon(1e-15));
  CHECK(M.at({1.5, 0.0}) == doctest::Approx(0.484375).epsilon(1e-15));
  CHECK(M.at({-0.5, 0.0}) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("log-log slope of a power law") {
  std::vector<double> x{1.0, 2.0, 4.0, 8.0}, y;
  for (double v : x) y.push_back(3.0 * std::pow(v, -1.5));
  CHECK(loglog_slope(x, y) == doctest::Approx(-1.5).epsilon(1e-14));
}

TEST_CASE("square function: sign, sub-ranges and Plancherel for g_psi") {
  Grid g(Box::interval(-8.0, 8.0), 1.0 / 32);
  std::vector<SampledFunction> fs{gaussian(g, 0.0, 1.0), gaussian(g, 1.0, 0.5)};
  ScaleGrid sg(1.0 / 16, 1.0, 8);
  MLKernelSpec spec = meanzero_spec(1, 2);
  MLKernelSpec neg = spec;
  for (auto& t : neg.terms) t.coeff = -t.coeff;
  auto S = square_function(ThetaOperator(spec, g), fs, sg);
  auto Sn = square_function(ThetaOperator(neg, g), fs, sg);
  CHECK(max_abs_diff(S.S, Sn.S, S.mask) == 0.0);
  auto Ssub = square_function(ThetaOperator(spec, g), fs, sg.subset(4, 20), 2.0);
  auto Sfull = square_function(ThetaOperator(spec, g), fs, sg, 2.0);
  for (std::size_t i = 0; i < Sfull.S.size(); ++i) CHECK(Ssub.S[i] <= Sfull.S[i]);
}

TEST_CASE("reproducing residual decreases") {
  Grid g(Box::interval(-32.0, 32.0), 1.0 / 16);
  ThetaOperator op(meanzero_spec(1, 2), g);
  DerivedFamily fam = derived_family(1);
  std::vector<SampledFunction> fs{gaussian(g, 0.0, 1.0), gaussian(g, 0.5, std::sqrt(2.0))};
  NodeMask m = guard_band(g, 4.0);
  double r1 = reproducing_residual(op, fam, fs, 1.0, 0.25, m);
  double r2 = reproducing_residual(op, fam, fs, 1.0, 1.0 / 16, m);
  CHECK(r2 < r1);
  CHECK(r2 / l2_norm(op.apply(1.0, fs), m) < 0.05);
}

TEST_CASE("Pi decay needs cancellation for s > t") {
  Grid g(Box::interval(-16.0, 16.0), 1.0 / 16);
  ThetaOperator op(bump_spec(1, 1), g);
  DerivedFamily fam = derived_family(1);
  std::vector<SampledFunction> fs{gaussian(g, 0.0, 1.0)};
  CHECK_THROWS_AS(pi_decay_ratio(op, fam, 1, 4.0, 1.0, fs, guard_band(g, 8.0)), ContractError);
}

TEST_CASE("almost orthogonality ratio is dilation invariant") {
  std::vector<double> d{0.0, 1.0, 3.0}, d2{0.0, 2.0, 6.0};
  for (double r : {1.0 / 16, 1.0, 16.0}) {
    double a = almost_orth_ratio(1, 3.0, 3.0, r, 1.0, d);
    double b = almost_orth_ratio(1, 3.0, 3.0, 2.0 * r, 2.0, d2);
    CHECK(std::isfinite(a));
    CHECK(a == doctest::Approx(b).epsilon(1e-10));
  }
}

TEST_CASE("general quadrature is capped") {
  Grid g(Box::square(-8.0, -8.0, 16.0), 1.0 / 16);
  CHECK_THROWS_AS(ThetaOperator(bump_spec(2, 2), g, EvalStrategy::general_quadrature), CapacityError);
}
