#include <doctest.h>

#include <cmath>

#include "sqfn/errors.hpp"
#include "sqfn/grid.hpp"

using namespace sqfn;

namespace {

// Plain double loop, no FFT, no padding logic.
std::vector<double> direct_1d(const std::vector<double>& f, const std::vector<double>& k, double h) {
  const long nf = static_cast<long>(f.size()), nk = static_cast<long>(k.size()), c = nk / 2;
  std::vector<double> out(f.size(), 0.0);
  for (long i = 0; i < nf; ++i)
    for (long j = 0; j < nf; ++j) {
      long d = i - j + c;
      if (d >= 0 && d < nk) out[static_cast<std::size_t>(i)] += h * f[static_cast<std::size_t>(j)] * k[static_cast<std::size_t>(d)];
    }
  return out;
}

}  // namespace

TEST_CASE("grid layout and node lookup") {
  Grid g(Box::interval(-1.0, 1.0), 0.25);
  CHECK(g.per_axis() == 9);
  CHECK(g.size() == 9);
  CHECK(g.node(0)[0] == -1.0);
  CHECK(g.node(8)[0] == 1.0);
  CHECK(g.locate({0.5, 0.0}).value() == 6);
  CHECK_FALSE(g.locate({0.1, 0.0}).has_value());
  CHECK(g.nearest({0.1, 0.0}) == 4);
  CHECK(g.nearest({-7.0, 0.0}) == 0);
  CHECK(g.weight(0) == doctest::Approx(0.125));
  CHECK(g.weight(3) == doctest::Approx(0.25));

  Grid g2(Box::square(0.0, 0.0, 1.0), 0.5);
  CHECK(g2.size() == 9);
  CHECK(g2.node(g2.index(1, 2))[0] == 0.5);
  CHECK(g2.node(g2.index(1, 2))[1] == 1.0);
  CHECK(g2.weight(g2.index(0, 0)) == doctest::Approx(0.0625));
}

TEST_CASE("grid rejects bad spacings") {
  CHECK_THROWS_AS(Grid(Box::interval(0.0, 1.0), 0.3), ConfigError);
  CHECK_THROWS_AS(Grid(Box::interval(0.0, 1.0), -0.5), ConfigError);
  CHECK_THROWS_AS(Grid(Box::interval(0.0, 1.0), 1e-12), CapacityError);
  SampledFunction f(Grid(Box::interval(0.0, 1.0), 0.25));
  CHECK_THROWS_AS(f.at({0.3, 0.0}), ConfigError);
}

TEST_CASE("trapezoid rule on x^2") {
  // h (0/2 + 1/16 + 4/16 + 9/16 + 1/2) with h = 1/4.
  SampledFunction f = sample(Box::interval(0.0, 1.0), 0.25, [](const Point& x) { return x[0] * x[0]; });
  CHECK(integrate(f) == doctest::Approx(0.34375).epsilon(1e-15));
}

TEST_CASE("scale grid realises dt/t by the midpoint rule in log t") {
  ScaleGrid sg(0.25, 4.0, 8);
  REQUIRE(sg.size() == 32);
  for (double w : sg.weights()) CHECK(w == doctest::Approx(std::log(2.0) / 8).epsilon(1e-15));
  CHECK(sg.nodes()[0] == doctest::Approx(0.25 * std::pow(2.0, 1.0 / 16)).epsilon(1e-15));
  CHECK(sg.nodes()[31] == doctest::Approx(4.0 * std::pow(2.0, -1.0 / 16)).epsilon(1e-15));
  std::vector<double> c(sg.size(), 2.0);
  CHECK(scale_integrate(c, sg) == doctest::Approx(2.0 * std::log(16.0)).epsilon(1e-15));

  ScaleGrid d = ScaleGrid::dyadic(0.1, 2.0);
  REQUIRE(d.size() == 5);
  CHECK(d.nodes()[0] == 0.125);
  CHECK(d.nodes()[4] == 2.0);
  CHECK_THROWS_AS(ScaleGrid(1.0, 0.5, 4), ConfigError);
}

TEST_CASE("convolution matches a direct double loop") {
  Grid g(Box::interval(-2.0, 2.0), 0.125);
  SampledFunction f = sample(g, [](const Point& x) { return std::sin(3.0 * x[0]) + x[0] * x[0]; });
  Grid kg(Box::interval(-0.5, 0.5), 0.125);
  SampledFunction k = sample(kg, [](const Point& x) { return 1.0 - std::abs(x[0]); });
  std::vector<double> fv(f.values().begin(), f.values().end()), kv(k.values().begin(), k.values().end());
  std::vector<double> ref = direct_1d(fv, kv, 0.125);
  SampledFunction a = convolve(f, k, ConvolutionMethod::fourier);
  SampledFunction b = convolve(f, k, ConvolutionMethod::direct);
  for (std::size_t i = 0; i < ref.size(); ++i) {
    CHECK(a[i] == doctest::Approx(ref[i]).epsilon(1e-12));
    CHECK(b[i] == doctest::Approx(ref[i]).epsilon(1e-14));
  }
  std::vector<std::size_t> nodes{0, 7, 32};
  std::vector<double> at = convolve_at(f, k, nodes);
  for (std::size_t j = 0; j < nodes.size(); ++j) CHECK(at[j] == doctest::Approx(ref[nodes[j]]).epsilon(1e-14));
}

TEST_CASE("two-dimensional convolution against direct sums") {
  Grid g(Box::square(-1.0, -1.0, 2.0), 0.25);
  SampledFunction f = sample(g, [](const Point& x) { return std::cos(x[0]) * (1.0 + x[1]); });
  SampledFunction k = sample(Box::square(-0.5, -0.5, 1.0), 0.25, [](const Point& x) { return std::exp(-x[0] * x[0] - 2.0 * x[1] * x[1]); });
  SampledFunction a = convolve(f, k);
  SampledFunction b = convolve(f, k, ConvolutionMethod::direct);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
}

TEST_CASE("indicator sampling uses cell fractions") {
  Grid g(Box::interval(0.0, 2.0), 0.5);
  SampledFunction chi = sample_indicator(g, Box::interval(0.6, 1.5));
  // Cells [x - 1/4, x + 1/4] at x = 0, .5, 1, 1.5, 2.
  CHECK(chi[0] == 0.0);
  CHECK(chi[1] == doctest::Approx(0.3));
  CHECK(chi[2] == doctest::Approx(1.0));
  CHECK(chi[3] == doctest::Approx(0.5));
  CHECK(chi[4] == 0.0);
}

TEST_CASE("guard bands and masks") {
  Grid g(Box::interval(-1.0, 1.0), 0.25);
  NodeMask m = guard_band(g, 0.5);
  CHECK(m.count() == 5);
  CHECK_FALSE(m[1]);
  CHECK(m[2]);
  CHECK_THROWS_AS(guard_band(g, 1.5), DegenerateDomainError);
  NodeMask b = box_mask(g, Box::interval(0.0, 0.5));
  CHECK(b.count() == 3);
  CHECK((m & b).count() == 3);
}

TEST_CASE("dyadic cube families") {
  CHECK(CubeFamily::dyadic(Box::interval(0.0, 1.0), 0, 2).cubes().size() == 7);
  CHECK(CubeFamily::dyadic(Box::square(0.0, 0.0, 1.0), 0, 2).cubes().size() == 21);
  auto fam = CubeFamily::dyadic(Box::interval(0.0, 1.0), 1, 1);
  CHECK(fam.cubes()[0] == Box::interval(0.0, 0.5));
  CHECK(fam.cubes()[1] == Box::interval(0.5, 1.0));
  Grid g(Box::interval(0.0, 1.0), 0.25);
  CHECK_THROWS_AS(CubeFamily::centered(g, 2).cubes(), ContractError);
}
