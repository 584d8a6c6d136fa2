#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "sqfn/errors.hpp"
#include "sqfn/kernel_io.hpp"
#include "sqfn/kernels.hpp"

using namespace sqfn;

namespace {

const double kPi = 3.14159265358979323846;

double bump_1d(double x) {
  if (std::abs(x) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - x * x));
}

// Unnormalised bump integral, by adaptive quadrature.
double bump_1d_integral() {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(bump_1d, -1.0, 1.0, 20, 1e-14);
}

// g = phi * phi in one dimension, by quadrature.
double g_oracle(double r) {
  double c = 1.0 / bump_1d_integral();
  auto f = [&](double y) { return c * c * bump_1d(y) * bump_1d(r - y); };
  double lo = std::max(-1.0, r - 1.0), hi = std::min(1.0, r + 1.0);
  if (hi <= lo) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 20, 1e-14);
}

}  // namespace

TEST_CASE("standard bump is normalised") {
  CHECK(bump_constant(1) == doctest::Approx(1.0 / bump_1d_integral()).epsilon(1e-12));
  ProfilePtr phi = standard_bump(1);
  CHECK(phi->mass() == doctest::Approx(1.0));
  CHECK(phi->eval({0.3, 0.0}) == doctest::Approx(bump_1d(0.3) / bump_1d_integral()).epsilon(1e-12));
  SampledFunction s = phi->sample_dilated(0.1, 1.0 / 64);
  double sum = 0.0;
  for (double v : s.values()) sum += v;
  CHECK(sum / 64 == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("ex38 psi and its transform") {
  ProfilePtr psi = ex38_psi();
  CHECK(psi->eval({0.5, 0.0}) == 1.0);
  CHECK(psi->eval({-0.5, 0.0}) == -1.0);
  CHECK(psi->mass() == 0.0);
  // 2 (1 - cos pi) / (i pi) = -4i/pi.
  std::complex<double> v = ex38_psihat(kPi);
  CHECK(v.real() == doctest::Approx(0.0));
  CHECK(v.imag() == doctest::Approx(-4.0 / kPi).epsilon(1e-15));
  CHECK(std::abs(ex38_psihat(0.0)) == 0.0);
}

TEST_CASE("Q_t b for ex38 at t = 3/4, x = -1/2") {
  // (1/t) int psi((x - y)/t) chi_[0,1](y) dy: only y in (x, x + t) meets [0, 1]
  // and psi = -1 there, giving -(x + t)/t.
  Grid g(Box::interval(-2.0, 2.0), 1.0 / 256);
  Multiplier q = Multiplier::q_t_b(ex38_psi(), indicator_profile(Box::interval(0.0, 1.0)));
  CHECK_FALSE(q.x_constant);
  CHECK(q(g, 0.75).at({-0.5, 0.0}) == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("derived family: Psi = div(x g) and mean zero") {
  DerivedFamily fam = derived_family(1);
  CHECK(fam.factorization_sign == -1);
  CHECK(fam.psi->mass() == 0.0);
  // d/dx (x g(x)) by central differences of the quadrature oracle.
  for (double x : {0.1, 0.4, 0.9, 1.3}) {
    const double e = 1e-4;
    double ref = ((x + e) * g_oracle(x + e) - (x - e) * g_oracle(x - e)) / (2 * e);
    CHECK(fam.psi->eval({x, 0.0}) == doctest::Approx(ref).epsilon(1e-6));
    CHECK(fam.g->eval({x, 0.0}) == doctest::Approx(g_oracle(x)).epsilon(1e-8));
  }
  // Psi1 = -2 phi', Psi2 = x phi.
  double x = 0.37;
  CHECK(fam.psi2[0]->eval({x, 0.0}) == doctest::Approx(x * fam.phi->eval({x, 0.0})));
  const double e = 1e-6;
  double dphi = (fam.phi->eval({x + e, 0.0}) - fam.phi->eval({x - e, 0.0})) / (2 * e);
  CHECK(fam.psi1[0]->eval({x, 0.0}) == doctest::Approx(-2.0 * dphi).epsilon(1e-6));
}

TEST_CASE("derived exponents for N = 3, gamma = 1, n = 1") {
  DerivedExponents e = derived_exponents(3.0, 1.0, 1);
  CHECK(e.eta == doctest::Approx(0.25));
  CHECK(e.gamma_prime == doctest::Approx(0.25));
  CHECK(e.N_prime == doctest::Approx(2.0));
  CHECK_THROWS_AS(derived_exponents(1.0, 1.0, 1), ParameterError);
  CHECK_THROWS_AS(derived_exponents(3.0, 1.5, 1), ParameterError);
}

TEST_CASE("validators are monotone in the plan level") {
  MLKernelSpec spec = meanzero_spec(1, 2);
  double prev_s = 0.0, prev_h = 0.0;
  for (int level = 0; level <= 2; ++level) {
    SamplePlan plan{Grid(Box::interval(-4.0, 4.0), 1.0 / 64), ScaleGrid(0.125, 1.0, 2), level, 32, 64, 4.0, 1.0};
    double s = validate_size(spec, plan).constant, h = validate_holder(spec, plan).constant;
    CHECK(std::isfinite(s));
    CHECK(s >= prev_s);
    CHECK(h >= prev_h);
    prev_s = s;
    prev_h = h;
  }
}

TEST_CASE("Fourier admissibility") {
  std::vector<double> xis{1.0, 3.0};
  // int_0^inf 4 (1 - cos u)^2 / u^3 du = 4 ln 2.
  double v = fourier_admissibility(*ex38_psi(), xis, ScaleGrid(std::ldexp(1.0, -12), std::ldexp(1.0, 12), 32));
  CHECK(v == doctest::Approx(4.0 * std::log(2.0)).epsilon(2e-3));
  CHECK_THROWS_AS(fourier_admissibility(*standard_bump(1), xis, ScaleGrid(0.5, 2.0, 4)), ContractError);
}

TEST_CASE("sampled transform of ex38 psi") {
  SampledFunction s = sample_profile(*ex38_psi(), Grid(Box::interval(-2.0, 2.0), 1.0 / 1024));
  for (double xi : {-17.0, -2.0, 0.5, 3.0, 19.5})
    CHECK(std::abs(dtft(s, xi) - ex38_psihat(xi)) < 1e-3);
}

TEST_CASE("kernel specs validate their fields") {
  CHECK_THROWS_AS(ex37_spec(1, 1, 2.5, BetaChoice::one), ParameterError);
  MLKernelSpec s = meanzero_spec(1, 2, 0.5);
  CHECK(s.is_product());
  CHECK(s.terms.size() == 2);
  CHECK(s.t_constant);
  CHECK(meanzero_spec(2, 2).N == 3.0);
  CHECK(bump_spec(2, 1).N == 3.0);
}
