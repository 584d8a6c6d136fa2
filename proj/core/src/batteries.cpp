#include <algorithm>
#include <cmath>

#include "sqfn/carleson.hpp"
#include "sqfn/errors.hpp"
#include "sqfn/operators.hpp"
#include "sqfn/suite.hpp"
#include "sqfn/weights.hpp"

namespace sqfn {
namespace {

double p2(int k) { return std::ldexp(1.0, k); }

double max_diff(const SampledFunction& a, const SampledFunction& b, const NodeMask* mask = nullptr) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!mask || (*mask)[i]) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

SampledFunction gaussian(const Grid& g, double c, double s) {
  return sample(g, [=](const Point& x) {
    double u = (x[0] - c) / s;
    return std::exp(-0.5 * u * u);
  });
}

}  // namespace

std::vector<CheckRecord> battery_grid(std::uint64_t seed) {
  std::vector<CheckRecord> out;
  FixtureRng rng(seed);
  Grid g(Box::interval(-4.0, 4.0), 1.0 / 64);
  SampledFunction f = sample_packets(g, random_packets(rng, 3, 2.0, 0.5, 6.0, 0.3, 1.0));
  SampledFunction f2 = sample_packets(g, random_packets(rng, 3, 2.0, 0.5, 6.0, 0.3, 1.0));
  SampledFunction k = standard_bump(1)->sample_dilated(0.5, g.spacing());

  SampledFunction fast = convolve(f, k, ConvolutionMethod::fourier);
  SampledFunction slow = convolve(f, k, ConvolutionMethod::direct);
  out.push_back(absolute_check("grid.convolve.fourier_vs_direct", "FFT convolution equals the direct sum",
                               max_diff(fast, slow), 0.0, 1e-12, Provenance::DERIVED));

  double a = rng.uniform(-2.0, 2.0), b = rng.uniform(-2.0, 2.0);
  SampledFunction lhs = convolve(a * f + b * f2, k);
  SampledFunction rhs = a * convolve(f, k) + b * convolve(f2, k);
  out.push_back(absolute_check("grid.convolve.linearity", "convolution is linear in f", max_diff(lhs, rhs),
                               0.0, 1e-12, Provenance::TRIVIAL));

  SampledFunction kb = sample(g, [](const Point& x) {
    return standard_bump(1)->eval_dilated(0.5, x);
  });
  NodeMask interior = guard_band(g, 0.5);
  out.push_back(absolute_check("grid.convolve.commutes", "convolve(f, k) = convolve(k, f) on the common interior",
                               max_diff(convolve(f, kb), convolve(kb, f), &interior), 0.0, 1e-12,
                               Provenance::TRIVIAL));

  ScaleGrid sg(p2(-7), p2(3), 12);
  std::vector<double> c(sg.size(), 3.7);
  out.push_back(relative_check("grid.scale_integrate.constant", "integral of a constant against dt/t",
                               scale_integrate(c, sg), 3.7 * std::log(p2(10)), 1e-14, Provenance::TRIVIAL));

  const double exact = std::sqrt(3.14159265358979323846) / 2 * (std::erf(2.0) + std::erf(1.0));
  std::vector<double> err;
  for (int k2 = 3; k2 <= 5; ++k2) {
    Grid gi(Box::interval(-1.0, 2.0), p2(-k2));
    err.push_back(std::abs(integrate(sample(gi, [](const Point& x) { return std::exp(-x[0] * x[0]); })) - exact));
  }
  double order = std::log2(err[1] / err[2]);
  out.push_back(custom_check("grid.integrate.order", "trapezoid rule converges at second order", order, 2.0,
                             0.2, Provenance::DERIVED, order >= 1.8));
  return out;
}

std::vector<CheckRecord> battery_kernels(std::uint64_t) {
  std::vector<CheckRecord> out;
  {
    DerivedFamily fam = derived_family(1);
    Grid g(Box::interval(-3.0, 3.0), p2(-9));
    SampledFunction psi = sample_profile(*fam.psi, g);
    SampledFunction q1 = sample_profile(*fam.psi1[0], g);
    SampledFunction q2 = sample_profile(*fam.psi2[0], g);
    double worst = 0.0;
    for (double xi : {0.25, 0.5, 1.0, 2.0, 3.0, 5.0, 8.0})
      worst = std::max(worst, std::abs(std::abs(dtft(q1, xi) * dtft(q2, xi)) - std::abs(dtft(psi, xi))));
    out.push_back(absolute_check("kernels.factorization", "|sum_k Psi1_hat Psi2_hat| = |Psi_hat|", worst, 0.0,
                                 1e-6, Provenance::DERIVED));
  }
  {
    MLKernelSpec spec = meanzero_spec(1, 2);
    std::vector<double> size, holder;
    for (int level = 0; level <= 2; ++level) {
      SamplePlan plan{Grid(Box::interval(-4.0, 4.0), 1.0 / 64), ScaleGrid(0.125, 1.0, 2), level, 64, 64, 4.0, 1.0};
      size.push_back(validate_size(spec, plan).constant);
      holder.push_back(validate_holder(spec, plan).constant);
    }
    auto settle = [](const std::vector<double>& v) {
      bool mono = v[1] >= v[0] && v[2] >= v[1];
      double change = (v[2] - v[1]) / v[2];
      return std::pair{mono && std::isfinite(v[2]), change};
    };
    auto [ms, cs] = settle(size);
    auto [mh, ch] = settle(holder);
    out.push_back(custom_check("kernels.validate_size", "size constant nondecreasing and settled under refinement",
                               cs, 0.0, 0.10, Provenance::DERIVED, ms && cs <= 0.10));
    out.push_back(custom_check("kernels.validate_holder",
                               "regularity constant nondecreasing and settled under refinement", ch, 0.0, 0.10,
                               Provenance::DERIVED, mh && ch <= 0.10));
  }
  {
    std::vector<double> xis{1.0, 2.0, 5.0};
    double v = fourier_admissibility(*ex38_psi(), xis, ScaleGrid(p2(-10), p2(10), 16));
    out.push_back(relative_check("kernels.admissibility", "integral of |psi_hat(t xi)|^2 dt/t = 4 ln 2", v,
                                 4.0 * std::log(2.0), 1e-2, Provenance::DERIVED));
  }
  return out;
}

std::vector<CheckRecord> battery_operators(std::uint64_t seed) {
  std::vector<CheckRecord> out;
  Grid g(Box::interval(-32.0, 32.0), 1.0 / 16);
  ThetaOperator op(meanzero_spec(1, 2), g);
  DerivedFamily fam = derived_family(1);
  std::vector<SampledFunction> fs{gaussian(g, 0.0, 1.0), gaussian(g, 0.5, std::sqrt(2.0))};
  {
    NodeMask mask = guard_band(g, 4.0);
    double base = l2_norm(op.apply(1.0, fs), mask);
    std::vector<double> rel;
    for (double eps : {0.25, 1.0 / 16, 1.0 / 64}) rel.push_back(reproducing_residual(op, fam, fs, 1.0, eps, mask) / base);
    out.push_back(custom_check("operators.reproducing", "reproducing residual decreases as eps -> 0", rel.back(),
                               0.05, 0.0, Provenance::DERIVED, strictly_decreasing(rel) && rel.back() <= 0.05));
  }
  {
    NodeMask mid = guard_band(g, 16.0);
    double gp = derived_exponents(op.spec().N, op.spec().gamma, 1).gamma_prime;
    double slope = INFINITY;
    for (int j : {1, 2}) slope = std::min(slope, pi_decay_slope(op, fam, j, 1.0, fs, mid, 6, true));
    out.push_back(custom_check("operators.pi_decay", "Theta_t Pi_{j,s} decays like min(s/t, t/s)^gamma'", slope,
                               0.8 * gp, 0.0, Provenance::DERIVED, slope >= 0.8 * gp));
  }
  {
    std::vector<double> d{0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0}, d4;
    for (double x : d) d4.push_back(4.0 * x);
    double worst = 0.0;
    bool finite = true;
    for (int n : {1, 2})
      for (int k = -6; k <= 6; k += (n == 1 ? 1 : 6)) {
        double a = almost_orth_ratio(n, 3.0, 3.0, p2(k), 1.0, d);
        double b = almost_orth_ratio(n, 3.0, 3.0, 4.0 * p2(k), 4.0, d4);
        finite = finite && std::isfinite(a) && std::isfinite(b);
        worst = std::max(worst, std::abs(a - b) / a);
      }
    out.push_back(custom_check("operators.almost_orth", "almost orthogonality ratio finite and dilation invariant",
                               worst, 0.0, 1e-6, Provenance::DERIVED, finite && worst <= 1e-6));
  }
  {
    FixtureRng rng(seed);
    Grid gs(Box::interval(-8.0, 8.0), 1.0 / 32);
    ThetaOperator small(meanzero_spec(1, 2), gs);
    auto pk = [&] { return sample_packets(gs, random_packets(rng, 2, 2.0, 0.5, 4.0, 0.4, 1.0)); };
    SampledFunction f1 = pk(), f2 = pk(), h2 = pk();
    double a = rng.uniform(-2.0, 2.0), b = rng.uniform(-2.0, 2.0);
    std::vector<SampledFunction> comb{a * f1 + b * f2, h2}, x1{f1, h2}, x2{f2, h2};
    SampledFunction lhs = small.apply(0.5, comb);
    SampledFunction rhs = a * small.apply(0.5, x1) + b * small.apply(0.5, x2);
    out.push_back(absolute_check("operators.multilinear", "Theta_t is linear in each slot", max_diff(lhs, rhs), 0.0,
                                 1e-12, Provenance::TRIVIAL));

    ScaleGrid sg(p2(-5), 1.0, 8);
    MLKernelSpec neg = meanzero_spec(1, 2);
    for (ProductTerm& t : neg.terms) t.coeff = -t.coeff;
    SquareFunctionResult S = square_function(small, x1, sg);
    SquareFunctionResult Sn = square_function(ThetaOperator(neg, gs), x1, sg);
    out.push_back(absolute_check("operators.sign", "square function insensitive to the kernel sign",
                                 max_diff(S.S, Sn.S), 0.0, 1e-14, Provenance::TRIVIAL));

    SquareFunctionResult Ssub = square_function(small, x1, sg.subset(8, 24), 4.0);
    SquareFunctionResult Sfull = square_function(small, x1, sg, 4.0);
    double excess = 0.0;
    for (std::size_t i = 0; i < Sfull.S.size(); ++i) excess = std::max(excess, Ssub.S[i] - Sfull.S[i]);
    out.push_back(custom_check("operators.scale_monotone", "square function over a sub-range of scales is smaller",
                               excess, 0.0, 0.0, Provenance::TRIVIAL, excess <= 0.0));
  }
  return out;
}

std::vector<CheckRecord> battery_weights(std::uint64_t seed) {
  std::vector<CheckRecord> out;
  const Box root = Box::interval(-1.0, 1.0);
  {
    ApEstimate one = ap_constant(WeightFn::constant(1, 3.0), 2.0, CubeFamily::dyadic(root, 0, 10));
    out.push_back(absolute_check("weights.ap.constant", "[c]_{A_p} = 1", one.value, 1.0, 0.0, Provenance::TRIVIAL));
  }
  {
    CubeFamily fam = CubeFamily::dyadic(root, 0, 10);
    WeightFn w = WeightFn::power(1, 0.5);
    double a = ap_constant(w, 2.0, fam).value, b = ap_constant(w.scaled(7.3), 2.0, fam).value;
    out.push_back(absolute_check("weights.ap.scale_invariance", "[c w]_{A_p} = [w]_{A_p}", b, a, 0.0,
                                 Provenance::TRIVIAL));
  }
  {
    WeightFn w = WeightFn::power(1, 0.5);
    double d12 = ap_constant(w, 2.0, CubeFamily::dyadic(root, 0, 12)).value;
    double d14 = ap_constant(w, 2.0, CubeFamily::dyadic(root, 0, 14)).value;
    out.push_back(relative_check("weights.ap.depth", "[|x|^(1/2)]_{A_2} stable in the dyadic depth", d14, d12,
                                 0.05, Provenance::DERIVED));
  }
  {
    const double p = 3.0, pp = 1.5;
    CubeFamily fam = CubeFamily::dyadic(root, 0, 10);
    WeightFn w = WeightFn::power(1, 0.5);
    double lhs = ap_constant(w.pow(1.0 - pp), pp, fam).value;
    double rhs = std::pow(ap_constant(w, p, fam).value, pp - 1.0);
    out.push_back(relative_check("weights.ap.duality", "[w^(1-p')]_{A_p'} = [w]_{A_p}^(p'-1)", lhs, rhs, 1e-12,
                                 Provenance::DERIVED));
  }
  {
    FixtureRng rng(seed);
    int failures = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      int dim = trial < 50 ? 1 : 2;
      Box box = dim == 1 ? Box::interval(-4.0, 4.0) : Box::square(-4.0, -4.0, 8.0);
      std::vector<Box> set;
      long count = rng.integer(1, 4);
      for (long k = 0; k < count; ++k) {
        long side = rng.integer(1, 24);
        double x = rng.integer(-64, 64 - side) / 16.0, y = rng.integer(-64, 64 - side) / 16.0;
        set.push_back(dim == 1 ? Box::interval(x, x + side / 16.0) : Box::square(x, y, side / 16.0));
      }
      std::vector<Box> cubes = cz_decompose(set, 0.5, box, 7);
      double covered = 0.0, total = 0.0, mass = 0.0;
      for (const Box& b : set) {
        covered += intersection_measure(cubes, b);
        total += b.volume();
      }
      for (const Box& q : cubes) mass += q.volume();
      double e = union_measure(set);
      bool ok = std::abs(covered - total) <= 1e-12 * total && mass <= 2.0 * e;
      if (!ok) ++failures;
      worst = std::max(worst, mass / e);
    }
    out.push_back(custom_check("weights.cz", "CZ cubes cover E with total measure at most 2|E|", worst, 2.0, 0.0,
                               Provenance::PAPER, failures == 0));
  }
  {
    FixtureRng rng(seed + 1);
    Grid g(Box::interval(-4.0, 4.0), 1.0 / 32);
    SampledFunction dens = sample_weight(WeightFn::power(1, 0.3), g);
    double slack = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      SampledFunction f = sample_packets(g, random_packets(rng, 2, 2.0, 0.5, 4.0, 0.3, 1.0));
      SampledFunction h = sample_packets(g, random_packets(rng, 2, 2.0, 0.5, 4.0, 0.3, 1.0));
      for (double p : {1.0, 1.5, 3.0})
        slack = std::max(slack, weighted_lp_norm(f + h, dens, p) - weighted_lp_norm(f, dens, p) -
                                    weighted_lp_norm(h, dens, p));
      double q = 0.5;
      slack = std::max(slack, std::pow(weighted_lp_norm(f + h, dens, q), q) -
                                  std::pow(weighted_lp_norm(f, dens, q), q) - std::pow(weighted_lp_norm(h, dens, q), q));
    }
    out.push_back(custom_check("weights.lp_triangle", "triangle inequality (p >= 1) and p-subadditivity (p < 1)",
                               slack, 0.0, 1e-12, Provenance::TRIVIAL, slack <= 1e-12));
  }
  return out;
}

std::vector<CheckRecord> battery_carleson(std::uint64_t) {
  std::vector<CheckRecord> out;
  struct Fixture {
    std::string name;
    MLKernelSpec spec;
  };
  std::vector<Fixture> fixtures{{"bump", bump_spec(1, 2, 2.0)},
                                {"meanzero_c0", meanzero_spec(1, 2, 0.5)},
                                {"ex38", ex38_spec(1)},
                                {"ex37", ex37_spec(1, 1, 0.5, BetaChoice::rough)}};
  Grid g(Box::interval(-4.0, 4.0), p2(-8));
  ScaleGrid sg(p2(-8), 2.0, 8);
  CubeFamily fam = CubeFamily::dyadic(g.box(), 0, 8);
  CubeFamily small = CubeFamily::dyadic(g.box(), 2, 6);
  for (const Fixture& fx : fixtures) {
    CarlesonField F = theta_one_field(ThetaOperator(fx.spec, g), sg);
    double c = carleson_constant(F, fam).supremum;
    double s = strong_carleson_constant(F, fam).supremum;
    // Equal in exact arithmetic for x-constant fields, hence the rounding slack.
    out.push_back(custom_check("carleson.strong_dominates." + fx.name, "strong constant at least the Carleson constant",
                               s, c, 1e-12, Provenance::TRIVIAL, s >= c * (1.0 - 1e-12)));
    if (F.x_constant)
      out.push_back(relative_check("carleson.x_constant." + fx.name,
                                   "strong and Carleson constants agree when Theta_t(1) is constant in x", s, c,
                                   1e-10, Provenance::DERIVED));
    double cs = carleson_constant(F, small).supremum;
    out.push_back(custom_check("carleson.family_monotone." + fx.name, "constant nondecreasing under family enlargement",
                               c, cs, 0.0, Provenance::TRIVIAL, c >= cs));
  }
  {
    std::vector<double> ap{1.0, 1.0}, ps{4.0, 4.0};
    out.push_back(absolute_check("carleson.bound_constant", "weighted bound constant with unit A_p constants",
                                 bound_constant_43(ap, ps, 0.0, 2), 4.0, 1e-14, Provenance::TRIVIAL));
    out.push_back(relative_check("carleson.c0_of_B", "extrapolation constant at B = 2, q = (4, 4), sc = 1",
                                 c0_of_B(2.0, ps, 1.0, 2), 32.0 + std::pow(2.0, 2.0 / 3.0), 1e-14,
                                 Provenance::DERIVED));
  }
  return out;
}

}  // namespace sqfn
