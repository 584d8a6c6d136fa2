#include "sqfn/operators.hpp"

#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <memory>

#include "sqfn/errors.hpp"

namespace sqfn {
namespace {

constexpr double kTwoPow28 = 268435456.0;

void check_inputs(const ThetaOperator& op, std::span<const SampledFunction> fs) {
  if (fs.size() != static_cast<std::size_t>(op.arity()))
    throw ContractError("operator expects " + std::to_string(op.arity()) + " inputs");
  for (const SampledFunction& f : fs)
    if (!(f.grid() == op.grid())) throw ContractError("input is not on the operator grid");
}

bool all_zero(const SampledFunction& f) {
  return std::all_of(f.values().begin(), f.values().end(), [](double v) { return v == 0.0; });
}

SampledFunction apply_product(const MLKernelSpec& spec, const Grid& grid, double t,
                              std::span<const SampledFunction> fs) {
  SampledFunction out(grid);
  for (const SampledFunction& f : fs)
    if (all_zero(f)) return out;
  for (const ProductTerm& term : spec.terms) {
    if (term.coeff == 0.0) continue;
    SampledFunction v = term.multiplier(grid, t);
    for (std::size_t i = 0; i < fs.size(); ++i) {
      SampledFunction k = term.slots[i]->sample_dilated(t, grid.spacing(), grid.box().side);
      v.multiply_pointwise(convolve(fs[i], k));
    }
    v *= term.coeff;
    out += v;
  }
  return out;
}

SampledFunction apply_general(const MLKernelSpec& spec, const Grid& grid, double t,
                              std::span<const SampledFunction> fs) {
  const std::size_t n = grid.size();
  std::vector<std::vector<std::size_t>> support(fs.size());
  for (std::size_t i = 0; i < fs.size(); ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (fs[i][j] != 0.0) support[i].push_back(j);
  double weight = std::pow(grid.cell_volume(), spec.m);
  SampledFunction out(grid);
  std::vector<Point> ys(fs.size());
  for (std::size_t x = 0; x < n; ++x) {
    Point px = grid.node(x);
    double acc = 0.0;
    if (spec.m == 1) {
      for (std::size_t a : support[0]) {
        ys[0] = grid.node(a);
        acc += spec.general(t, px, ys) * fs[0][a];
      }
    } else {
      for (std::size_t a : support[0]) {
        ys[0] = grid.node(a);
        for (std::size_t b : support[1]) {
          ys[1] = grid.node(b);
          acc += spec.general(t, px, ys) * fs[0][a] * fs[1][b];
        }
      }
    }
    out[x] = acc * weight;
  }
  return out;
}

}  // namespace

ThetaOperator::ThetaOperator(MLKernelSpec spec, Grid grid, EvalStrategy strategy)
    : spec_(std::move(spec)), grid_(grid), strategy_(strategy) {
  spec_.validate();
  if (spec_.n != grid_.dim()) throw ConfigError("kernel dimension differs from the grid");
  if (!spec_.is_product() && strategy_ == EvalStrategy::product_convolution)
    throw ConfigError("general-form kernels need the general-quadrature strategy");
  if (strategy_ == EvalStrategy::general_quadrature) {
    double load = std::pow(static_cast<double>(grid_.size()), spec_.m + 1);
    if (spec_.m > 2 || load > kTwoPow28)
      throw CapacityError("general quadrature limited to m <= 2 and size^(m+1) <= 2^28");
    if (spec_.is_product()) spec_ = expand_to_general(spec_, grid_);
  }
}

SampledFunction ThetaOperator::apply(double t, std::span<const SampledFunction> fs) const {
  if (!(t > 0.0)) throw ParameterError("scale must be positive");
  check_inputs(*this, fs);
  if (strategy_ == EvalStrategy::general_quadrature) return apply_general(spec_, grid_, t, fs);
  return apply_product(spec_, grid_, t, fs);
}

SampledFunction ThetaOperator::apply_to_ones(double t) const {
  if (spec_.is_product()) {
    SampledFunction out(grid_);
    for (const ProductTerm& term : spec_.terms) {
      double c = term.coeff;
      for (const ProfilePtr& p : term.slots) c *= p->mass();
      if (c == 0.0) continue;
      SampledFunction v = term.multiplier(grid_, t);
      v *= c;
      out += v;
    }
    return out;
  }
  std::vector<SampledFunction> ones(static_cast<std::size_t>(spec_.m),
                                    SampledFunction::constant(grid_, 1.0));
  return apply(t, ones);
}

double ThetaOperator::reach(double t) const {
  if (!spec_.is_product()) return grid_.box().side;
  double r = 0.0;
  for (const ProductTerm& term : spec_.terms)
    for (const ProfilePtr& p : term.slots) r = std::max(r, p->support_radius() * t);
  return std::min(r, grid_.box().side);
}

SampledFunction apply_P(const Profile& phi, double t, const SampledFunction& f) {
  return convolve(f, phi.sample_dilated(t, f.spacing(), f.box().side));
}

SampledFunction apply_Pprod(const Profile& phi, double t, std::span<const SampledFunction> fs) {
  if (fs.empty()) throw ContractError("empty argument list");
  SampledFunction out = apply_P(phi, t, fs[0]);
  for (std::size_t i = 1; i < fs.size(); ++i) out.multiply_pointwise(apply_P(phi, t, fs[i]));
  return out;
}

SampledFunction apply_Q(const DerivedFamily& fam, double t, const SampledFunction& f) {
  return apply_P(*fam.psi, t, f);
}

SampledFunction apply_Qik(const DerivedFamily& fam, int i, int k, double t, const SampledFunction& f) {
  if (k < 0 || static_cast<std::size_t>(k) >= fam.psi1.size())
    throw ContractError("derivative index out of range");
  if (i == 1) return apply_P(*fam.psi1[static_cast<std::size_t>(k)], t, f);
  if (i == 2) return apply_P(*fam.psi2[static_cast<std::size_t>(k)], t, f);
  throw ContractError("factor index must be 1 or 2");
}

std::vector<SampledFunction> apply_pi(const DerivedFamily& fam, int j, double s,
                                      std::span<const SampledFunction> fs) {
  if (j < 1 || static_cast<std::size_t>(j) > fs.size()) throw ContractError("slot index out of range");
  std::vector<SampledFunction> out;
  out.reserve(fs.size());
  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (static_cast<int>(i) + 1 == j)
      out.push_back(apply_Q(fam, s, fs[i]));
    else
      out.push_back(apply_P(*fam.phi, s, apply_P(*fam.phi, s, fs[i])));
  }
  return out;
}

SquareFunctionResult square_function(const ThetaOperator& op, std::span<const SampledFunction> fs,
                                     const ScaleGrid& scales, std::optional<double> guard,
                                     bool keep_field) {
  check_inputs(op, fs);
  NodeMask mask = guard_band(op.grid(), guard.value_or(op.reach(scales.t_max())));
  SampledFunction sq(op.grid());
  std::optional<ScaleField> field;
  if (keep_field) field = ScaleField{scales, {}};
  for (std::size_t j = 0; j < scales.size(); ++j) {
    SampledFunction v = op.apply(scales.nodes()[j], fs);
    double w = scales.weights()[j];
    for (std::size_t i = 0; i < v.size(); ++i) sq[i] += w * v[i] * v[i];
    if (field) field->slices.push_back(std::move(v));
  }
  for (double& v : sq.values()) v = std::sqrt(v);
  return SquareFunctionResult{scales, std::move(sq), std::move(mask), std::move(field)};
}

SquareFunctionResult g_psi(ProfilePtr psi, const SampledFunction& f, const ScaleGrid& scales,
                           std::optional<double> guard) {
  ThetaOperator op(product_spec("g_psi", {std::move(psi)}), f.grid());
  return square_function(op, std::span<const SampledFunction>(&f, 1), scales, guard);
}

std::pair<ThetaOperator, ThetaOperator> split_theta(const ThetaOperator& op) {
  auto shared = std::make_shared<const ThetaOperator>(op);
  const MLKernelSpec& spec = op.spec();
  Multiplier ones;
  ones.name = "Theta_t(1)";
  ones.unit = false;
  ones.x_constant = spec.is_product() &&
                    std::all_of(spec.terms.begin(), spec.terms.end(),
                                [](const ProductTerm& term) { return term.multiplier.x_constant; });
  ones.sup_bound = INFINITY;
  ones.field = [shared](const Grid& g, double t) {
    if (!(g == shared->grid())) throw ContractError("U-part evaluated on a foreign grid");
    return shared->apply_to_ones(t);
  };
  ProfilePtr phi = standard_bump(spec.n);

  MLKernelSpec u;
  u.name = spec.name + ":U";
  u.m = spec.m;
  u.n = spec.n;
  u.N = spec.N;
  u.gamma = spec.gamma;
  u.terms.push_back(ProductTerm{1.0, ones, std::vector<ProfilePtr>(static_cast<std::size_t>(spec.m), phi)});

  MLKernelSpec r = spec;
  r.name = spec.name + ":R";
  r.t_constant = false;
  if (spec.is_product()) {
    r.terms.push_back(ProductTerm{-1.0, ones, u.terms.front().slots});
  } else {
    MLKernelSpec u_general = expand_to_general(u, op.grid());
    GeneralRule base = spec.general;
    GeneralRule minus = u_general.general;
    r.general = [base, minus](double t, const Point& x, std::span<const Point> ys) {
      return base(t, x, ys) - minus(t, x, ys);
    };
  }
  return {ThetaOperator(std::move(r), op.grid(), op.strategy()),
          ThetaOperator(std::move(u), op.grid(), op.strategy())};
}

double reproducing_residual(const ThetaOperator& op, const DerivedFamily& fam,
                            std::span<const SampledFunction> fs, double t, double eps,
                            const NodeMask& mask, int per_octave) {
  if (!(eps > 0.0 && eps < 1.0)) throw ParameterError("eps must lie in (0, 1)");
  check_inputs(op, fs);
  SampledFunction diff = op.apply(t, fs);
  ScaleGrid sg(eps, 1.0 / eps, per_octave);
  for (std::size_t k = 0; k < sg.size(); ++k) {
    double s = sg.nodes()[k];
    for (int j = 1; j <= op.arity(); ++j) {
      std::vector<SampledFunction> args = apply_pi(fam, j, s, fs);
      SampledFunction v = op.apply(t, args);
      v *= sg.weights()[k];
      diff -= v;
    }
  }
  return l2_norm(diff, mask);
}

namespace {

using boost::math::quadrature::exp_sinh;
using boost::math::quadrature::gauss_kronrod;

template <typename F>
double gk(F f, double a, double b, double tol = 1e-12, unsigned depth = 25) {
  if (b <= a) return 0.0;
  return gauss_kronrod<double, 31>::integrate(f, a, b, depth, tol);
}

template <typename F>
double half_line(F f, double a, double c) {
  // [a, a + c] adaptively, then the polynomial tail by exp_sinh.
  exp_sinh<double> tail;
  return gk(f, a, a + c) + tail.integrate([&](double u) { return f(a + c + u); }, 0.0,
                                          std::numeric_limits<double>::infinity());
}

double orth_integral_1d(double M, double L, double s, double t, double d) {
  auto f = [&](double v) {
    return majorant_eval(1, M, t, {d - v, 0.0}) * majorant_eval(1, L, s, {v, 0.0});
  };
  double a = std::min(0.0, d), b = std::max(0.0, d);
  double c = 4.0 * std::max(s, t);
  double right = half_line(f, b, c);
  double left = half_line([&](double u) { return f(-u); }, -a, c);
  return gk(f, a, b) + left + right;
}

double orth_integral_2d(double M, double L, double s, double t, double d) {
  constexpr double pi = 3.14159265358979323846;
  auto radial = [&](double r) {
    if (r == 0.0) return 0.0;
    double inner = gk(
        [&](double th) {
          Point q{d - r * std::cos(th), -r * std::sin(th)};
          return majorant_eval(2, M, t, q);
        },
        0.0, pi, 1e-9, 12);
    return 2.0 * inner * r * majorant_eval(2, L, s, {r, 0.0});
  };
  // Break the radial range where the integrand changes character: the two
  // scales, and the shell |r - d| <= t around the other centre.
  std::vector<double> cuts{0.0, s, t, d, d + t};
  if (d > t) cuts.push_back(d - t);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += gk(radial, cuts[i], cuts[i + 1], 1e-9, 15);
  return total + half_line(radial, cuts.back(), 4.0 * std::max(s, t));
}

}  // namespace

double almost_orth_ratio(int n, double M, double L, double s, double t,
                         std::span<const double> differences) {
  if (n != 1 && n != 2) throw ParameterError("dimension must be 1 or 2");
  if (!(M > n) || !(L > n)) throw ParameterError("exponents must exceed the dimension");
  if (!(s > 0.0) || !(t > 0.0)) throw ParameterError("scales must be positive");
  double ml = std::min(M, L);
  double sup = 0.0;
  for (double d : differences) {
    double a = std::abs(d);
    double integral = n == 1 ? orth_integral_1d(M, L, s, t, a) : orth_integral_2d(M, L, s, t, a);
    double bound = majorant_eval(n, ml, s, {a, 0.0}) + majorant_eval(n, ml, t, {a, 0.0});
    sup = std::max(sup, integral / bound);
  }
  return sup;
}

namespace {

CubeFamily box_dyadic_family(const Grid& grid) {
  std::size_t cells = grid.per_axis() - 1;
  int depth = 0;
  while (depth < 20 && cells % 2 == 0 && cells > 1) {
    cells /= 2;
    ++depth;
  }
  return CubeFamily::dyadic(grid.box(), 0, depth);
}

void require_annihilates_constants(const ThetaOperator& op, double t, const NodeMask& mask) {
  if (sup_abs(op.apply_to_ones(t), mask) > 1e-8)
    throw ContractError("s > t branch requires Theta_t(1, ..., 1) = 0");
}

}  // namespace

PiDecay pi_decay_ratio(const ThetaOperator& op, const DerivedFamily& fam, int j, double s,
                       double t, std::span<const SampledFunction> fs, const NodeMask& mask) {
  check_inputs(op, fs);
  if (s > t) require_annihilates_constants(op, t, mask);
  PiDecay out;
  out.numerator = sup_abs(op.apply(t, apply_pi(fam, j, s, fs)), mask);
  CubeFamily family = box_dyadic_family(op.grid());
  const SampledFunction& fj = fs[static_cast<std::size_t>(j - 1)];
  SampledFunction dom(op.grid());
  for (std::size_t k = 0; k < fam.psi2.size(); ++k)
    dom += hl_maximal(apply_Qik(fam, 2, static_cast<int>(k), s, fj), family);
  for (std::size_t i = 0; i < fs.size(); ++i)
    if (static_cast<int>(i) + 1 != j) dom.multiply_pointwise(hl_maximal(fs[i], family));
  double gp = derived_exponents(op.spec().N, op.spec().gamma, op.spec().n).gamma_prime;
  out.denominator = std::pow(std::min(s / t, t / s), gp) * sup_abs(dom, mask);
  out.ratio = out.denominator > 0.0 ? out.numerator / out.denominator : 0.0;
  return out;
}

double pi_decay_slope(const ThetaOperator& op, const DerivedFamily& fam, int j, double t,
                      std::span<const SampledFunction> fs, const NodeMask& mask, int octaves,
                      bool both_sides) {
  check_inputs(op, fs);
  if (octaves < 2) throw ParameterError("need at least two octaves");
  if (both_sides) require_annihilates_constants(op, t, mask);
  std::vector<double> xs, ys;
  for (int k = 1; k <= octaves; ++k) {
    for (int side = 0; side < (both_sides ? 2 : 1); ++side) {
      double s = side == 0 ? std::ldexp(t, -k) : std::ldexp(t, k);
      double v = sup_abs(op.apply(t, apply_pi(fam, j, s, fs)), mask);
      if (!(v > 0.0)) continue;
      xs.push_back(std::min(s / t, t / s));
      ys.push_back(v);
    }
  }
  return loglog_slope(xs, ys);
}

TailBounds kernel_tail_bounds(const ThetaOperator& op, std::span<const std::optional<Box>> sets,
                              const std::optional<Box>& cube, double t, const NodeMask& mask) {
  if (sets.size() != static_cast<std::size_t>(op.arity()))
    throw ContractError("one set per operator slot required");
  const Grid& grid = op.grid();
  std::vector<SampledFunction> fs;
  double min_measure = INFINITY;
  for (const auto& e : sets) {
    fs.push_back(e ? sample_indicator(grid, *e) : SampledFunction(grid));
    min_measure = std::min(min_measure, e ? e->volume() : 0.0);
  }
  SampledFunction v = op.apply(t, fs);
  TailBounds out;
  double n = op.spec().n;
  out.ratio35 = min_measure > 0.0 ? sup_abs(v, mask) / (std::pow(t, -n) * min_measure) : 0.0;
  out.ratio36 = std::nan("");
  if (cube) {
    Box doubled = cube->doubled();
    bool separated = std::any_of(sets.begin(), sets.end(), [&](const std::optional<Box>& e) {
      if (!e) return true;
      for (int a = 0; a < e->dim; ++a)
        if (e->hi(a) <= doubled.lo(a) || e->lo(a) >= doubled.hi(a)) return true;
      return false;
    });
    if (!separated) throw ContractError("(2Q) must avoid at least one of the sets");
    double decay = op.spec().N - n;
    double rhs = std::pow(t, decay) * std::pow(cube->side, -decay);
    out.ratio36 = sup_abs(v, box_mask(grid, *cube) & mask) / rhs;
  }
  return out;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ContractError("slope needs at least two points");
  double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ContractError("slope needs positive data");
    double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  double den = n * sxx - sx * sx;
  if (den == 0.0) throw ContractError("degenerate abscissae");
  return (n * sxy - sx * sy) / den;
}

}  // namespace sqfn
