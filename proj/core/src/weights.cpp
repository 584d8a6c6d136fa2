#include "sqfn/weights.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include "sqfn/errors.hpp"
#include "sqfn/operators.hpp"

namespace sqfn {
namespace {

using boost::math::quadrature::gauss;
constexpr double kPi = boost::math::constants::pi<double>();
constexpr int kMaxRefine = 36;

std::string number(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

double gauss_box(const WeightFn::Rule& f, const Box& b) {
  if (b.dim == 1) return gauss<double, 8>::integrate([&](double x) { return f({x, 0.0}); }, b.lo(0), b.hi(0));
  return gauss<double, 8>::integrate(
      [&](double x) {
        return gauss<double, 8>::integrate([&](double y) { return f({x, y}); }, b.lo(1), b.hi(1));
      },
      b.lo(0), b.hi(0));
}

// Distance from the origin to the box in the max norm.
double origin_gap(const Box& b) {
  double g = 0.0;
  for (int a = 0; a < b.dim; ++a) g = std::max({g, b.lo(a), -b.hi(a)});
  return g;
}

// Gauss-Legendre on the box, bisected towards the origin where the rule may be
// singular.
double refined_integral(const WeightFn::Rule& f, const Box& b, int depth) {
  if (depth >= kMaxRefine || origin_gap(b) >= 2.0 * b.side) return gauss_box(f, b);
  double half = b.side / 2;
  double total = 0.0;
  for (int i = 0; i < 2; ++i) {
    if (b.dim == 1) {
      total += refined_integral(f, Box{1, {b.corner[0] + i * half, 0.0}, half}, depth + 1);
      continue;
    }
    for (int j = 0; j < 2; ++j)
      total += refined_integral(f, Box{2, {b.corner[0] + i * half, b.corner[1] + j * half}, half},
                                depth + 1);
  }
  return total;
}

// Integral of |x|^a over [l, r], a > -1.
double power_integral_1d(double a, double l, double r) {
  auto G = [a](double x) { return std::copysign(std::pow(std::abs(x), a + 1.0), x) / (a + 1.0); };
  return G(r) - G(l);
}

struct Rect {
  double x0, x1, y0, y1;
};

// Pieces of the set inside the cube (y extent [0, 1] in one dimension).
std::vector<Rect> clip(std::span<const Box> set, const Box& cube) {
  std::vector<Rect> out;
  for (const Box& b : set) {
    if (b.dim != cube.dim) throw ContractError("set and cube dimensions differ");
    Rect r{std::max(b.lo(0), cube.lo(0)), std::min(b.hi(0), cube.hi(0)), 0.0, 1.0};
    if (cube.dim == 2) {
      r.y0 = std::max(b.lo(1), cube.lo(1));
      r.y1 = std::min(b.hi(1), cube.hi(1));
    }
    if (r.x1 > r.x0 && r.y1 > r.y0) out.push_back(r);
  }
  return out;
}

double merged_length(std::vector<std::pair<double, double>>& iv) {
  std::sort(iv.begin(), iv.end());
  double total = 0.0;
  double cur_lo = 0.0, cur_hi = 0.0;
  bool open = false;
  for (auto [lo, hi] : iv) {
    if (!open || lo > cur_hi) {
      if (open) total += cur_hi - cur_lo;
      cur_lo = lo;
      cur_hi = hi;
      open = true;
    } else {
      cur_hi = std::max(cur_hi, hi);
    }
  }
  if (open) total += cur_hi - cur_lo;
  return total;
}

// Sweep over the x breakpoints, merging y intervals per slab.
double rect_union_measure(const std::vector<Rect>& rects) {
  std::vector<double> xs;
  for (const Rect& r : rects) {
    xs.push_back(r.x0);
    xs.push_back(r.x1);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    double mid = 0.5 * (xs[i] + xs[i + 1]);
    std::vector<std::pair<double, double>> iv;
    for (const Rect& r : rects)
      if (r.x0 <= mid && mid <= r.x1) iv.emplace_back(r.y0, r.y1);
    total += (xs[i + 1] - xs[i]) * merged_length(iv);
  }
  return total;
}

Box bounding_box(std::span<const Box> set) {
  int dim = set.front().dim;
  double lo = INFINITY, hi = -INFINITY;
  for (const Box& b : set)
    for (int a = 0; a < dim; ++a) {
      lo = std::min(lo, b.lo(a));
      hi = std::max(hi, b.hi(a));
    }
  return Box{dim, {lo, dim == 2 ? lo : 0.0}, hi - lo};
}

void cz_recurse(std::span<const Box> set, double lambda, const Box& q, int depth, int max_depth,
                std::vector<Box>& out) {
  double inside = intersection_measure(set, q);
  if (inside <= 0.0) return;
  if (inside / q.volume() > lambda) {
    out.push_back(q);
    return;
  }
  if (depth >= max_depth) return;
  double half = q.side / 2;
  for (int i = 0; i < 2; ++i) {
    if (q.dim == 1) {
      cz_recurse(set, lambda, Box{1, {q.corner[0] + i * half, 0.0}, half}, depth + 1, max_depth, out);
      continue;
    }
    for (int j = 0; j < 2; ++j)
      cz_recurse(set, lambda, Box{2, {q.corner[0] + i * half, q.corner[1] + j * half}, half},
                 depth + 1, max_depth, out);
  }
}

}  // namespace

WeightFn WeightFn::constant(int dim, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw DegenerateWeightError("constant weight must be positive");
  WeightFn w;
  w.dim_ = dim;
  w.tag_ = "const";
  w.shape_ = [](const Point&) { return 1.0; };
  w.scale_ = c;
  w.power_ = 0.0;
  return w;
}

WeightFn WeightFn::power(int dim, double a) {
  if (a == 0.0) return constant(dim);
  WeightFn w;
  w.dim_ = dim;
  w.tag_ = "power:" + number(a);
  w.shape_ = [dim, a](const Point& x) { return std::pow(norm(x, dim), a); };
  w.power_ = a;
  return w;
}

WeightFn WeightFn::from_rule(int dim, std::string tag, Rule rule) {
  WeightFn w;
  w.dim_ = dim;
  w.tag_ = std::move(tag);
  w.shape_ = std::move(rule);
  return w;
}

WeightFn WeightFn::scaled(double c) const {
  if (!(c > 0.0) || !std::isfinite(c)) throw DegenerateWeightError("weight scale must be positive");
  WeightFn w = *this;
  w.scale_ *= c;
  return w;
}

WeightFn WeightFn::pow(double e) const {
  if (power_) {
    WeightFn w = power(dim_, *power_ * e);
    w.scale_ = std::pow(scale_, e);
    return w;
  }
  WeightFn w = *this;
  Rule base = shape_;
  w.shape_ = [base, e](const Point& x) { return std::pow(base(x), e); };
  w.scale_ = std::pow(scale_, e);
  w.tag_ = "(" + tag_ + ")^" + number(e);
  return w;
}

double WeightFn::shape_integral(const Box& box) const {
  if (box.dim != dim_) throw ContractError("weight and cube dimensions differ");
  if (power_) {
    double a = *power_;
    if (a == 0.0) return box.volume();
    if (a <= -static_cast<double>(dim_))
      throw DegenerateWeightError("|x|^" + number(a) + " is not locally integrable");
    if (dim_ == 1) return power_integral_1d(a, box.lo(0), box.hi(0));
  }
  return refined_integral(shape_, box, 0);
}

WeightFn density_from_weight(const WeightFn& w, double p) {
  if (!(p > 0.0)) throw ParameterError("exponent must be positive");
  return w.pow(p);
}

WeightFn weight_from_density(const WeightFn& density, double p) {
  if (!(p > 0.0)) throw ParameterError("exponent must be positive");
  return density.pow(1.0 / p);
}

bool power_weight_in_ap(int dim, double a, double p) {
  double n = static_cast<double>(dim);
  return p > 1.0 && a > -n && a < n * (p - 1.0);
}

SampledFunction sample_weight(const WeightFn& w, const Grid& grid) {
  if (w.dim() != grid.dim()) throw ContractError("weight and grid dimensions differ");
  SampledFunction out(grid);
  double h = grid.spacing();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Point x = grid.node(i);
    double v = w(x);
    if (!std::isfinite(v)) v = w.average(Box::centered(grid.dim(), x, h / 2));
    if (!std::isfinite(v) || v < 0.0) throw DegenerateWeightError("weight is not finite near a node");
    out[i] = v;
  }
  return out;
}

double ap_cube_value(const WeightFn& w, double p, const Box& cube) {
  if (!(p > 1.0) || !std::isfinite(p)) throw ParameterError("A_p needs 1 < p < inf");
  double vol = cube.volume();
  double a = w.shape_integral(cube) / vol;
  WeightFn dual = w.pow(-1.0 / (p - 1.0));
  double b = dual.shape_integral(cube) / vol;
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
    throw DegenerateWeightError("degenerate weight average on " + cube.to_string());
  return a * std::pow(b, p - 1.0);
}

ApEstimate ap_constant(const WeightFn& w, double p, const CubeFamily& family) {
  if (!(p > 1.0) || !std::isfinite(p)) throw ParameterError("A_p needs 1 < p < inf");
  const auto& cubes = family.cubes();
  if (cubes.empty()) throw ContractError("empty cube family");
  ApEstimate est;
  est.p = p;
  est.family = family.description();
  est.cubes = cubes.size();
  est.value = -INFINITY;
  for (const Box& q : cubes) {
    double v = ap_cube_value(w, p, q);
    if (v > est.value) {
      est.value = v;
      est.cube = q;
    }
  }
  return est;
}

double weighted_lp_norm(const SampledFunction& f, const SampledFunction& density, double p) {
  return weighted_lp_norm(f, density, p, NodeMask(f.size(), true));
}

double weighted_lp_norm(const SampledFunction& f, const SampledFunction& density, double p,
                        const NodeMask& mask) {
  if (!(p > 0.0) || !std::isfinite(p)) throw ParameterError("exponent must be positive");
  if (!(f.grid() == density.grid())) throw ContractError("function and density grids differ");
  const Grid& g = f.grid();
  double total = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (mask[i] && f[i] != 0.0) total += g.weight(i) * std::pow(std::abs(f[i]), p) * density[i];
  return std::pow(total, 1.0 / p);
}

double weighted_lp_norm(const SampledFunction& f, const WeightFn& density, double p) {
  return weighted_lp_norm(f, sample_weight(density, f.grid()), p);
}

double holder_index(std::span<const double> ps) {
  if (ps.empty()) throw ParameterError("no exponents given");
  double inv = 0.0;
  for (double q : ps) {
    if (!(q > 1.0) || !std::isfinite(q)) throw ParameterError("exponents must lie in (1, inf)");
    inv += 1.0 / q;
  }
  return 1.0 / inv;
}

double union_measure(std::span<const Box> set) {
  if (set.empty()) return 0.0;
  return intersection_measure(set, bounding_box(set));
}

double intersection_measure(std::span<const Box> set, const Box& cube) {
  if (set.empty()) return 0.0;
  return rect_union_measure(clip(set, cube));
}

std::vector<Box> cz_decompose(std::span<const Box> set, double lambda, const Box& root,
                              int max_depth) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw ParameterError("height must lie in (0, 1)");
  if (max_depth < 0 || max_depth > 40) throw ParameterError("depth must lie in [0, 40]");
  std::vector<Box> out;
  cz_recurse(set, lambda, root, 0, max_depth, out);
  return out;
}

Lemma44Result lemma44_check(const WeightFn& w, double p, const Point& x0, double d,
                            const Grid& grid) {
  if (!(p > 1.0)) throw ParameterError("lemma44_check needs p > 1");
  if (!(d > 0.0)) throw ParameterError("d must be positive");
  if (!w.power_exponent()) throw ContractError("the tail bound needs a power weight");
  const int n = grid.dim();
  const double nd = static_cast<double>(n);
  const double a = *w.power_exponent();
  if (!power_weight_in_ap(n, a, p)) throw ParameterError("power weight outside the A_p range");

  const Box& box = grid.box();
  double L = INFINITY;
  for (int k = 0; k < n; ++k) L = std::min({L, -box.lo(k), box.hi(k)});
  double r0 = norm(x0, n);
  if (!(L > r0)) throw ContractError("x0 must lie inside the inscribed ball of the grid box");

  SampledFunction dens = sample_weight(w, grid);
  SampledFunction f = sample(grid, [&](const Point& x) { return std::pow(d + distance(x, x0, n), -nd); });

  Lemma44Result r;
  r.box_part = std::pow(weighted_lp_norm(f, dens, p), p);
  double omega = n == 1 ? 2.0 : 2.0 * kPi;
  boost::math::quadrature::exp_sinh<double> q;
  r.tail_bound = w.scale() * q.integrate([&](double s) {
    double rad = L + s;
    return omega * std::pow(rad, nd - 1.0 + a) * std::pow(d + rad - r0, -nd * p);
  });
  r.norm = std::pow(r.box_part + r.tail_bound, 1.0 / p);

  SampledFunction chi = n == 1 ? sample_indicator(grid, Box::centered(1, x0, d))
                               : sample(grid, [&](const Point& x) { return distance(x, x0, n) < d ? 1.0 : 0.0; });
  r.ball_norm = weighted_lp_norm(chi, dens, p);
  SampledFunction m = hl_maximal(chi, CubeFamily::centered(grid, grid.per_axis() - 1));
  r.maximal_norm = weighted_lp_norm(m, dens, p);
  double dn = std::pow(d, nd);
  r.ratio_ball = r.norm * dn / r.ball_norm;
  r.ratio_maximal = r.norm * dn / r.maximal_norm;
  return r;
}

}  // namespace sqfn
