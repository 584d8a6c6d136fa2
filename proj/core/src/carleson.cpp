#include "sqfn/carleson.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "sqfn/errors.hpp"

namespace sqfn {
namespace {

constexpr std::size_t kMaxFieldValues = std::size_t{1} << 24;
constexpr double kXConstantTol = 1e-8;

struct NodeRange {
  std::array<std::size_t, 2> r0{0, 0};
  std::array<std::size_t, 2> r1{0, 0};
};

// Node ranges of a grid-aligned cube, all of whose nodes must be masked.
NodeRange cube_nodes(const Grid& g, const NodeMask& mask, const Box& cube) {
  if (cube.dim != g.dim()) throw ContractError("cube and grid dimensions differ");
  NodeRange r;
  r.r0 = g.aligned_range(0, cube.lo(0), cube.hi(0));
  if (g.dim() == 2) r.r1 = g.aligned_range(1, cube.lo(1), cube.hi(1));
  for (std::size_t i = r.r0[0]; i <= r.r0[1]; ++i)
    for (std::size_t j = r.r1[0]; j <= r.r1[1]; ++j)
      if (!mask[g.index(i, j)])
        throw ContractError("cube " + cube.to_string() + " leaves the certified region");
  return r;
}

double cube_integral(const SampledFunction& v, const NodeRange& r) {
  const Grid& g = v.grid();
  double total = 0.0;
  for (std::size_t i = r.r0[0]; i <= r.r0[1]; ++i) {
    double wi = (i == r.r0[0] || i == r.r0[1]) ? 0.5 : 1.0;
    for (std::size_t j = r.r1[0]; j <= r.r1[1]; ++j) {
      double wj = g.dim() == 1 || (j != r.r1[0] && j != r.r1[1]) ? 1.0 : 0.5;
      total += wi * wj * v[g.index(i, j)];
    }
  }
  return total * g.cell_volume();
}

std::pair<double, std::size_t> cube_max(const SampledFunction& v, const NodeRange& r) {
  const Grid& g = v.grid();
  double best = -INFINITY;
  std::size_t at = 0;
  for (std::size_t i = r.r0[0]; i <= r.r0[1]; ++i)
    for (std::size_t j = r.r1[0]; j <= r.r1[1]; ++j) {
      std::size_t idx = g.index(i, j);
      if (v[idx] > best) {
        best = v[idx];
        at = idx;
      }
    }
  return {best, at};
}

bool x_constant_spec(const MLKernelSpec& spec) {
  return spec.is_product() &&
         std::all_of(spec.terms.begin(), spec.terms.end(),
                     [](const ProductTerm& term) { return term.multiplier.x_constant; });
}

void finish(CarlesonReport& rep) {
  if (rep.cubes.empty()) return;
  auto best = rep.cubes.begin();
  for (auto it = rep.cubes.begin(); it != rep.cubes.end(); ++it)
    if (it->value > best->value) best = it;
  rep.supremum = best->value;
  rep.cube = best->cube;
  rep.point = best->point;
}

template <class PerCube>
CarlesonReport scan(const CarlesonField& f, const CubeFamily& family, CarlesonKind kind,
                    PerCube per_cube) {
  const auto& cubes = family.cubes();
  if (cubes.empty()) throw ContractError("empty cube family");
  std::map<double, SampledFunction> truncated;
  for (const Box& q : cubes)
    if (!truncated.count(q.side)) truncated.emplace(q.side, truncated_scale_integral(f, q.side));
  CarlesonReport rep;
  rep.kind = kind;
  rep.family = family.description();
  rep.cubes.reserve(cubes.size());
  for (const Box& q : cubes) {
    NodeRange r = cube_nodes(f.grid(), f.mask, q);
    rep.cubes.push_back(per_cube(truncated.at(q.side), r, q));
  }
  finish(rep);
  return rep;
}

double rect_distance(const Point& x, const std::array<double, 4>& c, int dim) {
  double dx = std::max({c[0] - x[0], 0.0, x[0] - c[1]});
  if (dim == 1) return dx;
  double dy = std::max({c[2] - x[1], 0.0, x[1] - c[3]});
  return std::hypot(dx, dy);
}

void check_exponents(std::span<const double> a, std::span<const double> e, int m) {
  if (m < 1 || a.size() != static_cast<std::size_t>(m) || e.size() != static_cast<std::size_t>(m))
    throw ParameterError("constant and exponent lists must have m entries");
}

}  // namespace

CarlesonField make_field(ScaleField field, NodeMask mask, bool x_constant) {
  if (field.slices.size() != field.scales.size())
    throw ContractError("one slice per scale node is required");
  if (field.slices.empty()) throw ContractError("empty scale field");
  const Grid& g = field.grid();
  if (mask.size() != g.size()) throw ContractError("mask does not match the grid");
  for (const SampledFunction& s : field.slices) {
    if (!(s.grid() == g)) throw ContractError("slices live on different grids");
    for (double v : s.values())
      if (!(v >= 0.0) || !std::isfinite(v)) throw ContractError("Carleson density must be finite and >= 0");
  }
  return CarlesonField{std::move(field), std::move(mask), x_constant};
}

CarlesonField theta_one_field(const ThetaOperator& op, const ScaleGrid& scales,
                              std::optional<double> guard) {
  const Grid& g = op.grid();
  if (scales.size() * g.size() > kMaxFieldValues)
    throw CapacityError("Carleson field exceeds 2^24 stored values");
  bool xc = x_constant_spec(op.spec());
  ScaleField sf{scales, {}};
  sf.slices.reserve(scales.size());
  for (double t : scales.nodes()) {
    SampledFunction v = op.apply_to_ones(t);
    if (xc) {
      auto [lo, hi] = std::minmax_element(v.values().begin(), v.values().end());
      if (*hi - *lo > kXConstantTol)
        throw KernelError("Theta_t(1) of a convolution-type operator varies in x");
    }
    for (double& x : v.values()) x *= x;
    sf.slices.push_back(std::move(v));
  }
  NodeMask mask = op.spec().is_product() && !guard
                      ? NodeMask(g.size(), true)
                      : guard_band(g, guard.value_or(op.reach(scales.t_max())));
  return make_field(std::move(sf), std::move(mask), xc);
}

SampledFunction truncated_scale_integral(const CarlesonField& f, double ell) {
  SampledFunction out(f.grid());
  auto t = f.scales().nodes();
  auto w = f.scales().weights();
  for (std::size_t j = 0; j < t.size() && t[j] <= ell; ++j) {
    const SampledFunction& s = f.field.slices[j];
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += w[j] * s[i];
  }
  return out;
}

std::string to_string(CarlesonKind kind) {
  switch (kind) {
    case CarlesonKind::carleson:
      return "carleson";
    case CarlesonKind::strong:
      return "strong";
    case CarlesonKind::two_cube:
      return "two-cube";
  }
  return "?";
}

CarlesonReport carleson_constant(const CarlesonField& f, const CubeFamily& family) {
  return scan(f, family, CarlesonKind::carleson,
              [](const SampledFunction& g, const NodeRange& r, const Box& q) {
                return CubeValue{q, cube_integral(g, r) / q.volume(), std::nullopt};
              });
}

CarlesonReport strong_carleson_constant(const CarlesonField& f, const CubeFamily& family) {
  return scan(f, family, CarlesonKind::strong,
              [](const SampledFunction& g, const NodeRange& r, const Box& q) {
                auto [v, idx] = cube_max(g, r);
                return CubeValue{q, v, g.grid().node(idx)};
              });
}

CarlesonReport two_cube_constant(const ThetaOperator& op, std::span<const CubePair> pairs,
                                 const ScaleGrid& scales) {
  const Grid& g = op.grid();
  const int dim = g.dim();
  const auto m = static_cast<std::size_t>(op.arity());
  CarlesonReport rep;
  rep.kind = CarlesonKind::two_cube;
  rep.family = std::to_string(pairs.size()) + " nested pairs";
  NodeMask all(g.size(), true);
  for (const CubePair& pr : pairs) {
    const Box& R = pr.inner;
    const Box& Q = pr.outer;
    if (R.dim != dim || Q.dim != dim || !Q.contains(R, 1e-12))
      throw ContractError("pair is not nested: " + R.to_string() + " in " + Q.to_string());
    double reach = op.reach(Q.side);
    if (!g.box().contains(Box::centered(dim, R.center(), R.side / 2 + reach), 1e-12))
      throw ContractError("kernel support around " + R.to_string() + " leaves the grid box");
    NodeRange nr = cube_nodes(g, all, R);

    SampledFunction one = SampledFunction::constant(g, 1.0);
    std::vector<SampledFunction> outside_r(m, one - sample_indicator(g, R.doubled()));
    std::vector<SampledFunction> outside_q(m, one - sample_indicator(g, Q.doubled()));
    SampledFunction acc(g);
    for (std::size_t j = 0; j < scales.size(); ++j) {
      double t = scales.nodes()[j];
      if (t < R.side || t > Q.side) continue;
      SampledFunction d = op.apply(t, outside_r) - op.apply(t, outside_q);
      double w = scales.weights()[j];
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * d[i] * d[i];
    }
    rep.cubes.push_back(CubeValue{R, cube_integral(acc, nr) / R.volume(), std::nullopt});
  }
  finish(rep);
  return rep;
}

Tent::Tent(std::vector<Box> set) : set_(std::move(set)) {
  if (set_.empty()) return;
  dim_ = set_.front().dim;
  double lo = INFINITY, hi = -INFINITY;
  for (const Box& b : set_) {
    if (b.dim != dim_) throw ContractError("boxes of different dimensions");
    for (int a = 0; a < dim_; ++a) {
      lo = std::min(lo, b.lo(a));
      hi = std::max(hi, b.hi(a));
    }
  }
  hull_ = Box{dim_, {lo, dim_ == 2 ? lo : 0.0}, hi - lo};

  auto breaks = [&](int axis) {
    std::vector<double> v{lo, hi};
    for (const Box& b : set_) {
      v.push_back(b.lo(axis));
      v.push_back(b.hi(axis));
    }
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  };
  std::vector<double> xs = breaks(0);
  std::vector<double> ys = dim_ == 2 ? breaks(1) : std::vector<double>{0.0, 0.0};
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
      Point mid{0.5 * (xs[i] + xs[i + 1]), dim_ == 2 ? 0.5 * (ys[j] + ys[j + 1]) : 0.0};
      bool covered = std::any_of(set_.begin(), set_.end(), [&](const Box& b) { return b.contains(mid); });
      if (!covered) holes_.push_back({xs[i], xs[i + 1], ys[j], ys[j + 1]});
    }
}

bool Tent::contains(const Point& x, double t) const {
  if (set_.empty() || !(t > 0.0)) return false;
  for (int a = 0; a < dim_; ++a) {
    auto k = static_cast<std::size_t>(a);
    if (x[k] - t < hull_.lo(a) || x[k] + t > hull_.hi(a)) return false;
  }
  return std::all_of(holes_.begin(), holes_.end(),
                     [&](const auto& c) { return rect_distance(x, c, dim_) >= t; });
}

TentBound tent_bound_check(const CarlesonField& f, const WeightFn& w, std::span<const Box> set,
                           const CubeFamily& family) {
  const Grid& g = f.grid();
  TentBound out;
  out.strong = strong_carleson_constant(f, family).supremum;
  SampledFunction ws = sample_weight(w, g);
  std::vector<Box> boxes(set.begin(), set.end());
  double h = g.spacing();
  for (std::size_t i = 0; i < g.size(); ++i) {
    double frac = intersection_measure(boxes, Box::centered(g.dim(), g.node(i), h / 2)) / g.cell_volume();
    out.w_of_E += g.weight(i) * ws[i] * std::min(frac, 1.0);
  }
  out.rhs = out.strong * out.w_of_E;

  Tent tent(std::move(boxes));
  auto t = f.scales().nodes();
  auto tw = f.scales().weights();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!f.mask[i]) continue;
    Point x = g.node(i);
    double inner = 0.0;
    for (std::size_t j = 0; j < t.size(); ++j)
      if (tent.contains(x, t[j])) inner += tw[j] * f.field.slices[j][i];
    out.lhs += g.weight(i) * ws[i] * inner;
  }
  return out;
}

EmbeddingRatio embedding_ratio(const CarlesonField& f, const Profile& phi, const SampledFunction& u,
                               const WeightFn& w, double p, const CubeFamily& carleson_family,
                               const CubeFamily& ap_family) {
  if (!(p > 1.0)) throw ParameterError("the embedding needs p > 1");
  const Grid& g = f.grid();
  if (!(u.grid() == g)) throw ContractError("function and field grids differ");
  SampledFunction ws = sample_weight(w, g);
  EmbeddingRatio out;
  auto t = f.scales().nodes();
  auto tw = f.scales().weights();
  for (std::size_t j = 0; j < t.size(); ++j) {
    SampledFunction pu = apply_P(phi, t[j], u);
    const SampledFunction& F = f.field.slices[j];
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (f.mask[i] && F[i] != 0.0 && pu[i] != 0.0)
        s += g.weight(i) * std::pow(std::abs(pu[i]), p) * ws[i] * F[i];
    out.numerator += tw[j] * s;
  }
  out.numerator = std::pow(out.numerator, 1.0 / p);
  out.strong = strong_carleson_constant(f, carleson_family).supremum;
  out.ap = ap_constant(w, p, ap_family).value;
  out.f_norm = weighted_lp_norm(u, ws, p);
  if (out.numerator == 0.0) return out;
  out.ratio = out.numerator /
              (std::pow(out.strong, 1.0 / p) * std::pow(out.ap, 1.0 / (p - 1.0)) * out.f_norm);
  return out;
}

double bound_constant_43(std::span<const double> ap, std::span<const double> ps, double sc, int m) {
  check_exponents(ap, ps, m);
  if (!(sc >= 0.0)) throw ParameterError("strong Carleson constant must be >= 0");
  double first = 1.0;
  double second = std::pow(sc, m / 2.0);
  for (std::size_t i = 0; i < ap.size(); ++i) {
    if (!(ps[i] > 1.0) || !std::isfinite(ps[i])) throw ParameterError("exponents must lie in (1, inf)");
    if (!(ap[i] >= 1.0)) throw ParameterError("A_p constants are at least 1");
    double r = 1.0 / (ps[i] - 1.0);
    first *= 1.0 + std::pow(ap[i], std::max(1.0, r) + std::max(0.5, r));
    second *= std::pow(ap[i], r);
  }
  return first + second;
}

double c0_of_B(double B, std::span<const double> qs, double sc, int m) {
  if (!(B > 1.0) || !std::isfinite(B)) throw ParameterError("B must exceed 1");
  check_exponents(qs, qs, m);
  if (!(sc >= 0.0)) throw ParameterError("strong Carleson constant must be >= 0");
  double first = 1.0;
  double second = std::pow(sc, m / 2.0);
  for (double q : qs) {
    if (!(q > 1.0) || !std::isfinite(q)) throw ParameterError("exponents must lie in (1, inf)");
    double s = 1.0 / (q - 1.0);
    first *= 2.0 * std::pow(B, std::max(1.0, s) + std::max(0.5, s));
    second *= std::pow(B, s);
  }
  return first + second;
}

}  // namespace sqfn
