#include "sqfn/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fft.hpp"
#include "sqfn/errors.hpp"

namespace sqfn {
namespace {

constexpr double kAlignTol = 1e-9;
constexpr std::size_t kMaxNodes = std::size_t{1} << 27;

bool near_integer(double r, double& rounded) {
  rounded = std::round(r);
  return std::abs(r - rounded) <= kAlignTol * std::max(1.0, std::abs(r));
}

void require_same_grid(const SampledFunction& a, const SampledFunction& b, const char* what) {
  if (!(a.grid() == b.grid())) throw ContractError(std::string(what) + ": grids differ");
}

}  // namespace

double norm(const Point& x, int dim) {
  return dim == 1 ? std::abs(x[0]) : std::hypot(x[0], x[1]);
}

double distance(const Point& a, const Point& b, int dim) {
  return norm(Point{a[0] - b[0], a[1] - b[1]}, dim);
}

Box Box::interval(double lo, double hi) {
  Box b{1, {lo, 0.0}, hi - lo};
  validate(b);
  return b;
}

Box Box::square(double x0, double y0, double side) {
  Box b{2, {x0, y0}, side};
  validate(b);
  return b;
}

Box Box::centered(int dim, const Point& center, double half_side) {
  Box b{dim, {center[0] - half_side, dim == 2 ? center[1] - half_side : 0.0}, 2.0 * half_side};
  validate(b);
  return b;
}

double Box::volume() const { return dim == 1 ? side : side * side; }

Point Box::center() const {
  return {corner[0] + side / 2, dim == 2 ? corner[1] + side / 2 : 0.0};
}

bool Box::contains(const Point& x, double slack) const {
  for (int a = 0; a < dim; ++a) {
    auto k = static_cast<std::size_t>(a);
    if (x[k] < lo(a) - slack || x[k] > hi(a) + slack) return false;
  }
  return true;
}

bool Box::contains(const Box& other, double slack) const {
  if (other.dim != dim) return false;
  for (int a = 0; a < dim; ++a)
    if (other.lo(a) < lo(a) - slack || other.hi(a) > hi(a) + slack) return false;
  return true;
}

Box Box::doubled() const { return centered(dim, center(), side); }

std::string Box::to_string() const {
  std::ostringstream os;
  os.precision(17);
  os << '[' << corner[0] << ", " << corner[0] + side << ']';
  if (dim == 2) os << "x[" << corner[1] << ", " << corner[1] + side << ']';
  return os.str();
}

void validate(const Box& box) {
  if (box.dim != 1 && box.dim != 2) throw ConfigError("box dimension must be 1 or 2");
  if (!(box.side > 0.0) || !std::isfinite(box.side) || !std::isfinite(box.corner[0]) ||
      !std::isfinite(box.corner[1]))
    throw ConfigError("box must have a finite positive side: " + box.to_string());
}

Grid::Grid(Box box, double spacing) : box_(box), h_(spacing) {
  validate(box_);
  if (!(h_ > 0.0) || !std::isfinite(h_)) throw ConfigError("grid spacing must be positive");
  double n = 0.0;
  if (!near_integer(box_.side / h_, n) || n < 1.0)
    throw ConfigError("grid spacing does not divide the box side");
  per_axis_ = static_cast<std::size_t>(n) + 1;
  size_ = box_.dim == 1 ? per_axis_ : per_axis_ * per_axis_;
  if (n > 1e9 || size_ > kMaxNodes) throw CapacityError("grid exceeds the node budget");
}

double Grid::cell_volume() const { return dim() == 1 ? h_ : h_ * h_; }

std::array<std::size_t, 2> Grid::multi_index(std::size_t idx) const {
  if (dim() == 1) return {idx, 0};
  return {idx / per_axis_, idx % per_axis_};
}

std::size_t Grid::index(std::size_t i0, std::size_t i1) const {
  return dim() == 1 ? i0 : i0 * per_axis_ + i1;
}

Point Grid::node(std::size_t idx) const {
  auto mi = multi_index(idx);
  Point p{box_.corner[0] + static_cast<double>(mi[0]) * h_, 0.0};
  if (dim() == 2) p[1] = box_.corner[1] + static_cast<double>(mi[1]) * h_;
  return p;
}

double Grid::weight(std::size_t idx) const {
  auto mi = multi_index(idx);
  double w = cell_volume();
  for (int a = 0; a < dim(); ++a) {
    std::size_t i = mi[static_cast<std::size_t>(a)];
    if (i == 0 || i + 1 == per_axis_) w *= 0.5;
  }
  return w;
}

std::optional<std::size_t> Grid::locate(const Point& x) const {
  std::array<std::size_t, 2> mi{0, 0};
  for (int a = 0; a < dim(); ++a) {
    auto k = static_cast<std::size_t>(a);
    double r = (x[k] - box_.corner[k]) / h_;
    double ri = std::round(r);
    if (std::abs(r - ri) > kAlignTol || ri < 0.0 || ri >= static_cast<double>(per_axis_))
      return std::nullopt;
    mi[k] = static_cast<std::size_t>(ri);
  }
  return index(mi[0], mi[1]);
}

std::size_t Grid::nearest(const Point& x) const {
  std::array<std::size_t, 2> mi{0, 0};
  for (int a = 0; a < dim(); ++a) {
    auto k = static_cast<std::size_t>(a);
    double r = std::round((x[k] - box_.corner[k]) / h_);
    r = std::clamp(r, 0.0, static_cast<double>(per_axis_ - 1));
    mi[k] = static_cast<std::size_t>(r);
  }
  return index(mi[0], mi[1]);
}

std::array<std::size_t, 2> Grid::aligned_range(int axis, double lo, double hi) const {
  auto k = static_cast<std::size_t>(axis);
  double a = 0.0;
  double b = 0.0;
  if (!near_integer((lo - box_.corner[k]) / h_, a) || !near_integer((hi - box_.corner[k]) / h_, b))
    throw ConfigError("cube faces must lie on grid nodes");
  if (a < 0.0 || b >= static_cast<double>(per_axis_) || b < a)
    throw ConfigError("cube is not inside the grid box");
  return {static_cast<std::size_t>(a), static_cast<std::size_t>(b)};
}

bool operator==(const Grid& a, const Grid& b) {
  if (a.dim() != b.dim() || a.per_axis_ != b.per_axis_) return false;
  double tol = 1e-12 * a.h_;
  if (std::abs(a.h_ - b.h_) > tol) return false;
  for (int k = 0; k < a.dim(); ++k)
    if (std::abs(a.box_.lo(k) - b.box_.lo(k)) > tol) return false;
  return true;
}

SampledFunction::SampledFunction(Grid grid) : grid_(grid), values_(grid.size(), 0.0) {}

SampledFunction::SampledFunction(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw ContractError("value count does not match the grid");
}

SampledFunction SampledFunction::constant(const Grid& grid, double value) {
  return SampledFunction(grid, std::vector<double>(grid.size(), value));
}

double SampledFunction::at(const Point& x) const {
  auto idx = grid_.locate(x);
  if (!idx) throw ConfigError("point is not a grid node");
  return values_[*idx];
}

SampledFunction& SampledFunction::operator+=(const SampledFunction& other) {
  require_same_grid(*this, other, "addition");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

SampledFunction& SampledFunction::operator-=(const SampledFunction& other) {
  require_same_grid(*this, other, "subtraction");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

SampledFunction& SampledFunction::operator*=(double c) {
  for (double& v : values_) v *= c;
  return *this;
}

SampledFunction& SampledFunction::multiply_pointwise(const SampledFunction& other) {
  require_same_grid(*this, other, "product");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] *= other.values_[i];
  return *this;
}

double SampledFunction::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

SampledFunction operator+(SampledFunction a, const SampledFunction& b) { return a += b; }
SampledFunction operator-(SampledFunction a, const SampledFunction& b) { return a -= b; }
SampledFunction operator*(double c, SampledFunction a) { return a *= c; }

SampledFunction sample(const Box& box, double h, const PointRule& rule) {
  return sample(Grid(box, h), rule);
}

SampledFunction sample(const Grid& grid, const PointRule& rule) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = rule(grid.node(i));
    if (!std::isfinite(v[i])) throw KernelError("non-finite sample at a grid node");
  }
  return SampledFunction(grid, std::move(v));
}

SampledFunction sample_indicator(const Grid& grid, const Box& region) {
  if (region.dim != grid.dim()) throw ConfigError("indicator region has the wrong dimension");
  double h = grid.spacing();
  // Per-axis overlap fractions, then their tensor product.
  std::array<std::vector<double>, 2> frac;
  for (int a = 0; a < grid.dim(); ++a) {
    auto k = static_cast<std::size_t>(a);
    frac[k].resize(grid.per_axis());
    for (std::size_t i = 0; i < grid.per_axis(); ++i) {
      double x = grid.box().corner[k] + static_cast<double>(i) * h;
      double lo = std::max(x - h / 2, region.lo(a));
      double hi = std::min(x + h / 2, region.hi(a));
      frac[k][i] = std::clamp((hi - lo) / h, 0.0, 1.0);
    }
  }
  SampledFunction f(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto mi = grid.multi_index(i);
    f[i] = frac[0][mi[0]] * (grid.dim() == 2 ? frac[1][mi[1]] : 1.0);
  }
  return f;
}

std::size_t NodeMask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

NodeMask NodeMask::operator&(const NodeMask& other) const {
  if (other.size() != size()) throw ContractError("mask sizes differ");
  NodeMask m(size(), false);
  for (std::size_t i = 0; i < size(); ++i) m.bits_[i] = bits_[i] & other.bits_[i];
  return m;
}

NodeMask guard_band(const Grid& grid, double radius) {
  NodeMask m(grid.size(), false);
  const Box& b = grid.box();
  double slack = 1e-12 * b.side;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Point x = grid.node(i);
    double d = INFINITY;
    for (int a = 0; a < grid.dim(); ++a) {
      auto k = static_cast<std::size_t>(a);
      d = std::min({d, x[k] - b.lo(a), b.hi(a) - x[k]});
    }
    m.set(i, d >= radius - slack);
  }
  if (m.count() == 0)
    throw DegenerateDomainError("guard band of width " + std::to_string(radius) +
                                " leaves no interior nodes in " + b.to_string());
  return m;
}

NodeMask guard_band(const SampledFunction& f, double radius) {
  return guard_band(f.grid(), radius);
}

NodeMask box_mask(const Grid& grid, const Box& region) {
  NodeMask m(grid.size(), false);
  double slack = kAlignTol * grid.spacing();
  for (std::size_t i = 0; i < grid.size(); ++i) m.set(i, region.contains(grid.node(i), slack));
  return m;
}

double integrate(const SampledFunction& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f.grid().weight(i) * f[i];
  return s;
}

double integrate(const SampledFunction& f, const NodeMask& mask) {
  if (mask.size() != f.size()) throw ContractError("mask does not match the grid");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (mask[i]) s += f.grid().weight(i) * f[i];
  return s;
}

double sup_abs(const SampledFunction& f, const NodeMask& mask) {
  if (mask.size() != f.size()) throw ContractError("mask does not match the grid");
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (mask[i]) m = std::max(m, std::abs(f[i]));
  return m;
}

double l2_norm(const SampledFunction& f, const NodeMask& mask) {
  if (mask.size() != f.size()) throw ContractError("mask does not match the grid");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (mask[i]) s += f.grid().weight(i) * f[i] * f[i];
  return std::sqrt(s);
}

ScaleGrid::ScaleGrid(double t_min, double t_max, int per_octave, ScaleMeasure kind)
    : t_min_(t_min), t_max_(t_max), per_octave_(per_octave), kind_(kind) {
  if (!(t_min > 0.0) || !(t_max > t_min) || !std::isfinite(t_max))
    throw ConfigError("scale range must satisfy 0 < t_min < t_max");
  if (kind == ScaleMeasure::dyadic) {
    per_octave_ = 1;
    long k_lo = static_cast<long>(std::ceil(-std::log2(t_max) - kAlignTol));
    long k_hi = static_cast<long>(std::floor(-std::log2(t_min) + kAlignTol));
    for (long k = k_hi; k >= k_lo; --k) {
      nodes_.push_back(std::ldexp(1.0, static_cast<int>(-k)));
      weights_.push_back(1.0);
    }
    if (nodes_.empty()) throw ConfigError("no dyadic scale inside [t_min, t_max]");
    return;
  }
  if (per_octave < 1) throw ConfigError("per_octave must be at least 1");
  double log_ratio = std::log(t_max / t_min);
  double octaves = std::log2(t_max / t_min);
  auto count = static_cast<std::size_t>(std::ceil(per_octave * octaves - kAlignTol));
  count = std::max<std::size_t>(count, 1);
  if (count > 1u << 20) throw CapacityError("scale grid too large");
  double w = log_ratio / static_cast<double>(count);
  nodes_.reserve(count);
  for (std::size_t j = 0; j < count; ++j) {
    nodes_.push_back(t_min * std::exp((static_cast<double>(j) + 0.5) * w));
    weights_.push_back(w);
  }
}

ScaleGrid ScaleGrid::dyadic(double t_min, double t_max) {
  return ScaleGrid(t_min, t_max, 1, ScaleMeasure::dyadic);
}

ScaleGrid ScaleGrid::subset(std::size_t first, std::size_t last) const {
  if (first >= last || last > size()) throw ContractError("invalid scale subset");
  ScaleGrid s;
  s.per_octave_ = per_octave_;
  s.kind_ = kind_;
  s.nodes_.assign(nodes_.begin() + static_cast<long>(first), nodes_.begin() + static_cast<long>(last));
  s.weights_.assign(weights_.begin() + static_cast<long>(first),
                    weights_.begin() + static_cast<long>(last));
  if (kind_ == ScaleMeasure::log_uniform) {
    double half = weights_[first] / 2;
    s.t_min_ = s.nodes_.front() * std::exp(-half);
    s.t_max_ = s.nodes_.back() * std::exp(half);
  } else {
    s.t_min_ = s.nodes_.front();
    s.t_max_ = s.nodes_.back();
  }
  return s;
}

double scale_integrate(std::span<const double> values, const ScaleGrid& grid) {
  if (values.size() != grid.size()) throw ContractError("values do not match the scale grid");
  double s = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) s += grid.weights()[j] * values[j];
  return s;
}

const Grid& ScaleField::grid() const {
  if (slices.empty()) throw ContractError("empty scale field");
  return slices.front().grid();
}

namespace {

struct KernelLayout {
  // Index of the origin inside the kernel grid, per axis.
  std::array<long, 2> center{0, 0};
  // Clipped index window [lo, hi] per axis.
  std::array<long, 2> lo{0, 0};
  std::array<long, 2> hi{0, 0};
};

KernelLayout layout_for(const SampledFunction& f, const SampledFunction& k) {
  if (f.dim() != k.dim()) throw ConfigError("kernel dimension differs from the field");
  if (std::abs(f.spacing() - k.spacing()) > 1e-12 * f.spacing())
    throw ConfigError("kernel spacing differs from the field");
  KernelLayout L;
  long nf = static_cast<long>(f.grid().per_axis());
  long nk = static_cast<long>(k.grid().per_axis());
  for (int a = 0; a < f.dim(); ++a) {
    auto ax = static_cast<std::size_t>(a);
    double c = 0.0;
    if (!near_integer(-k.box().corner[ax] / k.spacing(), c) || c < 0.0 ||
        c > static_cast<double>(nk - 1))
      throw ConfigError("kernel grid must contain the origin as a node");
    L.center[ax] = static_cast<long>(c);
    // Offsets m - c beyond the field extent never contribute.
    L.lo[ax] = std::max(0L, L.center[ax] - (nf - 1));
    L.hi[ax] = std::min(nk - 1, L.center[ax] + (nf - 1));
  }
  return L;
}

double direct_at(const SampledFunction& f, const SampledFunction& k, const KernelLayout& L,
                 std::size_t node) {
  const Grid& g = f.grid();
  long nf = static_cast<long>(g.per_axis());
  long nk = static_cast<long>(k.grid().per_axis());
  auto mi = g.multi_index(node);
  long i0 = static_cast<long>(mi[0]);
  long i1 = static_cast<long>(mi[1]);
  double s = 0.0;
  if (f.dim() == 1) {
    // source index j = i - (m - c), must lie in [0, nf)
    long m_lo = std::max(L.lo[0], i0 + L.center[0] - (nf - 1));
    long m_hi = std::min(L.hi[0], i0 + L.center[0]);
    for (long m = m_lo; m <= m_hi; ++m)
      s += k[static_cast<std::size_t>(m)] * f[static_cast<std::size_t>(i0 - m + L.center[0])];
    return s * g.spacing();
  }
  long a_lo = std::max(L.lo[0], i0 + L.center[0] - (nf - 1));
  long a_hi = std::min(L.hi[0], i0 + L.center[0]);
  long b_lo = std::max(L.lo[1], i1 + L.center[1] - (nf - 1));
  long b_hi = std::min(L.hi[1], i1 + L.center[1]);
  for (long a = a_lo; a <= a_hi; ++a) {
    long j0 = i0 - a + L.center[0];
    for (long b = b_lo; b <= b_hi; ++b) {
      long j1 = i1 - b + L.center[1];
      s += k[static_cast<std::size_t>(a * nk + b)] * f[static_cast<std::size_t>(j0 * nf + j1)];
    }
  }
  return s * g.cell_volume();
}

}  // namespace

SampledFunction convolve(const SampledFunction& f, const SampledFunction& kernel,
                         ConvolutionMethod method) {
  KernelLayout L = layout_for(f, kernel);
  const Grid& g = f.grid();
  if (method == ConvolutionMethod::direct) {
    SampledFunction out(g);
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = direct_at(f, kernel, L, i);
    return out;
  }

  int dim = f.dim();
  std::size_t nf = g.per_axis();
  std::size_t nk = kernel.grid().per_axis();
  detail::Extent ek{static_cast<std::size_t>(L.hi[0] - L.lo[0] + 1),
                    dim == 2 ? static_cast<std::size_t>(L.hi[1] - L.lo[1] + 1) : 1};
  std::vector<double> kc(ek[0] * ek[1]);
  for (std::size_t a = 0; a < ek[0]; ++a)
    for (std::size_t b = 0; b < ek[1]; ++b) {
      std::size_t src = dim == 1 ? a + static_cast<std::size_t>(L.lo[0])
                                 : (a + static_cast<std::size_t>(L.lo[0])) * nk + b +
                                       static_cast<std::size_t>(L.lo[1]);
      kc[a * ek[1] + b] = kernel[src];
    }
  detail::Extent ef{nf, dim == 2 ? nf : 1};
  std::vector<double> fv(f.values().begin(), f.values().end());
  std::vector<double> full = detail::fft_convolve_full(dim, fv, ef, kc, ek);

  // full[p] = sum_j f[j] kc[p - j], kc index p - j = m - lo and m - c = i - j,
  // hence i = p - (c - lo).
  std::size_t width = ef[1] + ek[1] - 1;
  std::array<std::size_t, 2> shift{static_cast<std::size_t>(L.center[0] - L.lo[0]),
                                   static_cast<std::size_t>(L.center[1] - L.lo[1])};
  SampledFunction out(g);
  double scale = g.cell_volume();
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto mi = g.multi_index(i);
    std::size_t p = dim == 1 ? mi[0] + shift[0] : (mi[0] + shift[0]) * width + mi[1] + shift[1];
    out[i] = full[p] * scale;
  }
  return out;
}

std::vector<double> convolve_at(const SampledFunction& f, const SampledFunction& kernel,
                                std::span<const std::size_t> nodes) {
  KernelLayout L = layout_for(f, kernel);
  std::vector<double> out;
  out.reserve(nodes.size());
  for (std::size_t node : nodes) {
    if (node >= f.size()) throw ContractError("node index out of range");
    out.push_back(direct_at(f, kernel, L, node));
  }
  return out;
}

CubeFamily CubeFamily::dyadic(const Box& root, int min_depth, int max_depth) {
  validate(root);
  if (min_depth < 0 || max_depth < min_depth) throw ConfigError("invalid dyadic depth range");
  double total = 0.0;
  for (int d = min_depth; d <= max_depth; ++d) total += std::pow(2.0, d * root.dim);
  if (total > 1e7) throw CapacityError("dyadic family too large");
  CubeFamily fam;
  fam.kind_ = Kind::dyadic;
  fam.root_ = root;
  fam.min_depth_ = min_depth;
  fam.max_depth_ = max_depth;
  fam.cubes_.reserve(static_cast<std::size_t>(total));
  for (int d = min_depth; d <= max_depth; ++d) {
    std::size_t per = std::size_t{1} << d;
    double s = root.side / static_cast<double>(per);
    for (std::size_t i = 0; i < per; ++i) {
      double x0 = root.corner[0] + static_cast<double>(i) * s;
      if (root.dim == 1) {
        fam.cubes_.push_back(Box{1, {x0, 0.0}, s});
        continue;
      }
      for (std::size_t j = 0; j < per; ++j)
        fam.cubes_.push_back(Box{2, {x0, root.corner[1] + static_cast<double>(j) * s}, s});
    }
  }
  return fam;
}

CubeFamily CubeFamily::centered(const Grid& grid, std::size_t max_radius_nodes) {
  CubeFamily fam;
  fam.kind_ = Kind::centered;
  fam.root_ = grid.box();
  fam.max_radius_ = max_radius_nodes;
  return fam;
}

CubeFamily CubeFamily::from_list(std::vector<Box> cubes) {
  if (cubes.empty()) throw ConfigError("empty cube list");
  for (const Box& c : cubes) {
    validate(c);
    if (c.dim != cubes.front().dim) throw ConfigError("cubes of mixed dimension");
  }
  CubeFamily fam;
  fam.kind_ = Kind::list;
  fam.root_ = cubes.front();
  fam.cubes_ = std::move(cubes);
  return fam;
}

const std::vector<Box>& CubeFamily::cubes() const {
  if (kind_ == Kind::centered) throw ContractError("centered cube families are not enumerable");
  return cubes_;
}

std::string CubeFamily::description() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::dyadic:
      os << "dyadic(" << root_.to_string() << ", depth " << min_depth_ << ".." << max_depth_ << ')';
      break;
    case Kind::centered:
      os << "centered(" << root_.to_string() << ", radius <= " << max_radius_ << " nodes)";
      break;
    case Kind::list:
      os << "list(" << cubes_.size() << " cubes)";
      break;
  }
  return os.str();
}

}  // namespace sqfn
