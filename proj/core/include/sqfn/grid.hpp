#pragma once

// Sampled fields on uniform grids in one or two dimensions, scale grids with
// their dt/t quadrature, node masks and the convolution engine. Everything in
// the library is built on these types.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sqfn {

// Coordinates of a point in R^n, n in {1, 2}. The second entry is ignored in
// one dimension.
using Point = std::array<double, 2>;

double norm(const Point& x, int dim);
double distance(const Point& a, const Point& b, int dim);

// Axis-parallel cube [corner, corner + side]^n.
struct Box {
  int dim = 1;
  Point corner{0.0, 0.0};
  double side = 1.0;

  static Box interval(double lo, double hi);
  static Box square(double x0, double y0, double side);
  static Box centered(int dim, const Point& center, double half_side);

  double lo(int axis) const { return corner[static_cast<std::size_t>(axis)]; }
  double hi(int axis) const { return corner[static_cast<std::size_t>(axis)] + side; }
  double volume() const;
  Point center() const;
  // Closed containment with an absolute slack.
  bool contains(const Point& x, double slack = 0.0) const;
  bool contains(const Box& other, double slack = 0.0) const;
  // Same center, twice the side.
  Box doubled() const;
  std::string to_string() const;

  friend bool operator==(const Box&, const Box&) = default;
};

void validate(const Box& box);

// Uniform node layout over a box. Node count per axis is side/h + 1, the
// layout is row-major with the first axis slowest.
class Grid {
 public:
  Grid(Box box, double spacing);

  const Box& box() const { return box_; }
  double spacing() const { return h_; }
  int dim() const { return box_.dim; }
  std::size_t per_axis() const { return per_axis_; }
  std::size_t size() const { return size_; }
  double cell_volume() const;

  Point node(std::size_t idx) const;
  std::array<std::size_t, 2> multi_index(std::size_t idx) const;
  std::size_t index(std::size_t i0, std::size_t i1 = 0) const;
  // Trapezoid weight of the node, including the h^n factor.
  double weight(std::size_t idx) const;
  // Index of the node located at x (within 1e-9 h), if any.
  std::optional<std::size_t> locate(const Point& x) const;
  // Index of the node nearest to x (clamped to the box).
  std::size_t nearest(const Point& x) const;
  // Node index interval [first, last] along `axis` of the nodes inside
  // [lo, hi]; throws ConfigError if lo or hi is not on a node.
  std::array<std::size_t, 2> aligned_range(int axis, double lo, double hi) const;

  friend bool operator==(const Grid& a, const Grid& b);

 private:
  Box box_;
  double h_;
  std::size_t per_axis_;
  std::size_t size_;
};

class SampledFunction {
 public:
  explicit SampledFunction(Grid grid);
  SampledFunction(Grid grid, std::vector<double> values);
  static SampledFunction constant(const Grid& grid, double value);

  const Grid& grid() const { return grid_; }
  const Box& box() const { return grid_.box(); }
  double spacing() const { return grid_.spacing(); }
  int dim() const { return grid_.dim(); }
  std::size_t size() const { return values_.size(); }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  // Value at a node; throws ConfigError if x is not a node.
  double at(const Point& x) const;

  SampledFunction& operator+=(const SampledFunction& other);
  SampledFunction& operator-=(const SampledFunction& other);
  SampledFunction& operator*=(double c);
  SampledFunction& multiply_pointwise(const SampledFunction& other);

  double max_abs() const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

SampledFunction operator+(SampledFunction a, const SampledFunction& b);
SampledFunction operator-(SampledFunction a, const SampledFunction& b);
SampledFunction operator*(double c, SampledFunction a);

using PointRule = std::function<double(const Point&)>;

// Samples `rule` at every node. Throws ConfigError when h does not divide the
// side and KernelError on a non-finite value.
SampledFunction sample(const Box& box, double h, const PointRule& rule);
SampledFunction sample(const Grid& grid, const PointRule& rule);
// Indicator of a box sampled by exact cell averages (each node carries the
// fraction of its cell [x - h/2, x + h/2]^n lying in `region`).
SampledFunction sample_indicator(const Grid& grid, const Box& region);

class NodeMask {
 public:
  NodeMask() = default;
  NodeMask(std::size_t size, bool value) : bits_(size, value ? 1 : 0) {}

  std::size_t size() const { return bits_.size(); }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  void set(std::size_t i, bool value) { bits_[i] = value ? 1 : 0; }
  std::size_t count() const;
  NodeMask operator&(const NodeMask& other) const;

 private:
  std::vector<std::uint8_t> bits_;
};

// Nodes whose distance to the box boundary is at least `radius`. Throws
// DegenerateDomainError when no node qualifies.
NodeMask guard_band(const Grid& grid, double radius);
NodeMask guard_band(const SampledFunction& f, double radius);
// Nodes inside the closed box.
NodeMask box_mask(const Grid& grid, const Box& region);

// Trapezoid rule, optionally restricted to the masked nodes.
double integrate(const SampledFunction& f);
double integrate(const SampledFunction& f, const NodeMask& mask);
// Supremum of |f| over the masked nodes.
double sup_abs(const SampledFunction& f, const NodeMask& mask);
// (integral of |f|^2 over the mask)^(1/2).
double l2_norm(const SampledFunction& f, const NodeMask& mask);

enum class ScaleMeasure { log_uniform, dyadic };

// Discretisation of a measure d tau(t) on [t_min, t_max]. The log-uniform kind
// realises dt/t with the midpoint rule in log t: K nodes at
// t_min * (t_max/t_min)^((j + 1/2)/K) with equal weights log(t_max/t_min)/K,
// K = J * log2(t_max/t_min) rounded up (weights are ln2/J when the ratio is a
// power of two). The dyadic kind puts unit masses at the points 2^-k inside
// [t_min, t_max].
class ScaleGrid {
 public:
  ScaleGrid(double t_min, double t_max, int per_octave,
            ScaleMeasure kind = ScaleMeasure::log_uniform);
  static ScaleGrid dyadic(double t_min, double t_max);

  double t_min() const { return t_min_; }
  double t_max() const { return t_max_; }
  int per_octave() const { return per_octave_; }
  ScaleMeasure kind() const { return kind_; }
  std::size_t size() const { return nodes_.size(); }
  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }

  // Nodes with index in [first, last).
  ScaleGrid subset(std::size_t first, std::size_t last) const;

 private:
  ScaleGrid() = default;
  double t_min_ = 0.0;
  double t_max_ = 0.0;
  int per_octave_ = 0;
  ScaleMeasure kind_ = ScaleMeasure::log_uniform;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

// Quadrature of the scale measure: sum of weight_j * values_j.
double scale_integrate(std::span<const double> values, const ScaleGrid& grid);

// One sampled slice per scale node, all on the same spatial grid.
struct ScaleField {
  ScaleGrid scales;
  std::vector<SampledFunction> slices;

  const Grid& grid() const;
};

enum class ConvolutionMethod { direct, fourier };

// h^n * sum_j f(y_j) k(x_i - y_j) evaluated at the nodes x_i of f's grid, with
// f extended by zero outside its box. The kernel grid must use the same
// spacing and contain the origin as a node.
SampledFunction convolve(const SampledFunction& f, const SampledFunction& kernel,
                         ConvolutionMethod method = ConvolutionMethod::fourier);
// Direct evaluation at a subset of f's nodes.
std::vector<double> convolve_at(const SampledFunction& f, const SampledFunction& kernel,
                                std::span<const std::size_t> nodes);

// Finite families of cubes. Dyadic families enumerate every dyadic subcube of
// the root with depth in [min_depth, max_depth] (depth-major, then row-major).
// The centered family is the set of cubes centered at grid nodes with half
// sides r*h, r = 0..max_radius; it is never materialised.
class CubeFamily {
 public:
  enum class Kind { dyadic, centered, list };

  static CubeFamily dyadic(const Box& root, int min_depth, int max_depth);
  static CubeFamily centered(const Grid& grid, std::size_t max_radius_nodes);
  static CubeFamily from_list(std::vector<Box> cubes);

  Kind kind() const { return kind_; }
  const Box& root() const { return root_; }
  int min_depth() const { return min_depth_; }
  int max_depth() const { return max_depth_; }
  std::size_t max_radius_nodes() const { return max_radius_; }
  // Materialised cubes; throws ContractError for the centered kind.
  const std::vector<Box>& cubes() const;
  std::string description() const;

 private:
  Kind kind_ = Kind::list;
  Box root_{};
  int min_depth_ = 0;
  int max_depth_ = 0;
  std::size_t max_radius_ = 0;
  std::vector<Box> cubes_;
};

}  // namespace sqfn
