#pragma once

// Weights and the Muckenhoupt estimator, weighted norms, the Hölder index and
// the Calderón-Zygmund decomposition of unions of boxes.
//
// Every API takes measure densities. A weight w in L^p(w^p) is passed as the
// density w^p; density_from_weight / weight_from_density do the conversion.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sqfn/grid.hpp"

namespace sqfn {

// w(x) = scale * shape(x). The scale is kept apart from the shape so that
// quantities invariant under w -> c w are computed from the shape alone.
class WeightFn {
 public:
  using Rule = std::function<double(const Point&)>;

  static WeightFn constant(int dim, double c = 1.0);
  // |x|^a.
  static WeightFn power(int dim, double a);
  static WeightFn from_rule(int dim, std::string tag, Rule rule);

  int dim() const { return dim_; }
  const std::string& tag() const { return tag_; }
  double scale() const { return scale_; }
  // Exponent a for power weights (0 for constants).
  std::optional<double> power_exponent() const { return power_; }
  bool is_constant() const { return power_ && *power_ == 0.0; }

  double operator()(const Point& x) const { return scale_ * shape_(x); }
  double shape(const Point& x) const { return shape_(x); }

  WeightFn scaled(double c) const;
  // w^e; power weights stay power weights.
  WeightFn pow(double e) const;

  // Integral of the shape over a box (exact for constants and for power
  // weights in one dimension, Gauss-Legendre with refinement towards the
  // origin otherwise). Power weights with a <= -n throw DegenerateWeightError.
  double shape_integral(const Box& box) const;
  double integral(const Box& box) const { return scale_ * shape_integral(box); }
  double average(const Box& box) const { return integral(box) / box.volume(); }

 private:
  int dim_ = 1;
  std::string tag_;
  Rule shape_;
  double scale_ = 1.0;
  std::optional<double> power_;
};

// Density of L^p(w^p), i.e. w^p, and back.
WeightFn density_from_weight(const WeightFn& w, double p);
WeightFn weight_from_density(const WeightFn& density, double p);

// -n < a < n(p - 1).
bool power_weight_in_ap(int dim, double a, double p);

// Nodes get w(x); a node where w is not finite (the origin of a negative
// power) gets the average of w over its cell.
SampledFunction sample_weight(const WeightFn& w, const Grid& grid);

struct ApEstimate {
  double p = 2.0;
  double value = 1.0;
  std::string family;
  Box cube{};
  std::size_t cubes = 0;
};

// (avg_Q w) (avg_Q w^(1 - p'))^(p - 1) for one cube.
double ap_cube_value(const WeightFn& w, double p, const Box& cube);
// Max of ap_cube_value over the family (dyadic or list). Throws
// ParameterError for p <= 1, DegenerateWeightError on a cube where one of the
// averages vanishes or is not finite.
ApEstimate ap_constant(const WeightFn& w, double p, const CubeFamily& family);

// (integral of |f|^p density)^(1/p), trapezoid rule, p > 0.
double weighted_lp_norm(const SampledFunction& f, const SampledFunction& density, double p);
double weighted_lp_norm(const SampledFunction& f, const SampledFunction& density, double p,
                        const NodeMask& mask);
double weighted_lp_norm(const SampledFunction& f, const WeightFn& density, double p);

// 1/p = sum 1/p_i, every p_i in (1, inf).
double holder_index(std::span<const double> ps);

// Lebesgue measure of a finite union of boxes, and of its intersection with a
// box.
double union_measure(std::span<const Box> set);
double intersection_measure(std::span<const Box> set, const Box& cube);

// Maximal dyadic subcubes of `root` (depth <= max_depth) on which the average
// of chi_E exceeds lambda, in depth-first order. lambda in (0, 1).
std::vector<Box> cz_decompose(std::span<const Box> set, double lambda, const Box& root,
                              int max_depth);

struct Lemma44Result {
  // (integral of (d + |x - x0|)^(-np) w)^(1/p): grid part plus tail bound.
  double norm = 0.0;
  double box_part = 0.0;
  double tail_bound = 0.0;
  // ||chi_B(x0, d)||_{L^p(w)} on the grid.
  double ball_norm = 0.0;
  // ||M chi_B(x0, d)||_{L^p(w)} on the grid, centred cubes.
  double maximal_norm = 0.0;
  // norm * d^n / ball_norm and norm * d^n / maximal_norm.
  double ratio_ball = 0.0;
  double ratio_maximal = 0.0;
};

// w is the measure density of L^p(w). The tail outside the grid box is
// bounded by the radial integral over |x| > L (L the inscribed radius), which
// needs a power weight with a < n(p - 1) and |x0| < L.
Lemma44Result lemma44_check(const WeightFn& w, double p, const Point& x0, double d,
                            const Grid& grid);

}  // namespace sqfn
