#pragma once

// Carleson, strong Carleson and two-cube constants of measures
// F(x, t) d tau(t) dx over finite cube families, tents over unions of boxes
// and the closed-form bound constants of the weighted estimates.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sqfn/grid.hpp"
#include "sqfn/kernels.hpp"
#include "sqfn/operators.hpp"
#include "sqfn/weights.hpp"

namespace sqfn {

// Density F >= 0 sampled per scale node, together with the nodes where it is
// certified (free of truncation effects).
struct CarlesonField {
  ScaleField field;
  NodeMask mask;
  // F(., t) does not depend on x (convolution-type operators).
  bool x_constant = false;

  const Grid& grid() const { return field.grid(); }
  const ScaleGrid& scales() const { return field.scales; }
};

// Checks F >= 0 and finite, and that the mask matches the grid.
CarlesonField make_field(ScaleField field, NodeMask mask, bool x_constant = false);

// F(x, t) = |Theta_t(1, ..., 1)(x)|^2. Product forms are exact on the whole
// grid; general forms are masked by the guard band (default reach(t_max)).
// For x-constant operators the per-scale variation is checked against 1e-8
// (KernelError). The field is refused above 2^24 stored values.
CarlesonField theta_one_field(const ThetaOperator& op, const ScaleGrid& scales,
                              std::optional<double> guard = {});

// sum over t_j <= ell of w_j F(x, t_j), at every node.
SampledFunction truncated_scale_integral(const CarlesonField& f, double ell);

enum class CarlesonKind { carleson, strong, two_cube };
std::string to_string(CarlesonKind kind);

struct CubeValue {
  Box cube{};
  double value = 0.0;
  // Attaining node for the strong constant.
  std::optional<Point> point;
};

struct CarlesonReport {
  CarlesonKind kind = CarlesonKind::carleson;
  std::string family;
  std::vector<CubeValue> cubes;
  double supremum = 0.0;
  Box cube{};
  std::optional<Point> point;
};

// max over Q of (1/|Q|) int_Q sum_{t_j <= l(Q)} w_j F(x, t_j) dx. Cubes must be
// grid aligned and inside the mask (ContractError otherwise).
CarlesonReport carleson_constant(const CarlesonField& f, const CubeFamily& family);
// Same with the average over Q replaced by the max over the nodes of Q.
CarlesonReport strong_carleson_constant(const CarlesonField& f, const CubeFamily& family);

// Nested pairs (R, Q), R inside Q.
struct CubePair {
  Box inner;
  Box outer;
};

// max over pairs of (1/|R|) int_R sum_{l(R) <= t_j <= l(Q)} w_j
// |Theta_t(chi_(2R)^c, ...) - Theta_t(chi_(2Q)^c, ...)|^2 dx. The complements
// are truncated to the grid box; the kernel support at scale l(Q) around R
// must stay inside the box, so that the truncation does not reach R.
CarlesonReport two_cube_constant(const ThetaOperator& op, std::span<const CubePair> pairs,
                                 const ScaleGrid& scales);

// E-hat = {(x, t) : B(x, t) inside E} for a finite union E of boxes.
class Tent {
 public:
  explicit Tent(std::vector<Box> set);

  bool contains(const Point& x, double t) const;
  const std::vector<Box>& set() const { return set_; }

 private:
  std::vector<Box> set_;
  int dim_ = 1;
  Box hull_{};
  // Cells {x0, x1, y0, y1} of the breakpoint lattice inside the hull that E
  // does not cover.
  std::vector<std::array<double, 4>> holes_;
};

struct TentBound {
  double lhs = 0.0;
  double rhs = 0.0;
  double strong = 0.0;
  double w_of_E = 0.0;
};

// lhs = sum_j w_j int w(x) F(x, t_j) [B(x, t_j) in E] dx over the masked
// nodes; rhs = strong constant on `family` times int_E w. `w` is the density
// of the measure w dx.
TentBound tent_bound_check(const CarlesonField& f, const WeightFn& w, std::span<const Box> set,
                           const CubeFamily& family);

struct EmbeddingRatio {
  double ratio = 0.0;
  double numerator = 0.0;
  double strong = 0.0;
  double ap = 0.0;
  double f_norm = 0.0;
};

// (int int |phi_t * f(x)|^p w(x) F(x, t) d tau dx)^(1/p) divided by
// ||mu||_SC^(1/p) [w]_{A_p}^(1/(p-1)) ||f||_{L^p(w)}, w the density of L^p(w).
// Returns 0 when the numerator vanishes.
EmbeddingRatio embedding_ratio(const CarlesonField& f, const Profile& phi, const SampledFunction& u,
                               const WeightFn& w, double p, const CubeFamily& carleson_family,
                               const CubeFamily& ap_family);

// prod_i (1 + a_i^(max(1, r_i) + max(1/2, r_i))) + sc^(m/2) prod_i a_i^r_i with
// r_i = p_i'/p_i and a_i = [w_i^p_i]_{A_p_i}.
double bound_constant_43(std::span<const double> ap, std::span<const double> ps, double sc, int m);

// prod_i 2 B^(max(1, s_i) + max(1/2, s_i)) + sc^(m/2) prod_i B^s_i with
// s_i = 1/(q_i - 1); the dimensional constant is 1. B > 1.
double c0_of_B(double B, std::span<const double> qs, double sc, int m);

}  // namespace sqfn
