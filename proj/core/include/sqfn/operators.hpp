#pragma once

// Operators built from kernel specs: the smoothing and mean-zero convolutions
// P_t, Q_t, Q_t^{i,k}, the multilinear Theta_t, the square functions, the
// maximal functions and the numerical checks on decay and reproduction.

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "sqfn/grid.hpp"
#include "sqfn/kernels.hpp"

namespace sqfn {

enum class EvalStrategy { product_convolution, general_quadrature };

class ThetaOperator {
 public:
  // General quadrature costs size^(m+1) kernel evaluations per scale; it is
  // refused (CapacityError) above 2^28 or for m > 2.
  ThetaOperator(MLKernelSpec spec, Grid grid,
                EvalStrategy strategy = EvalStrategy::product_convolution);

  const MLKernelSpec& spec() const { return spec_; }
  const Grid& grid() const { return grid_; }
  EvalStrategy strategy() const { return strategy_; }
  int arity() const { return spec_.m; }

  SampledFunction apply(double t, std::span<const SampledFunction> fs) const;
  // Theta_t(1, ..., 1). Product forms use the exact slot masses, so the field
  // is free of truncation; general forms apply the operator to ones, which is
  // only meaningful on the guard band of reach(t).
  SampledFunction apply_to_ones(double t) const;
  // Radius of the kernel support in x - y_i at scale t (grid side when unknown).
  double reach(double t) const;

 private:
  MLKernelSpec spec_;
  Grid grid_;
  EvalStrategy strategy_;
};

SampledFunction apply_P(const Profile& phi, double t, const SampledFunction& f);
SampledFunction apply_Pprod(const Profile& phi, double t, std::span<const SampledFunction> fs);
SampledFunction apply_Q(const DerivedFamily& fam, double t, const SampledFunction& f);
// i in {1, 2}, k in [0, n).
SampledFunction apply_Qik(const DerivedFamily& fam, int i, int k, double t, const SampledFunction& f);
// Slot j (1-based) gets Q_s, the others P_s(P_s f).
std::vector<SampledFunction> apply_pi(const DerivedFamily& fam, int j, double s,
                                      std::span<const SampledFunction> fs);

struct SquareFunctionResult {
  ScaleGrid scales;
  SampledFunction S;
  NodeMask mask;
  // Only filled when requested.
  std::optional<ScaleField> field;
};

// S(x) = (sum_j w_j |Theta_{t_j} f(x)|^2)^(1/2). The mask is the guard band of
// `guard` (default: reach(t_max)).
SquareFunctionResult square_function(const ThetaOperator& op, std::span<const SampledFunction> fs,
                                     const ScaleGrid& scales, std::optional<double> guard = {},
                                     bool keep_field = false);
SquareFunctionResult g_psi(ProfilePtr psi, const SampledFunction& f, const ScaleGrid& scales,
                           std::optional<double> guard = {});

// R = op - U with U = Theta_t(1, ..., 1)(x) * P_t f_1 ... P_t f_m.
std::pair<ThetaOperator, ThetaOperator> split_theta(const ThetaOperator& op);

// Sup over the family's cubes containing x of the average of |f| (f extended
// by zero). Dyadic and list families need grid-aligned cubes.
SampledFunction hl_maximal(const SampledFunction& f, const CubeFamily& family);

// Sup over scales t and nodes y with |x - y| < t of |phi_t * f(y)|.
SampledFunction nt_maximal(const Profile& phi, const SampledFunction& f, const ScaleGrid& scales);

// || Theta_t f - sum_j int_eps^{1/eps} Theta_t Pi_{j,s} f ds/s ||_{L^2(mask)},
// the s-integral discretised with a log-uniform ScaleGrid of per_octave nodes.
double reproducing_residual(const ThetaOperator& op, const DerivedFamily& fam,
                            std::span<const SampledFunction> fs, double t, double eps,
                            const NodeMask& mask, int per_octave = 16);

// Ratio of the almost-orthogonality integral to its bound, sup over the
// sampled differences x - y (first axis direction in two dimensions).
double almost_orth_ratio(int n, double M, double L, double s, double t,
                         std::span<const double> differences);

struct PiDecay {
  double numerator = 0.0;
  double denominator = 0.0;
  double ratio = 0.0;
};

// Numerator ||Theta_t Pi_{j,s} f||_inf on the mask; the denominator uses
// dyadic maximal functions over the grid box and gamma' of the operator's kernel. For s > t
// the operator must annihilate constants (ContractError otherwise).
PiDecay pi_decay_ratio(const ThetaOperator& op, const DerivedFamily& fam, int j, double s,
                       double t, std::span<const SampledFunction> fs, const NodeMask& mask);

// Least-squares slope of log ||Theta_t Pi_{j,s} f||_inf against
// log min(s/t, t/s) for s = t 2^-k (and t 2^k when `both_sides`), k = 1..octaves.
double pi_decay_slope(const ThetaOperator& op, const DerivedFamily& fam, int j, double t,
                      std::span<const SampledFunction> fs, const NodeMask& mask, int octaves,
                      bool both_sides);

struct TailBounds {
  double ratio35 = 0.0;
  // NaN when no cube was given.
  double ratio36 = 0.0;
};

// Sets are boxes (nullopt for the empty set). ratio36 needs some E_i with 2Q
// inside its complement.
TailBounds kernel_tail_bounds(const ThetaOperator& op, std::span<const std::optional<Box>> sets,
                              const std::optional<Box>& cube, double t, const NodeMask& mask);

// Least-squares slope of log y against log x.
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace sqfn
