#pragma once

// Kernel profiles (the undilated functions psi with psi_t(x) = t^-n psi(x/t)),
// multilinear kernel specifications and the sampling validators for the size,
// regularity and Fourier conditions.
//
// Fourier convention: psi_hat(xi) = integral of psi(x) exp(-i x.xi) dx.

#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sqfn/grid.hpp"

namespace sqfn {

class Profile {
 public:
  virtual ~Profile() = default;

  virtual int dim() const = 0;
  virtual std::string name() const = 0;
  virtual double eval(const Point& x) const = 0;
  // Radius of a ball containing the support, +inf when not compactly supported.
  virtual double support_radius() const = 0;
  // Integral over R^n.
  virtual double mass() const = 0;
  // Continuous profiles are sampled pointwise, the others (indicators) by
  // exact or quadrature cell averages.
  virtual bool sampled_pointwise() const { return true; }
  // Integral of the undilated profile over a box.
  virtual double cell_integral(const Box& cell) const;
  virtual std::optional<std::complex<double>> fourier(const Point& xi) const;

  // t^-n psi(x / t).
  virtual double eval_dilated(double t, const Point& x) const;

  // psi_t sampled on the cube centred at the origin with half side
  // min(support * t, max_radius) rounded up to a multiple of h. Pointwise
  // sampled, compactly supported profiles get a discrete mass correction (a
  // multiple of the sampled bump at the same scale) so that h^n * sum equals
  // mass() up to rounding; it only matters when t is a few h.
  SampledFunction sample_dilated(double t, double h, double max_radius = INFINITY) const;
};

using ProfilePtr = std::shared_ptr<const Profile>;

// Samples a profile (t = 1) on an arbitrary grid, pointwise or by cell
// averages depending on sampled_pointwise().
SampledFunction sample_profile(const Profile& p, const Grid& grid);

// c_n exp(-1 / (1 - |x|^2)) on |x| < 1.
ProfilePtr standard_bump(int dim);
// Normalising constant c_n of the standard bump.
double bump_constant(int dim);

// (1 + |x|)^-M, i.e. the majorant at t = 1.
ProfilePtr majorant_profile(int dim, double M);
double majorant_eval(int dim, double M, double t, const Point& x);

// chi_(0,1) - chi_(-1,0).
ProfilePtr ex38_psi();
std::complex<double> ex38_psihat(double xi);
// Indicator of a box, as a profile (t = 1).
ProfilePtr indicator_profile(const Box& box);
// (1 - |x|)_+^alpha.
ProfilePtr cusp_profile(int dim, double alpha);
// Profile from a pointwise rule; mass is computed by quadrature over the
// support ball when not given.
ProfilePtr function_profile(int dim, std::string name, std::function<double(const Point&)> rule,
                            double support_radius, std::optional<double> mass = std::nullopt,
                            bool pointwise = true);
// c * p.
ProfilePtr scaled_profile(ProfilePtr p, double c);

struct DerivedFamily {
  ProfilePtr phi;
  // phi * phi.
  ProfilePtr g;
  // Psi = div(x g), the kernel of Q_t.
  ProfilePtr psi;
  // psi1[k] = -2 d_k phi, psi2[k] = x_k phi.
  std::vector<ProfilePtr> psi1;
  std::vector<ProfilePtr> psi2;
  // Global sign with Q_t = sign * sum_k Q_t^{1,k} Q_t^{2,k} under the transform
  // convention above.
  int factorization_sign = -1;
};

DerivedFamily derived_family(int dim);

struct DerivedExponents {
  double eta = 0.0;
  double gamma_prime = 0.0;
  double N_prime = 0.0;
};

DerivedExponents derived_exponents(double N, double gamma, int n);

// Scalar field multiplying the product of slot convolutions, evaluated on a
// grid at a given scale.
struct Multiplier {
  std::string name = "1";
  std::function<SampledFunction(const Grid&, double)> field;
  bool unit = true;
  // Independent of x at every scale (convolution-type operators).
  bool x_constant = true;
  double sup_bound = 1.0;

  SampledFunction operator()(const Grid& grid, double t) const { return field(grid, t); }

  static Multiplier one();
  static Multiplier constant(double c);
  // beta(x, t) given pointwise.
  static Multiplier beta(std::string name, std::function<double(const Point&, double)> rule,
                         double sup_bound);
  // x -> (psi_t * b)(x), b sampled on the working grid.
  static Multiplier q_t_b(ProfilePtr psi, ProfilePtr b);
  static Multiplier product(Multiplier a, Multiplier b);
};

struct ProductTerm {
  double coeff = 1.0;
  Multiplier multiplier;
  std::vector<ProfilePtr> slots;
};

using GeneralRule = std::function<double(double t, const Point& x, std::span<const Point> ys)>;

struct MLKernelSpec {
  std::string name;
  int m = 1;
  int n = 1;
  double N = 2.0;
  double gamma = 1.0;
  bool t_constant = false;
  // Product-convolution form: theta_t(x, y) = sum over terms of
  // coeff * multiplier(x, t) * prod_i slot_i,t(x - y_i).
  std::vector<ProductTerm> terms;
  // General form, used when `terms` is empty.
  GeneralRule general;

  bool is_product() const { return !terms.empty(); }
  // Throws ParameterError or ConfigError on inconsistent fields.
  void validate() const;
};

// Convolution-type product spec with a single term.
MLKernelSpec product_spec(std::string name, std::vector<ProfilePtr> slots,
                          Multiplier multiplier = Multiplier::one(), double N = 2.0,
                          double gamma = 1.0);

// General-form expansion of a product spec, using the same sampled kernel
// values (spacing h) that the convolution path uses. Points passed to the rule
// must be nodes of a grid with spacing h; x must be a node of `grid`.
MLKernelSpec expand_to_general(const MLKernelSpec& spec, const Grid& grid);

// Pointwise kernel value. For product forms x must be a node of `grid` (the
// multiplier is a field on it); slot kernels are evaluated pointwise.
double theta_point(const MLKernelSpec& spec, const Grid& grid, double t, const Point& x,
                   std::span<const Point> ys);

// Deterministic sampling plan for the validators. Level l uses the first
// base_points * 4^l offset vectors of a Halton sequence and every
// max(1, x_stride >> l)-th guard-banded node, so plans are nested and the
// sampled suprema never decrease with the level.
struct SamplePlan {
  Grid grid;
  ScaleGrid scales;
  int level = 0;
  std::size_t base_points = 64;
  std::size_t x_stride = 64;
  // Offsets y_i - x range over [-reach * t, reach * t]^n.
  double reach = 4.0;
  double guard = 0.0;
};

struct ValidatorResult {
  double constant = 0.0;
  double t = 0.0;
  Point x{0.0, 0.0};
  std::size_t samples = 0;
};

ValidatorResult validate_size(const MLKernelSpec& spec, const SamplePlan& plan);
// Offsets |y - y'| in {t/4, t/16, t/64}, extended by t/4^(3+k), k = 1..level.
ValidatorResult validate_holder(const MLKernelSpec& spec, const SamplePlan& plan);

// h * sum_j psi(x_j) exp(-i x_j xi) for a one-dimensional sampled function
// (xi along the first axis in two dimensions).
std::complex<double> dtft(const SampledFunction& psi, double xi);

// sup over the sampled xi of sum_j w_j |psi_hat(t_j xi)|^2. Uses the closed
// form transform when the profile has one, otherwise the transform of psi
// sampled at spacing h. Throws ContractError if psi is not mean zero.
double fourier_admissibility(const Profile& psi, std::span<const double> xis,
                             const ScaleGrid& grid, double h = 1.0 / 1024);

}  // namespace sqfn
