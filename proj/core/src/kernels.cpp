#include "sqfn/kernels.hpp"

#include <algorithm>
#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <map>
#include <mutex>

#include "sqfn/errors.hpp"

namespace sqfn {
namespace {

using boost::math::quadrature::gauss;
constexpr double kPi = boost::math::constants::pi<double>();

double overlap(double a, double b, double lo, double hi) {
  return std::max(0.0, std::min(b, hi) - std::max(a, lo));
}

// Composite Gauss-Legendre over a box, s x s sub-cells.
double box_quadrature(int dim, const Box& cell, int s,
                      const std::function<double(const Point&)>& f) {
  double w = cell.side / s;
  double total = 0.0;
  for (int i = 0; i < s; ++i) {
    double a0 = cell.corner[0] + i * w;
    if (dim == 1) {
      total += gauss<double, 8>::integrate([&](double x) { return f({x, 0.0}); }, a0, a0 + w);
      continue;
    }
    for (int j = 0; j < s; ++j) {
      double a1 = cell.corner[1] + j * w;
      total += gauss<double, 8>::integrate(
          [&](double x) {
            return gauss<double, 8>::integrate([&](double y) { return f({x, y}); }, a1, a1 + w);
          },
          a0, a0 + w);
    }
  }
  return total;
}

double van_der_corput(std::size_t i, unsigned base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19};

class BumpProfile final : public Profile {
 public:
  explicit BumpProfile(int dim) : dim_(dim), c_(bump_constant(dim)) {}
  int dim() const override { return dim_; }
  std::string name() const override { return "standard_bump"; }
  double eval(const Point& x) const override {
    double r2 = x[0] * x[0] + (dim_ == 2 ? x[1] * x[1] : 0.0);
    if (r2 >= 1.0) return 0.0;
    return c_ * std::exp(-1.0 / (1.0 - r2));
  }
  // d/dx_k of the bump.
  double partial(const Point& x, int k) const {
    double r2 = x[0] * x[0] + (dim_ == 2 ? x[1] * x[1] : 0.0);
    if (r2 >= 1.0) return 0.0;
    double q = 1.0 - r2;
    return eval(x) * (-2.0 * x[static_cast<std::size_t>(k)] / (q * q));
  }
  double support_radius() const override { return 1.0; }
  double mass() const override { return 1.0; }

 private:
  int dim_;
  double c_;
};

std::shared_ptr<const BumpProfile> bump_instance(int dim) {
  static const auto one = std::make_shared<const BumpProfile>(1);
  static const auto two = std::make_shared<const BumpProfile>(2);
  if (dim == 1) return one;
  if (dim == 2) return two;
  throw ConfigError("dimension must be 1 or 2");
}

// Radial table of g = phi * phi and dg/dr on [0, 2], cubic Hermite
// interpolation. Entries are trapezoid sums on a lattice whose spacing
// divides the table step, which for the smooth compactly supported integrand
// is accurate to rounding.
class RadialTable {
 public:
  explicit RadialTable(int dim) {
    const BumpProfile& phi = *bump_instance(dim);
    if (dim == 1) {
      const long half = 4096;
      step_ = 1.0 / half;
      std::vector<double> p(2 * half + 1), dp(2 * half + 1);
      for (long j = -half; j <= half; ++j) {
        Point y{static_cast<double>(j) * step_, 0.0};
        p[static_cast<std::size_t>(j + half)] = phi.eval(y);
        dp[static_cast<std::size_t>(j + half)] = phi.partial(y, 0);
      }
      std::size_t count = 2 * static_cast<std::size_t>(half) + 1;
      g_.assign(count, 0.0);
      dg_.assign(count, 0.0);
      for (long k = 0; k <= 2 * half; ++k) {
        double s = 0.0, ds = 0.0;
        // r - y must lie in [-1, 1]: y in [k - half, half] (lattice units).
        for (long j = k - half; j <= half; ++j) {
          std::size_t a = static_cast<std::size_t>(j + half);
          std::size_t b = static_cast<std::size_t>(k - j + half);
          s += p[a] * p[b];
          ds += p[a] * dp[b];
        }
        g_[static_cast<std::size_t>(k)] = s * step_;
        dg_[static_cast<std::size_t>(k)] = ds * step_;
      }
      return;
    }
    const long half = 256;
    step_ = 1.0 / half;
    const long w = 2 * half + 1;
    std::vector<double> p(static_cast<std::size_t>(w * w)), dp(p.size());
    for (long i = 0; i < w; ++i)
      for (long j = 0; j < w; ++j) {
        Point y{static_cast<double>(i - half) * step_, static_cast<double>(j - half) * step_};
        p[static_cast<std::size_t>(i * w + j)] = phi.eval(y);
        dp[static_cast<std::size_t>(i * w + j)] = phi.partial(y, 0);
      }
    g_.assign(static_cast<std::size_t>(2 * half + 1), 0.0);
    dg_.assign(g_.size(), 0.0);
    double cell = step_ * step_;
    for (long k = 0; k <= 2 * half; ++k) {
      double s = 0.0, ds = 0.0;
      // g(r e1) = sum_y phi(y) phi(r e1 - y); first index of r e1 - y is k - i.
      for (long i = k - half; i <= half; ++i) {
        long i2 = k - i;
        const double* pa = &p[static_cast<std::size_t>((i + half) * w)];
        const double* pb = &p[static_cast<std::size_t>((i2 + half) * w)];
        const double* db = &dp[static_cast<std::size_t>((i2 + half) * w)];
        for (long j = 0; j < w; ++j) {
          // second index of r e1 - y is -y_2
          long j2 = w - 1 - j;
          s += pa[j] * pb[j2];
          ds += pa[j] * db[j2];
        }
      }
      g_[static_cast<std::size_t>(k)] = s * cell;
      dg_[static_cast<std::size_t>(k)] = ds * cell;
    }
  }

  // Returns (g(r), g'(r)).
  std::pair<double, double> operator()(double r) const {
    double u = r / step_;
    auto n = static_cast<double>(g_.size() - 1);
    if (u >= n) return {0.0, 0.0};
    auto i = static_cast<std::size_t>(u);
    double s = u - static_cast<double>(i);
    double y0 = g_[i], y1 = g_[i + 1];
    double m0 = dg_[i] * step_, m1 = dg_[i + 1] * step_;
    double s2 = s * s, s3 = s2 * s;
    double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
    double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
    double v = h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1;
    double d00 = 6 * s2 - 6 * s, d10 = 3 * s2 - 4 * s + 1;
    double d01 = -6 * s2 + 6 * s, d11 = 3 * s2 - 2 * s;
    double dv = (d00 * y0 + d10 * m0 + d01 * y1 + d11 * m1) / step_;
    return {v, dv};
  }

 private:
  double step_ = 0.0;
  std::vector<double> g_;
  std::vector<double> dg_;
};

const RadialTable& radial_table(int dim) {
  if (dim == 1) {
    static const RadialTable t1(1);
    return t1;
  }
  static const RadialTable t2(2);
  return t2;
}

class SquaredBump final : public Profile {
 public:
  explicit SquaredBump(int dim) : dim_(dim), table_(radial_table(dim)) {}
  int dim() const override { return dim_; }
  std::string name() const override { return "bump_squared"; }
  double eval(const Point& x) const override { return table_(norm(x, dim_)).first; }
  double support_radius() const override { return 2.0; }
  double mass() const override { return 1.0; }

 private:
  int dim_;
  const RadialTable& table_;
};

// n g(r) + r g'(r), the divergence of x g(x) for radial g.
class DerivedPsi final : public Profile {
 public:
  explicit DerivedPsi(int dim) : dim_(dim), table_(radial_table(dim)) {}
  int dim() const override { return dim_; }
  std::string name() const override { return "derived_psi"; }
  double eval(const Point& x) const override {
    double r = norm(x, dim_);
    auto [g, dg] = table_(r);
    return dim_ * g + r * dg;
  }
  double support_radius() const override { return 2.0; }
  double mass() const override { return 0.0; }

 private:
  int dim_;
  const RadialTable& table_;
};

class DerivedPsi1 final : public Profile {
 public:
  DerivedPsi1(int dim, int k) : dim_(dim), k_(k), phi_(bump_instance(dim)) {}
  int dim() const override { return dim_; }
  std::string name() const override { return "derived_psi1_" + std::to_string(k_ + 1); }
  double eval(const Point& x) const override { return -2.0 * phi_->partial(x, k_); }
  double support_radius() const override { return 1.0; }
  double mass() const override { return 0.0; }

 private:
  int dim_;
  int k_;
  std::shared_ptr<const BumpProfile> phi_;
};

class DerivedPsi2 final : public Profile {
 public:
  DerivedPsi2(int dim, int k) : dim_(dim), k_(k), phi_(bump_instance(dim)) {}
  int dim() const override { return dim_; }
  std::string name() const override { return "derived_psi2_" + std::to_string(k_ + 1); }
  double eval(const Point& x) const override {
    return x[static_cast<std::size_t>(k_)] * phi_->eval(x);
  }
  double support_radius() const override { return 1.0; }
  double mass() const override { return 0.0; }

 private:
  int dim_;
  int k_;
  std::shared_ptr<const BumpProfile> phi_;
};

class MajorantProfile final : public Profile {
 public:
  MajorantProfile(int dim, double M) : dim_(dim), M_(M) {
    if (!(M > dim)) throw ParameterError("majorant exponent must exceed the dimension");
  }
  int dim() const override { return dim_; }
  std::string name() const override { return "majorant"; }
  double eval(const Point& x) const override { return std::pow(1.0 + norm(x, dim_), -M_); }
  double eval_dilated(double t, const Point& x) const override {
    return majorant_eval(dim_, M_, t, x);
  }
  double support_radius() const override { return INFINITY; }
  double mass() const override {
    if (dim_ == 1) return 2.0 / (M_ - 1.0);
    return 2.0 * kPi / ((M_ - 1.0) * (M_ - 2.0));
  }

 private:
  int dim_;
  double M_;
};

class Ex38Psi final : public Profile {
 public:
  int dim() const override { return 1; }
  std::string name() const override { return "ex38_psi"; }
  double eval(const Point& x) const override {
    double v = x[0];
    if (v > 0.0 && v < 1.0) return 1.0;
    if (v < 0.0 && v > -1.0) return -1.0;
    if (v == 1.0) return 0.5;
    if (v == -1.0) return -0.5;
    return 0.0;
  }
  double support_radius() const override { return 1.0; }
  double mass() const override { return 0.0; }
  bool sampled_pointwise() const override { return false; }
  double cell_integral(const Box& cell) const override {
    double a = cell.lo(0), b = cell.hi(0);
    return overlap(a, b, 0.0, 1.0) - overlap(a, b, -1.0, 0.0);
  }
  std::optional<std::complex<double>> fourier(const Point& xi) const override {
    return ex38_psihat(xi[0]);
  }
};

class IndicatorProfile final : public Profile {
 public:
  explicit IndicatorProfile(const Box& box) : box_(box) { validate(box_); }
  int dim() const override { return box_.dim; }
  std::string name() const override { return "indicator" + box_.to_string(); }
  double eval(const Point& x) const override {
    double v = 1.0;
    for (int a = 0; a < box_.dim; ++a) {
      double c = x[static_cast<std::size_t>(a)];
      if (c < box_.lo(a) || c > box_.hi(a)) return 0.0;
      if (c == box_.lo(a) || c == box_.hi(a)) v *= 0.5;
    }
    return v;
  }
  double support_radius() const override {
    double r2 = 0.0;
    for (int a = 0; a < box_.dim; ++a) {
      double m = std::max(std::abs(box_.lo(a)), std::abs(box_.hi(a)));
      r2 += m * m;
    }
    return std::sqrt(r2);
  }
  double mass() const override { return box_.volume(); }
  bool sampled_pointwise() const override { return false; }
  double cell_integral(const Box& cell) const override {
    double v = 1.0;
    for (int a = 0; a < box_.dim; ++a) v *= overlap(cell.lo(a), cell.hi(a), box_.lo(a), box_.hi(a));
    return v;
  }
  std::optional<std::complex<double>> fourier(const Point& xi) const override {
    if (box_.dim != 1) return std::nullopt;
    double w = xi[0];
    if (w == 0.0) return std::complex<double>(box_.side, 0.0);
    using namespace std::complex_literals;
    return (std::exp(-1i * box_.lo(0) * w) - std::exp(-1i * box_.hi(0) * w)) / (1i * w);
  }

 private:
  Box box_;
};

class CuspProfile final : public Profile {
 public:
  CuspProfile(int dim, double alpha) : dim_(dim), alpha_(alpha) {
    if (!(alpha > 0.0)) throw ParameterError("cusp exponent must be positive");
  }
  int dim() const override { return dim_; }
  std::string name() const override { return "cusp"; }
  double eval(const Point& x) const override {
    double r = norm(x, dim_);
    return r >= 1.0 ? 0.0 : std::pow(1.0 - r, alpha_);
  }
  double support_radius() const override { return 1.0; }
  double mass() const override {
    if (dim_ == 1) return 2.0 / (alpha_ + 1.0);
    return 2.0 * kPi / ((alpha_ + 1.0) * (alpha_ + 2.0));
  }

 private:
  int dim_;
  double alpha_;
};

class FunctionProfile final : public Profile {
 public:
  FunctionProfile(int dim, std::string name, std::function<double(const Point&)> rule,
                  double support, std::optional<double> mass, bool pointwise)
      : dim_(dim), name_(std::move(name)), rule_(std::move(rule)), support_(support),
        pointwise_(pointwise) {
    if (dim != 1 && dim != 2) throw ConfigError("dimension must be 1 or 2");
    if (!(support > 0.0)) throw ConfigError("support radius must be positive");
    if (mass) {
      mass_ = *mass;
    } else {
      if (!std::isfinite(support)) throw ConfigError("mass required for non-compact profiles");
      Box ball = Box::centered(dim, {0.0, 0.0}, support);
      mass_ = box_quadrature(dim, ball, 64, rule_);
    }
  }
  int dim() const override { return dim_; }
  std::string name() const override { return name_; }
  double eval(const Point& x) const override { return rule_(x); }
  double support_radius() const override { return support_; }
  double mass() const override { return mass_; }
  bool sampled_pointwise() const override { return pointwise_; }

 private:
  int dim_;
  std::string name_;
  std::function<double(const Point&)> rule_;
  double support_;
  double mass_ = 0.0;
  bool pointwise_;
};

class ScaledProfile final : public Profile {
 public:
  ScaledProfile(ProfilePtr p, double c) : p_(std::move(p)), c_(c) {}
  int dim() const override { return p_->dim(); }
  std::string name() const override { return std::to_string(c_) + "*" + p_->name(); }
  double eval(const Point& x) const override { return c_ * p_->eval(x); }
  double eval_dilated(double t, const Point& x) const override {
    return c_ * p_->eval_dilated(t, x);
  }
  double support_radius() const override { return p_->support_radius(); }
  double mass() const override { return c_ * p_->mass(); }
  bool sampled_pointwise() const override { return p_->sampled_pointwise(); }
  double cell_integral(const Box& cell) const override { return c_ * p_->cell_integral(cell); }
  std::optional<std::complex<double>> fourier(const Point& xi) const override {
    auto f = p_->fourier(xi);
    if (f) return c_ * *f;
    return std::nullopt;
  }

 private:
  ProfilePtr p_;
  double c_;
};

}  // namespace

double Profile::cell_integral(const Box& cell) const {
  double r = support_radius();
  int s = std::isfinite(r) ? static_cast<int>(std::ceil(cell.side * 8.0 / r)) : 8;
  return box_quadrature(dim(), cell, std::clamp(s, 1, 32), [this](const Point& x) { return eval(x); });
}

std::optional<std::complex<double>> Profile::fourier(const Point&) const { return std::nullopt; }

double Profile::eval_dilated(double t, const Point& x) const {
  Point u{x[0] / t, x[1] / t};
  return eval(u) / std::pow(t, dim());
}

SampledFunction Profile::sample_dilated(double t, double h, double max_radius) const {
  if (!(t > 0.0) || !(h > 0.0)) throw ParameterError("scale and spacing must be positive");
  double R = std::min(support_radius() * t, max_radius);
  if (!std::isfinite(R)) throw ConfigError("non-compact kernel needs a finite sampling radius");
  double K = std::max(1.0, std::ceil(R / h - 1e-9));
  int n = dim();
  Grid grid(Box::centered(n, {0.0, 0.0}, K * h), h);
  SampledFunction k(grid);
  double cell_vol = grid.cell_volume();
  if (!sampled_pointwise()) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      Point x = grid.node(i);
      Box cell{n, {(x[0] - h / 2) / t, n == 2 ? (x[1] - h / 2) / t : 0.0}, h / t};
      // integral of psi_t over the cell equals integral of psi over cell / t
      k[i] = cell_integral(cell) / cell_vol;
    }
    return k;
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    k[i] = eval_dilated(t, grid.node(i));
    if (!std::isfinite(k[i])) throw KernelError("non-finite kernel sample in " + name());
  }
  if (!std::isfinite(support_radius())) return k;

  double total = 0.0;
  for (double v : k.values()) total += v;
  total *= cell_vol;
  double defect = mass() - total;
  if (defect == 0.0) return k;
  // Correction by the discretely normalised bump at the same scale.
  const BumpProfile& phi = *bump_instance(n);
  std::vector<double> b(grid.size());
  double bsum = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    b[i] = phi.eval_dilated(t, grid.node(i));
    bsum += b[i];
  }
  bsum *= cell_vol;
  for (std::size_t i = 0; i < grid.size(); ++i) k[i] += defect * b[i] / bsum;
  return k;
}

SampledFunction sample_profile(const Profile& p, const Grid& grid) {
  if (p.dim() != grid.dim()) throw ConfigError("profile dimension differs from the grid");
  if (p.sampled_pointwise()) return sample(grid, [&p](const Point& x) { return p.eval(x); });
  double h = grid.spacing();
  SampledFunction f(grid);
  int n = grid.dim();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Point x = grid.node(i);
    Box cell{n, {x[0] - h / 2, n == 2 ? x[1] - h / 2 : 0.0}, h};
    f[i] = p.cell_integral(cell) / grid.cell_volume();
  }
  return f;
}

double bump_constant(int dim) {
  static const double c1 = [] {
    boost::math::quadrature::tanh_sinh<double> q;
    return 1.0 / q.integrate([](double x) { return std::exp(-1.0 / (1.0 - x * x)); }, -1.0, 1.0);
  }();
  static const double c2 = [] {
    boost::math::quadrature::tanh_sinh<double> q;
    double radial = q.integrate([](double r) { return r * std::exp(-1.0 / (1.0 - r * r)); }, 0.0, 1.0);
    return 1.0 / (2.0 * kPi * radial);
  }();
  if (dim == 1) return c1;
  if (dim == 2) return c2;
  throw ConfigError("dimension must be 1 or 2");
}

ProfilePtr standard_bump(int dim) { return bump_instance(dim); }

ProfilePtr majorant_profile(int dim, double M) {
  return std::make_shared<const MajorantProfile>(dim, M);
}

double majorant_eval(int dim, double M, double t, const Point& x) {
  if (dim != 1 && dim != 2) throw ConfigError("dimension must be 1 or 2");
  if (!(M > dim)) throw ParameterError("majorant exponent must exceed the dimension");
  if (!(t > 0.0)) throw ParameterError("scale must be positive");
  Point u{x[0] / t, x[1] / t};
  return std::pow(1.0 + norm(u, dim), -M) / std::pow(t, dim);
}

ProfilePtr ex38_psi() {
  static const auto p = std::make_shared<const Ex38Psi>();
  return p;
}

std::complex<double> ex38_psihat(double xi) {
  if (xi == 0.0) return {0.0, 0.0};
  // 2 (1 - cos xi) / (i xi) = -i * 4 sin^2(xi/2) / xi
  double s = std::sin(xi / 2);
  return {0.0, -4.0 * s * s / xi};
}

ProfilePtr indicator_profile(const Box& box) { return std::make_shared<const IndicatorProfile>(box); }

ProfilePtr cusp_profile(int dim, double alpha) {
  return std::make_shared<const CuspProfile>(dim, alpha);
}

ProfilePtr function_profile(int dim, std::string name, std::function<double(const Point&)> rule,
                            double support_radius, std::optional<double> mass, bool pointwise) {
  return std::make_shared<const FunctionProfile>(dim, std::move(name), std::move(rule),
                                                 support_radius, mass, pointwise);
}

ProfilePtr scaled_profile(ProfilePtr p, double c) {
  return std::make_shared<const ScaledProfile>(std::move(p), c);
}

DerivedFamily derived_family(int dim) {
  if (dim != 1 && dim != 2) throw ConfigError("dimension must be 1 or 2");
  DerivedFamily fam;
  fam.phi = bump_instance(dim);
  fam.g = std::make_shared<const SquaredBump>(dim);
  fam.psi = std::make_shared<const DerivedPsi>(dim);
  for (int k = 0; k < dim; ++k) {
    fam.psi1.push_back(std::make_shared<const DerivedPsi1>(dim, k));
    fam.psi2.push_back(std::make_shared<const DerivedPsi2>(dim, k));
  }
  fam.factorization_sign = -1;
  return fam;
}

DerivedExponents derived_exponents(double N, double gamma, int n) {
  if (n < 1) throw ParameterError("dimension must be positive");
  if (!(N > n)) throw ParameterError("decay exponent N must exceed n");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ParameterError("Hoelder exponent must lie in (0, 1]");
  DerivedExponents e;
  e.eta = (N - n) / (2.0 * (N + gamma));
  e.gamma_prime = e.eta * gamma;
  e.N_prime = (N + n) / 2.0;
  if (!(e.gamma_prime > 0.0 && e.gamma_prime < gamma && e.N_prime > n &&
        e.N_prime <= N - e.gamma_prime * (1 + 1e-15)))
    throw ContractError("derived exponents violate their invariants");
  return e;
}

Multiplier Multiplier::one() {
  Multiplier m;
  m.field = [](const Grid& g, double) { return SampledFunction::constant(g, 1.0); };
  return m;
}

Multiplier Multiplier::constant(double c) {
  Multiplier m;
  m.name = std::to_string(c);
  m.unit = c == 1.0;
  m.sup_bound = std::abs(c);
  m.field = [c](const Grid& g, double) { return SampledFunction::constant(g, c); };
  return m;
}

Multiplier Multiplier::beta(std::string name, std::function<double(const Point&, double)> rule,
                            double sup_bound) {
  Multiplier m;
  m.name = std::move(name);
  m.unit = false;
  m.x_constant = false;
  m.sup_bound = sup_bound;
  m.field = [rule = std::move(rule)](const Grid& g, double t) {
    return sample(g, [&](const Point& x) { return rule(x, t); });
  };
  return m;
}

Multiplier Multiplier::q_t_b(ProfilePtr psi, ProfilePtr b) {
  Multiplier m;
  m.name = "Q_t[" + b->name() + "]";
  m.unit = false;
  m.x_constant = false;
  m.sup_bound = INFINITY;
  m.field = [psi = std::move(psi), b = std::move(b)](const Grid& g, double t) {
    SampledFunction bs = sample_profile(*b, g);
    SampledFunction k = psi->sample_dilated(t, g.spacing(), g.box().side);
    return convolve(bs, k);
  };
  return m;
}

Multiplier Multiplier::product(Multiplier a, Multiplier b) {
  Multiplier m;
  m.name = a.name + "*" + b.name;
  m.unit = a.unit && b.unit;
  m.x_constant = a.x_constant && b.x_constant;
  m.sup_bound = a.sup_bound * b.sup_bound;
  m.field = [a = std::move(a), b = std::move(b)](const Grid& g, double t) {
    SampledFunction f = a.field(g, t);
    f.multiply_pointwise(b.field(g, t));
    return f;
  };
  return m;
}

void MLKernelSpec::validate() const {
  if (m < 1) throw ParameterError("arity m must be at least 1");
  if (n != 1 && n != 2) throw ParameterError("dimension must be 1 or 2");
  if (!(N > n)) throw ParameterError("decay exponent N must exceed n");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ParameterError("Hoelder exponent must lie in (0, 1]");
  if (terms.empty()) {
    if (!general) throw ConfigError("kernel spec has neither product terms nor a general rule");
    return;
  }
  for (const ProductTerm& term : terms) {
    if (term.slots.size() != static_cast<std::size_t>(m))
      throw ConfigError("product term must have one slot kernel per argument");
    if (!term.multiplier.field) throw ConfigError("product term without multiplier");
    for (const ProfilePtr& p : term.slots)
      if (!p || p->dim() != n) throw ConfigError("slot kernel dimension differs from n");
  }
}

MLKernelSpec product_spec(std::string name, std::vector<ProfilePtr> slots, Multiplier multiplier,
                          double N, double gamma) {
  MLKernelSpec s;
  s.name = std::move(name);
  s.m = static_cast<int>(slots.size());
  s.n = slots.empty() || !slots.front() ? 1 : slots.front()->dim();
  s.N = N;
  s.gamma = gamma;
  s.t_constant = multiplier.unit;
  s.terms.push_back(ProductTerm{1.0, std::move(multiplier), std::move(slots)});
  s.validate();
  return s;
}

namespace {

struct ExpandedScale {
  std::vector<SampledFunction> multipliers;
  std::vector<std::vector<SampledFunction>> kernels;
};

// Looks up a sampled kernel at the offset d = x - y (a lattice vector).
double kernel_at(const SampledFunction& k, const Point& d) {
  auto idx = k.grid().locate(d);
  if (idx) return k[*idx];
  if (!k.box().contains(d)) return 0.0;
  throw ConfigError("kernel offset is not on the sampling lattice");
}

}  // namespace

MLKernelSpec expand_to_general(const MLKernelSpec& spec, const Grid& grid) {
  spec.validate();
  if (!spec.is_product()) return spec;
  struct Cache {
    std::mutex mutex;
    std::map<double, ExpandedScale> scales;
  };
  auto cache = std::make_shared<Cache>();
  auto terms = spec.terms;
  MLKernelSpec out = spec;
  out.terms.clear();
  out.general = [cache, terms, grid](double t, const Point& x, std::span<const Point> ys) {
    std::lock_guard lock(cache->mutex);
    auto it = cache->scales.find(t);
    if (it == cache->scales.end()) {
      ExpandedScale e;
      for (const ProductTerm& term : terms) {
        e.multipliers.push_back(term.multiplier(grid, t));
        std::vector<SampledFunction> ks;
        for (const ProfilePtr& p : term.slots)
          ks.push_back(p->sample_dilated(t, grid.spacing(), grid.box().side));
        e.kernels.push_back(std::move(ks));
      }
      it = cache->scales.emplace(t, std::move(e)).first;
    }
    const ExpandedScale& e = it->second;
    auto xi = grid.locate(x);
    if (!xi) throw ConfigError("general expansion evaluated off the grid");
    double total = 0.0;
    for (std::size_t k = 0; k < terms.size(); ++k) {
      double v = terms[k].coeff * e.multipliers[k][*xi];
      for (std::size_t i = 0; i < ys.size() && v != 0.0; ++i)
        v *= kernel_at(e.kernels[k][i], Point{x[0] - ys[i][0], x[1] - ys[i][1]});
      total += v;
    }
    return total;
  };
  return out;
}

namespace {

// Pointwise kernel evaluation at one scale with multiplier fields cached.
class PointEvaluator {
 public:
  PointEvaluator(const MLKernelSpec& spec, const Grid& grid, double t)
      : spec_(spec), grid_(grid), t_(t) {
    if (spec.is_product())
      for (const ProductTerm& term : spec.terms) fields_.push_back(term.multiplier(grid, t));
  }

  double operator()(std::size_t x_idx, std::span<const Point> ys) const {
    Point x = grid_.node(x_idx);
    if (!spec_.is_product()) return spec_.general(t_, x, ys);
    double total = 0.0;
    for (std::size_t k = 0; k < spec_.terms.size(); ++k) {
      const ProductTerm& term = spec_.terms[k];
      double v = term.coeff * fields_[k][x_idx];
      for (std::size_t i = 0; i < ys.size() && v != 0.0; ++i)
        v *= term.slots[i]->eval_dilated(t_, Point{x[0] - ys[i][0], x[1] - ys[i][1]});
      total += v;
    }
    return total;
  }

 private:
  const MLKernelSpec& spec_;
  const Grid& grid_;
  double t_;
  std::vector<SampledFunction> fields_;
};

std::vector<std::size_t> plan_nodes(const SamplePlan& plan) {
  NodeMask mask = guard_band(plan.grid, plan.guard);
  std::size_t stride = std::max<std::size_t>(1, plan.x_stride >> plan.level);
  std::vector<std::size_t> nodes;
  std::size_t seen = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    if (seen++ % stride == 0) nodes.push_back(i);
  }
  return nodes;
}

std::size_t plan_points(const SamplePlan& plan) {
  if (plan.level < 0 || plan.level > 8) throw ConfigError("sample plan level must lie in [0, 8]");
  return plan.base_points << (2 * plan.level);
}

// Offset vector number j (1-based Halton index) for arity m, dimension n.
void halton_offsets(std::size_t j, int m, int n, double radius, const Point& x,
                    std::vector<Point>& ys) {
  for (int i = 0; i < m; ++i) {
    Point y = x;
    for (int a = 0; a < n; ++a) {
      unsigned base = kPrimes[(i * n + a) % 8];
      double u = van_der_corput(j, base);
      y[static_cast<std::size_t>(a)] += (2.0 * u - 1.0) * radius;
    }
    ys[static_cast<std::size_t>(i)] = y;
  }
}

void check_finite(double v) {
  if (!std::isfinite(v)) throw KernelError("non-finite kernel value");
}

}  // namespace

double theta_point(const MLKernelSpec& spec, const Grid& grid, double t, const Point& x,
                   std::span<const Point> ys) {
  spec.validate();
  if (ys.size() != static_cast<std::size_t>(spec.m)) throw ContractError("wrong number of points");
  auto idx = grid.locate(x);
  if (!spec.is_product()) return spec.general(t, x, ys);
  if (!idx) throw ConfigError("x must be a grid node for product kernels");
  return PointEvaluator(spec, grid, t)(*idx, ys);
}

ValidatorResult validate_size(const MLKernelSpec& spec, const SamplePlan& plan) {
  spec.validate();
  std::vector<std::size_t> nodes = plan_nodes(plan);
  std::size_t points = plan_points(plan);
  ValidatorResult best;
  std::vector<Point> ys(static_cast<std::size_t>(spec.m));
  for (double t : plan.scales.nodes()) {
    PointEvaluator theta(spec, plan.grid, t);
    for (std::size_t node : nodes) {
      Point x = plan.grid.node(node);
      for (std::size_t j = 1; j <= points; ++j) {
        halton_offsets(j, spec.m, spec.n, plan.reach * t, x, ys);
        double v = theta(node, ys);
        check_finite(v);
        double bound = 1.0;
        for (const Point& y : ys) bound *= majorant_eval(spec.n, spec.N, t, {x[0] - y[0], x[1] - y[1]});
        double r = std::abs(v) / bound;
        ++best.samples;
        if (r > best.constant) {
          best.constant = r;
          best.t = t;
          best.x = x;
        }
      }
    }
  }
  return best;
}

ValidatorResult validate_holder(const MLKernelSpec& spec, const SamplePlan& plan) {
  spec.validate();
  std::vector<std::size_t> nodes = plan_nodes(plan);
  std::size_t points = plan_points(plan);
  std::vector<double> ladder{4.0, 16.0, 64.0};
  for (int k = 1; k <= plan.level; ++k) ladder.push_back(std::pow(4.0, 3 + k));
  ValidatorResult best;
  std::vector<Point> ys(static_cast<std::size_t>(spec.m));
  std::vector<Point> moved(ys.size());
  double mn = spec.m * spec.n;
  for (double t : plan.scales.nodes()) {
    PointEvaluator theta(spec, plan.grid, t);
    double scale = std::pow(t, -mn);
    for (std::size_t node : nodes) {
      Point x = plan.grid.node(node);
      for (std::size_t j = 1; j <= points; ++j) {
        halton_offsets(j, spec.m, spec.n, plan.reach * t, x, ys);
        double v = theta(node, ys);
        check_finite(v);
        double angle = 2.0 * kPi * van_der_corput(j, 23);
        Point dir{spec.n == 1 ? 1.0 : std::cos(angle), spec.n == 1 ? 0.0 : std::sin(angle)};
        for (int i = 0; i < spec.m; ++i) {
          auto si = static_cast<std::size_t>(i);
          for (double div : ladder) {
            double delta = t / div;
            moved = ys;
            moved[si] = {ys[si][0] + delta * dir[0], ys[si][1] + delta * dir[1]};
            double w = theta(node, moved);
            check_finite(w);
            double r = std::abs(v - w) / (scale * std::pow(delta / t, spec.gamma));
            ++best.samples;
            if (r > best.constant) {
              best.constant = r;
              best.t = t;
              best.x = x;
            }
          }
        }
      }
    }
  }
  return best;
}

std::complex<double> dtft(const SampledFunction& psi, double xi) {
  const Grid& g = psi.grid();
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (psi[i] == 0.0) continue;
    double phase = -g.node(i)[0] * xi;
    acc += psi[i] * std::complex<double>(std::cos(phase), std::sin(phase));
  }
  return acc * g.cell_volume();
}

double fourier_admissibility(const Profile& psi, std::span<const double> xis,
                             const ScaleGrid& grid, double h) {
  if (std::abs(psi.mass()) > 1e-8) throw ContractError("fourier_admissibility needs a mean-zero profile");
  std::optional<SampledFunction> sampled;
  if (!psi.fourier({1.0, 0.0})) sampled = psi.sample_dilated(1.0, h);
  double sup = 0.0;
  std::vector<double> values(grid.size());
  for (double xi : xis) {
    if (xi == 0.0) continue;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      double u = grid.nodes()[j] * xi;
      std::complex<double> f = sampled ? dtft(*sampled, u) : *psi.fourier({u, 0.0});
      values[j] = std::norm(f);
    }
    sup = std::max(sup, scale_integrate(values, grid));
  }
  return sup;
}

}  // namespace sqfn
