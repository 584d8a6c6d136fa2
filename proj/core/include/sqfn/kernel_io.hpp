#pragma once

// Built-in kernel specs and the JSON kernel description format (see
// docs/kernel_schema.md for the keys).

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sqfn/kernels.hpp"
#include "sqfn/operators.hpp"
#include "sqfn/weights.hpp"

namespace sqfn {

// Theta_t(f_1..f_m) = c * prod_i phi_t * f_i, with N = n + 1.
MLKernelSpec bump_spec(int n, int m, double c = 1.0);

// (psi_t * b)(x) * prod_i phi_t * f_i with psi = chi_(0,1) - chi_(-1,0) and
// b = chi_(0,1); n = 1.
MLKernelSpec ex38_spec(int m);

enum class BetaChoice { one, rough };
BetaChoice parse_beta(const std::string& name);
std::string to_string(BetaChoice beta);

// The b of the Hölder example: (1 - |x|)_+^alpha.
ProfilePtr ex37_b(int n, double alpha);
// beta(x, t) = 1 or the sign pattern (-1)^(floor(8 x_1) + floor(log2 t)).
Multiplier ex37_beta(BetaChoice beta);
// beta(x, t) (Psi_t * b)(x) prod_i phi_t * f_i with Psi from derived_family(n).
// Needs 0 < alpha < N - n.
MLKernelSpec ex37_spec(int n, int m, double alpha, BetaChoice beta, double N = 3.0);

// (Psi_t * f_1) prod_{i>1} phi_t * f_i + c0 prod_i phi_t * f_i, so that
// Theta_t(1, ..., 1) = c0. N = n + 1.
MLKernelSpec meanzero_spec(int n, int m, double c0 = 0.0);

struct KernelDescription {
  MLKernelSpec spec;
  EvalStrategy strategy = EvalStrategy::product_convolution;
  // Measure densities w_i^{p_i} are derived from these weights by the caller.
  std::vector<WeightFn> weights;
};

// Throws ConfigError on unknown keys, missing fields or inconsistent values.
KernelDescription parse_kernel_description(const nlohmann::json& doc);
KernelDescription load_kernel_description(const std::string& path);
WeightFn parse_weight(const nlohmann::json& entry, int n);

}  // namespace sqfn
