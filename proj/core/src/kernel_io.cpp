#include "sqfn/kernel_io.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "sqfn/errors.hpp"

namespace sqfn {
namespace {

using nlohmann::json;

void require_known_keys(const json& obj, const std::set<std::string>& keys, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!keys.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

double number_or(const json& obj, const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) throw ConfigError("'" + key + "' must be a number");
  return obj[key].get<double>();
}

int integer_or(const json& obj, const std::string& key, int fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer()) throw ConfigError("'" + key + "' must be an integer");
  return obj[key].get<int>();
}

std::string string_or(const json& obj, const std::string& key, std::string fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_string()) throw ConfigError("'" + key + "' must be a string");
  return obj[key].get<std::string>();
}

std::vector<ProfilePtr> bumps(int n, int m) {
  return std::vector<ProfilePtr>(static_cast<std::size_t>(m), standard_bump(n));
}

}  // namespace

MLKernelSpec bump_spec(int n, int m, double c) {
  // Smooth compactly supported slots decay at any rate; N = n + 1 is the
  // smallest integer exponent the size condition accepts.
  MLKernelSpec s = product_spec("bump", bumps(n, m), c == 1.0 ? Multiplier::one() : Multiplier::constant(c),
                                n + 1.0);
  s.t_constant = true;
  return s;
}

MLKernelSpec ex38_spec(int m) {
  Multiplier q = Multiplier::q_t_b(ex38_psi(), indicator_profile(Box::interval(0.0, 1.0)));
  return product_spec("ex38", bumps(1, m), q);
}

BetaChoice parse_beta(const std::string& name) {
  if (name == "one") return BetaChoice::one;
  if (name == "rough") return BetaChoice::rough;
  throw ConfigError("unknown beta choice '" + name + "' (one, rough)");
}

std::string to_string(BetaChoice beta) { return beta == BetaChoice::one ? "one" : "rough"; }

ProfilePtr ex37_b(int n, double alpha) { return cusp_profile(n, alpha); }

Multiplier ex37_beta(BetaChoice beta) {
  if (beta == BetaChoice::one) return Multiplier::one();
  return Multiplier::beta(
      "rough",
      [](const Point& x, double t) {
        auto k = static_cast<long>(std::floor(8.0 * x[0])) + static_cast<long>(std::floor(std::log2(t)));
        return k % 2 == 0 ? 1.0 : -1.0;
      },
      1.0);
}

MLKernelSpec ex37_spec(int n, int m, double alpha, BetaChoice beta, double N) {
  if (!(alpha > 0.0 && alpha < N - n)) throw ParameterError("alpha must lie in (0, N - n)");
  DerivedFamily fam = derived_family(n);
  Multiplier q = Multiplier::q_t_b(fam.psi, ex37_b(n, alpha));
  Multiplier mult = beta == BetaChoice::one ? q : Multiplier::product(ex37_beta(beta), q);
  MLKernelSpec s = product_spec("ex37", bumps(n, m), mult, N, 1.0);
  return s;
}

MLKernelSpec meanzero_spec(int n, int m, double c0) {
  DerivedFamily fam = derived_family(n);
  std::vector<ProfilePtr> slots = bumps(n, m);
  slots.front() = fam.psi;
  MLKernelSpec s = product_spec(c0 == 0.0 ? "meanzero" : "meanzero+c0", slots, Multiplier::one(), n + 1.0);
  if (c0 != 0.0) s.terms.push_back(ProductTerm{c0, Multiplier::one(), bumps(n, m)});
  s.t_constant = true;
  s.validate();
  return s;
}

WeightFn parse_weight(const json& entry, int n) {
  std::string tag = entry.is_object() ? string_or(entry, "tag", "") : "";
  if (tag == "const") {
    require_known_keys(entry, {"tag", "c"}, "weight");
    return WeightFn::constant(n, number_or(entry, "c", 1.0));
  }
  if (tag == "power") {
    require_known_keys(entry, {"tag", "a"}, "weight");
    if (!entry.contains("a")) throw ConfigError("power weight needs 'a'");
    return WeightFn::power(n, number_or(entry, "a", 0.0));
  }
  throw ConfigError("weight entries need tag 'const' or 'power'");
}

KernelDescription parse_kernel_description(const json& doc) {
  require_known_keys(doc, {"name", "m", "n", "N", "gamma", "form", "kernel", "weights"}, "kernel description");
  int m = integer_or(doc, "m", 1);
  int n = integer_or(doc, "n", 1);
  double N = number_or(doc, "N", 3.0);
  double gamma = number_or(doc, "gamma", 1.0);
  std::string form = string_or(doc, "form", "product");
  if (!doc.contains("kernel")) throw ConfigError("kernel description needs a 'kernel' object");
  const json& k = doc["kernel"];
  std::string builtin = k.is_object() ? string_or(k, "builtin", "") : "";

  KernelDescription out;
  if (builtin == "standard_bump") {
    require_known_keys(k, {"builtin", "c"}, "kernel");
    out.spec = bump_spec(n, m, number_or(k, "c", 1.0));
  } else if (builtin == "ex38") {
    require_known_keys(k, {"builtin"}, "kernel");
    if (n != 1) throw ConfigError("ex38 is one-dimensional");
    out.spec = ex38_spec(m);
  } else if (builtin == "ex37") {
    require_known_keys(k, {"builtin", "alpha", "beta"}, "kernel");
    out.spec = ex37_spec(n, m, number_or(k, "alpha", 0.5), parse_beta(string_or(k, "beta", "one")), N);
  } else if (builtin == "meanzero") {
    require_known_keys(k, {"builtin", "c0"}, "kernel");
    out.spec = meanzero_spec(n, m, number_or(k, "c0", 0.0));
  } else {
    throw ConfigError("unknown builtin kernel '" + builtin + "' (standard_bump, ex38, ex37, meanzero)");
  }
  out.spec.N = N;
  out.spec.gamma = gamma;
  if (doc.contains("name")) out.spec.name = string_or(doc, "name", out.spec.name);
  out.spec.validate();

  if (form == "product") {
    out.strategy = EvalStrategy::product_convolution;
  } else if (form == "general") {
    out.strategy = EvalStrategy::general_quadrature;
  } else {
    throw ConfigError("form must be 'product' or 'general'");
  }

  if (doc.contains("weights")) {
    const json& ws = doc["weights"];
    if (!ws.is_array() || ws.size() != static_cast<std::size_t>(m))
      throw ConfigError("'weights' must list one entry per argument");
    for (const json& e : ws) out.weights.push_back(parse_weight(e, n));
  }
  return out;
}

KernelDescription load_kernel_description(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open kernel description " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("kernel description " + path + ": " + e.what());
  }
  return parse_kernel_description(doc);
}

}  // namespace sqfn
