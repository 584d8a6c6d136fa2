#include "sqfn/suite.hpp"

#include <algorithm>
#include <chrono>

#include "sqfn/errors.hpp"

namespace sqfn {

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"grid", "kernels", "operators", "weights", "carleson",
                                              "ex38", "ex37",    "meanzero",  "bilinear-weighted"};
  return names;
}

ExperimentReport run_suite(std::span<const std::string> selection, std::uint64_t seed, bool timing) {
  const auto& names = suite_names();
  std::vector<bool> chosen(names.size(), false);
  for (const std::string& s : selection) {
    if (s == "all") {
      chosen.assign(names.size(), true);
      continue;
    }
    auto it = std::find(names.begin(), names.end(), s);
    if (it == names.end()) throw ConfigError("unknown suite entry '" + s + "'");
    chosen[static_cast<std::size_t>(it - names.begin())] = true;
  }

  ExperimentReport rep;
  rep.scenario = "suite";
  rep.params["selection"] = nlohmann::json::array();
  rep.environment.seed = seed;
  RunOptions opt;
  opt.seed = seed;
  auto start = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!chosen[i]) continue;
    const std::string& n = names[i];
    rep.params["selection"].push_back(n);
    std::vector<CheckRecord> recs;
    if (n == "grid") recs = battery_grid(seed);
    else if (n == "kernels") recs = battery_kernels(seed);
    else if (n == "operators") recs = battery_operators(seed);
    else if (n == "weights") recs = battery_weights(seed);
    else if (n == "carleson") recs = battery_carleson(seed);
    else {
      recs = run_scenario(n, opt).checks;
    }
    rep.checks.insert(rep.checks.end(), recs.begin(), recs.end());
  }
  if (timing)
    rep.environment.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace sqfn
