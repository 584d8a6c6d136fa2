// sqfn: run scenarios, verify the invariant suite, dump plot data and
// evaluate the weighted bound constants.
//
// Exit codes: 0 pass, 1 check failure, 2 configuration error, 3 capacity
// error.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sqfn/carleson.hpp"
#include "sqfn/errors.hpp"
#include "sqfn/kernel_io.hpp"
#include "sqfn/report.hpp"
#include "sqfn/scenarios.hpp"
#include "sqfn/suite.hpp"

namespace {

using nlohmann::json;

enum Exit { kPass = 0, kFail = 1, kConfig = 2, kCapacity = 3 };

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw sqfn::ConfigError("cannot write " + path);
  out << text;
}

int report_exit(const sqfn::ExperimentReport& rep, const std::string& out) {
  emit(rep.to_json().dump(2) + "\n", out);
  if (!rep.verdict()) {
    for (const auto& c : rep.checks)
      if (!c.pass)
        std::cerr << "FAIL " << c.id << ": computed " << sqfn::format_number(c.computed) << ", reference "
                  << sqfn::format_number(c.reference) << ", tolerance " << sqfn::format_number(c.tolerance)
                  << "\n";
    return kFail;
  }
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Square functions, Carleson measures and weighted bounds: experiments and checks"};
  app.require_subcommand(1);

  sqfn::RunOptions opt;
  std::string out;
  std::string scenario;

  // run
  auto* run = app.add_subcommand("run", "Run one scenario and print its JSON report");
  run->add_option("scenario", scenario, "ex38, ex37, meanzero or bilinear-weighted")->required();
  double h = 0, t_min = 0, t_max = 0;
  int per_octave = 0;
  auto* o_h = run->add_option("--grid-h", h, "Grid spacing of the primary computation");
  auto* o_tmin = run->add_option("--t-min", t_min, "Smallest scale");
  auto* o_tmax = run->add_option("--t-max", t_max, "Largest scale");
  auto* o_j = run->add_option("--per-octave", per_octave, "Scale nodes per octave");
  run->add_option("--out", out, "Write the report here instead of stdout");
  run->add_option("--seed", opt.seed, "Fixture seed");
  run->add_flag("--timing", opt.timing, "Record wall time in runtime_ms");
  sqfn::Ex37Params ex37;
  std::string beta = "one";
  run->add_option("--alpha", ex37.alpha, "ex37: Hölder exponent of b");
  run->add_option("--q", ex37.q, "ex37: integrability exponent");
  run->add_option("--beta", beta, "ex37: one or rough");
  sqfn::BilinearParams bil;
  std::vector<double> weight_a;
  run->add_option("--a", weight_a, "bilinear-weighted: power exponents a_1 a_2")->expected(2);

  // verify
  auto* verify = app.add_subcommand("verify", "Run module batteries and scenarios");
  std::vector<std::string> suite{"all"};
  verify->add_option("--suite", suite, "all or any of: grid kernels operators weights carleson ex38 ex37 "
                                       "meanzero bilinear-weighted")
      ->expected(0, -1);
  verify->add_option("--seed", opt.seed, "Fixture seed");
  verify->add_option("--out", out, "Write the report here instead of stdout");
  verify->add_flag("--timing", opt.timing, "Record wall time in runtime_ms");

  // plotdata
  auto* plot = app.add_subcommand("plotdata", "Write CSV plot data of a scenario");
  plot->add_option("scenario", scenario, "ex38, ex37, meanzero or bilinear-weighted")->required();
  plot->add_option("--out", out, "CSV file")->required();
  plot->add_option("--seed", opt.seed, "Fixture seed");

  // constants
  auto* constants = app.add_subcommand("constants", "Evaluate the weighted bound constant and C_0(B)");
  std::vector<double> ps, ap;
  double sc = 0.0, B = 0.0;
  constants->add_option("--p", ps, "Exponents p_1 .. p_m")->required();
  constants->add_option("--ap", ap, "A_p constants of w_i^p_i")->required();
  constants->add_option("--sc", sc, "Strong Carleson constant")->required();
  auto* o_B = constants->add_option("--B", B, "Weight bound B > 1 for C_0 (default: max of --ap)");

  // validate
  auto* validate = app.add_subcommand("validate", "Load a kernel description and run the kernel validators");
  std::string kernel_path;
  int level = 1;
  validate->add_option("kernel", kernel_path, "JSON kernel description")->required();
  validate->add_option("--level", level, "Sample plan level (0..8)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kPass : kConfig;
  }

  try {
    if (*run) {
      if (*o_h) opt.grid_h = h;
      if (*o_tmin) opt.t_min = t_min;
      if (*o_tmax) opt.t_max = t_max;
      if (*o_j) opt.per_octave = per_octave;
      sqfn::ExperimentReport rep;
      if (scenario == "ex37") {
        ex37.beta = sqfn::parse_beta(beta);
        rep = sqfn::scenario_ex37(ex37, opt);
      } else if (scenario == "bilinear-weighted") {
        if (!weight_a.empty()) bil.a = {weight_a[0], weight_a[1]};
        rep = sqfn::scenario_bilinear_weighted(bil, opt);
      } else {
        rep = sqfn::run_scenario(scenario, opt);
      }
      return report_exit(rep, out);
    }
    if (*verify) return report_exit(sqfn::run_suite(suite, opt.seed, opt.timing), out);
    if (*plot) {
      std::ofstream csv(out, std::ios::binary);
      if (!csv) throw sqfn::ConfigError("cannot write " + out);
      sqfn::write_csv(csv, sqfn::plot_data(scenario, opt));
      return kPass;
    }
    if (*constants) {
      if (ps.size() != ap.size() || ps.empty()) throw sqfn::ConfigError("--p and --ap need the same length");
      int m = static_cast<int>(ps.size());
      json j;
      j["bound_constant"] = sqfn::bound_constant_43(ap, ps, sc, m);
      double b = *o_B ? B : *std::max_element(ap.begin(), ap.end());
      j["B"] = b;
      if (b > 1.0)
        j["c0_of_B"] = sqfn::c0_of_B(b, ps, sc, m);
      else
        j["c0_of_B"] = nullptr;
      std::cout << j.dump(2) << "\n";
      return kPass;
    }
    if (*validate) {
      sqfn::KernelDescription kd = sqfn::load_kernel_description(kernel_path);
      const int n = kd.spec.n;
      sqfn::Box box = n == 1 ? sqfn::Box::interval(-4.0, 4.0) : sqfn::Box::square(-4.0, -4.0, 8.0);
      sqfn::SamplePlan plan{sqfn::Grid(box, n == 1 ? 1.0 / 64 : 1.0 / 16), sqfn::ScaleGrid(0.125, 1.0, 2), level,
                            64, n == 1 ? 64u : 1024u, 4.0, 1.0};
      sqfn::ValidatorResult s = sqfn::validate_size(kd.spec, plan);
      sqfn::ValidatorResult r = sqfn::validate_holder(kd.spec, plan);
      json j;
      j["name"] = kd.spec.name;
      j["m"] = kd.spec.m;
      j["n"] = n;
      j["form"] = kd.strategy == sqfn::EvalStrategy::product_convolution ? "product" : "general";
      j["size_constant"] = s.constant;
      j["holder_constant"] = r.constant;
      j["samples"] = s.samples + r.samples;
      json w = json::array();
      for (const auto& wf : kd.weights) w.push_back(wf.tag());
      j["weights"] = w;
      std::cout << j.dump(2) << "\n";
      return kPass;
    }
  } catch (const sqfn::CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return kCapacity;
  } catch (const sqfn::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfig;
  } catch (const sqfn::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  }
  return kPass;
}
