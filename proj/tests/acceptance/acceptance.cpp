// Runs the full suite once and grades the fourteen acceptance criteria from
// its records, plus a determinism check through the CLI. One PASS/FAIL line
// per criterion; the exit status is nonzero if any criterion fails.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "sqfn/suite.hpp"

namespace {

namespace fs = std::filesystem;

struct Criterion {
  int number;
  std::string title;
  // Record id prefixes that make up the criterion.
  std::vector<std::string> prefixes;
};

bool starts_with(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Two runs of `sqfn verify --suite all --seed 7`, compared byte for byte.
bool determinism(std::string& detail) {
  fs::path dir = fs::temp_directory_path() / ("sqfn-acceptance-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::vector<fs::path> outs{dir / "run1.json", dir / "run2.json"};
  for (const auto& o : outs) {
    std::string cmd = std::string("\"") + SQFN_CLI + "\" verify --suite all --seed 7 --out \"" + o.string() + "\"";
    int rc = std::system(cmd.c_str());
    if (rc != 0) detail += "exit status " + std::to_string(rc) + "; ";
  }
  std::string a = slurp(outs[0]), b = slurp(outs[1]);
  fs::remove_all(dir);
  if (a.empty()) {
    detail += "empty report";
    return false;
  }
  detail += std::to_string(a.size()) + " bytes, " + (a == b ? "identical" : "different");
  return a == b;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "ex38 exact values", {"ex38.a."}},
      {2, "ex38 Carleson dichotomy", {"ex38.b.", "ex38.c.", "ex38.e."}},
      {3, "Fourier closed form", {"ex38.d."}},
      {4, "mean-zero clause", {"meanzero.theta_one", "meanzero.carleson", "meanzero.c0_growth"}},
      {5, "Plancherel square-function constant", {"meanzero.plancherel"}},
      {6, "reproducing identity", {"operators.reproducing"}},
      {7, "Pi decay", {"operators.pi_decay"}},
      {8, "almost orthogonality", {"operators.almost_orth"}},
      {9, "A_p estimator", {"weights.ap."}},
      {10, "CZ decomposition", {"weights.cz"}},
      {11, "tent bound", {"ex37.tent"}},
      {12, "weighted bilinear bounds", {"bilinear."}},
      {13, "strong >= Carleson", {"carleson.strong_dominates.", "carleson.x_constant."}},
  };

  std::vector<std::string> all{"all"};
  sqfn::ExperimentReport rep = sqfn::run_suite(all, 7);

  bool ok = true;
  for (const auto& c : criteria) {
    std::size_t n = 0, failed = 0;
    std::ostringstream fails;
    for (const auto& r : rep.checks) {
      bool match = false;
      for (const auto& p : c.prefixes) match = match || starts_with(r.id, p);
      if (!match) continue;
      ++n;
      if (!r.pass) {
        ++failed;
        fails << " " << r.id;
      }
    }
    bool pass = n > 0 && failed == 0;
    ok = ok && pass;
    std::cout << (pass ? "PASS" : "FAIL") << "  " << c.number << ". " << c.title << " (" << n << " checks";
    if (failed) std::cout << ", failed:" << fails.str();
    std::cout << ")\n";
  }

  std::string detail;
  bool det = determinism(detail);
  ok = ok && det;
  std::cout << (det ? "PASS" : "FAIL") << "  14. determinism (" << detail << ")\n";
  return ok ? EXIT_SUCCESS : EXIT_FAILURE;
}
