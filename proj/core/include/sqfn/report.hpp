#pragma once

// Experiment reports: per-check records with provenance, JSON and CSV output.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sqfn/carleson.hpp"

namespace sqfn {

enum class Provenance { PAPER, TRIVIAL, DERIVED };
std::string to_string(Provenance p);

struct CheckRecord {
  std::string id;
  // Short description of the mathematical statement being checked.
  std::string anchor;
  double computed = 0.0;
  // NaN when the check has no scalar reference (written as null).
  double reference = 0.0;
  Provenance provenance = Provenance::DERIVED;
  double tolerance = 0.0;
  bool pass = false;
};

// |computed - reference| <= tol * |reference|.
CheckRecord relative_check(std::string id, std::string anchor, double computed, double reference,
                           double tol, Provenance prov);
// |computed - reference| <= tol.
CheckRecord absolute_check(std::string id, std::string anchor, double computed, double reference,
                           double tol, Provenance prov);
// Verdict decided by the caller.
CheckRecord custom_check(std::string id, std::string anchor, double computed, double reference,
                         double tol, Provenance prov, bool pass);

struct Environment {
  double grid_h = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;
  int per_octave = 0;
  std::uint64_t seed = 0;
  // Wall time, only filled when timing is requested so reports stay
  // reproducible byte for byte.
  double runtime_ms = 0.0;
};

struct ExperimentReport {
  std::string scenario;
  nlohmann::json params = nlohmann::json::object();
  std::vector<CheckRecord> checks;
  Environment environment;

  // Conjunction of the check verdicts (true for an empty report).
  bool verdict() const;
  nlohmann::json to_json() const;
};

nlohmann::json to_json(const CheckRecord& r);

// Rows of plot data with named columns, written as CSV. Numbers are stored
// with round-trip precision.
struct PlotTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<double> values);
  void add(std::string label, std::vector<double> values);
};

std::string format_number(double v);

void write_csv(std::ostream& out, const PlotTable& table);

// One record {kind, corner, side, value} per cube.
nlohmann::json carleson_records(const CarlesonReport& rep);
PlotTable carleson_table(const CarlesonReport& rep);

}  // namespace sqfn
