#include "sqfn/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace sqfn {

using nlohmann::json;

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::PAPER:
      return "PAPER";
    case Provenance::TRIVIAL:
      return "TRIVIAL";
    case Provenance::DERIVED:
      return "DERIVED";
  }
  return "DERIVED";
}

CheckRecord relative_check(std::string id, std::string anchor, double computed, double reference,
                           double tol, Provenance prov) {
  bool pass = std::isfinite(computed) && std::abs(computed - reference) <= tol * std::abs(reference);
  return {std::move(id), std::move(anchor), computed, reference, prov, tol, pass};
}

CheckRecord absolute_check(std::string id, std::string anchor, double computed, double reference,
                           double tol, Provenance prov) {
  bool pass = std::isfinite(computed) && std::abs(computed - reference) <= tol;
  return {std::move(id), std::move(anchor), computed, reference, prov, tol, pass};
}

CheckRecord custom_check(std::string id, std::string anchor, double computed, double reference,
                         double tol, Provenance prov, bool pass) {
  return {std::move(id), std::move(anchor), computed, reference, prov, tol, pass};
}

namespace {

json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

}  // namespace

json to_json(const CheckRecord& r) {
  json j;
  j["id"] = r.id;
  j["anchor"] = r.anchor;
  j["computed"] = number(r.computed);
  j["reference"] = number(r.reference);
  j["provenance"] = to_string(r.provenance);
  j["tolerance"] = number(r.tolerance);
  j["pass"] = r.pass;
  return j;
}

bool ExperimentReport::verdict() const {
  for (const CheckRecord& c : checks)
    if (!c.pass) return false;
  return true;
}

json ExperimentReport::to_json() const {
  json j;
  j["scenario"] = scenario;
  j["params"] = params;
  j["checks"] = json::array();
  for (const CheckRecord& c : checks) j["checks"].push_back(sqfn::to_json(c));
  j["environment"] = {{"grid_h", number(environment.grid_h)},
                      {"t_min", number(environment.t_min)},
                      {"t_max", number(environment.t_max)},
                      {"per_octave", environment.per_octave},
                      {"seed", environment.seed},
                      {"runtime_ms", environment.runtime_ms}};
  j["verdict"] = verdict();
  return j;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void PlotTable::add(std::vector<double> values) {
  std::vector<std::string> row;
  for (double v : values) row.push_back(format_number(v));
  rows.push_back(std::move(row));
}

void PlotTable::add(std::string label, std::vector<double> values) {
  std::vector<std::string> row{std::move(label)};
  for (double v : values) row.push_back(format_number(v));
  rows.push_back(std::move(row));
}

void write_csv(std::ostream& out, const PlotTable& table) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

json carleson_records(const CarlesonReport& rep) {
  json out = json::array();
  for (const CubeValue& c : rep.cubes) {
    json corner = json::array({c.cube.corner[0]});
    if (c.cube.dim == 2) corner.push_back(c.cube.corner[1]);
    out.push_back({{"kind", to_string(rep.kind)}, {"corner", corner}, {"side", c.cube.side},
                   {"value", number(c.value)}});
  }
  return out;
}

PlotTable carleson_table(const CarlesonReport& rep) {
  PlotTable t;
  bool two_d = !rep.cubes.empty() && rep.cubes.front().cube.dim == 2;
  t.columns = two_d ? std::vector<std::string>{"kind", "corner_x", "corner_y", "side", "value"}
                    : std::vector<std::string>{"kind", "corner_x", "side", "value"};
  for (const CubeValue& c : rep.cubes) {
    if (two_d)
      t.add(to_string(rep.kind), {c.cube.corner[0], c.cube.corner[1], c.cube.side, c.value});
    else
      t.add(to_string(rep.kind), {c.cube.corner[0], c.cube.side, c.value});
  }
  return t;
}

}  // namespace sqfn
