#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace zdpot {

using Json = nlohmann::json;

// Rows for the plot-ready CSV sidecar of an audit.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  bool empty() const { return header.empty(); }
  std::string render() const;
};

// Outcome of one audited inequality or identity over a finite parameter grid.
//
// `constants` holds fitted grid extrema (e.g. "L1", "U2", "G1"). `witness`
// identifies the grid point where the binding extremum was attained. `details`
// carries audit-specific tables. Everything here is a pure function of the
// audit inputs, so two runs with the same configuration serialize identically.
struct AuditReport {
  std::string id;
  Json grid = Json::object();
  std::map<std::string, double> constants;
  Json witness = Json::object();
  Json details = Json::object();
  std::vector<std::string> notes;
  bool pass = false;
  CsvTable table;  // optional plot data, not part of the JSON body

  Json to_json() const;
};

// Locale-independent shortest round-trip rendering of a double.
std::string format_double(double v);

}  // namespace zdpot
