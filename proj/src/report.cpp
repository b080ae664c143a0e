#include "zdpot/report.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace zdpot {

Json AuditReport::to_json() const {
  Json j;
  j["id"] = id;
  j["grid"] = grid;
  Json c = Json::object();
  for (const auto& [k, v] : constants) {
    // Non-finite values are written as strings.
    if (std::isfinite(v)) {
      c[k] = v;
    } else {
      c[k] = format_double(v);
    }
  }
  j["constants"] = c;
  j["witness"] = witness;
  j["details"] = details;
  j["notes"] = notes;
  j["pass"] = pass;
  return j;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string CsvTable::render() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) os << ',';
    os << header[i];
  }
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      os << row[i];
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace zdpot
