#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cellhom/ergodic.hpp"

namespace cellhom {

struct SeriesRecord {
  std::string label;
  int norm_exponent = 1;  // value = normalized * t^exponent
  EstimateSeries series;
};

struct CheckRecord {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ScalarRecord {
  std::string name;
  std::string value;
};

struct RunRecord {
  uint64_t config_digest = 0;
  std::string version;
  std::vector<SeriesRecord> series;
  std::vector<CheckRecord> checks;
  std::vector<ScalarRecord> scalars;
  double wall_seconds = 0;  // recorded in record.json only, never in data files

  bool all_checks_pass() const;
};

// Writes, under dir:
//   series_<label>.csv       seed,t,value,normalized
//   convergence_<label>.csv  t,mean,std,median
//   summary.txt              point estimates, error bars, PASS/FAIL lines
//   record.json              full record including wall clock
// Throws std::runtime_error if the directory cannot be created or written.
void emit_report(const RunRecord& record, const std::string& dir);

std::string version_string();

}  // namespace cellhom
