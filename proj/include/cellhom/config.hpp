#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cellhom/ergodic.hpp"

namespace cellhom {

struct ConfigError : std::runtime_error {
  int line;
  std::string field;
  ConfigError(int line_, std::string field_, const std::string& what)
      : std::runtime_error("config line " + std::to_string(line_) + " [" + field_ + "]: " + what),
        line(line_),
        field(std::move(field_)) {}
};

// One table query: either a surface point (zeta, nu) or a volume point (xi).
struct QueryPoint {
  bool surface = true;
  VecD zeta;
  std::vector<long long> nu_num;
  long long nu_den = 1;
  std::vector<VecD> xi_rows;

  std::string str() const;
  std::string label() const;  // filesystem-safe
};

struct ExperimentConfig {
  std::string kind = "verify";  // fhom | ghom | verify | calibrate | table

  MediumSpec medium = MediumSpec::iid_cells(1.0, 3.0, 0.5);

  std::string surface_family = "perimeter";  // perimeter | amplitude
  double p = 2.0;
  double zcap = 8.0;

  std::vector<QueryPoint> points;

  std::vector<long long> schedule{8, 16, 32, 64};
  int n_seeds = 50;
  uint64_t seed_base = 1;

  double h = 0.25;
  double tol = 1e-10;
  int max_iter = 20000;
  std::string neighborhood = "n4";
  double lambda_axis = 1.0;
  double lambda_diag = 0.70710678118654752;
  int precision_bits = 20;
  int ring_width = 1;
  long long strip_length = 96;
  double check_tol = 0.05;  // finite-t invariance tolerance

  int mincut_instances = 200;
  int structural_cases = 100;

  std::string out_dir = "out";

  CutOptions cut_options() const;
  SurfaceFamily family_tag() const;
  std::string canonical() const;  // round-trip serialization
  uint64_t digest() const;        // over semantically meaningful fields
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Number formatting used by every emitted file: shortest round-trip form.
std::string fmt_double(double v);

}  // namespace cellhom
