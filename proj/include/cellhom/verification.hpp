#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cellhom/config.hpp"
#include "cellhom/report.hpp"

namespace cellhom {

// Structural verification: the identities the construction promises, run on
// randomized inputs. Every case is derived deterministically from the case
// index, so the emitted per-case tables are byte-identical across runs and
// parallelism degrees.
struct VerifyOutput {
  std::vector<CheckRecord> checks;
  std::vector<ScalarRecord> scalars;
  // name -> CSV content; written by the caller into the output directory
  std::vector<std::pair<std::string, std::string>> case_files;

  bool all_pass() const;
};

struct VerifySpec {
  int mincut_instances = 200;
  int covariance_cases = 100;
  int subadd_cases = 100;
  int bound_cases = 50;
  int volume_cases = 12;
  uint64_t seed0 = 20240501;
  CutOptions cut;
};

VerifySpec verify_spec_from(const ExperimentConfig& cfg, bool quick);

VerifyOutput run_structural_suite(const VerifySpec& spec, int threads);

// Individual checks, reusable from the acceptance tests.
CheckRecord check_mincut_exactness(const VerifySpec& spec, int threads, std::string* csv);
CheckRecord check_covariance_suite(const VerifySpec& spec, const RationalDirection& nu, int threads,
                                   std::string* csv);
CheckRecord check_subadditivity_suite(const VerifySpec& spec, const RationalDirection& nu, int threads,
                                      std::string* csv);
CheckRecord check_mu_bounds(const VerifySpec& spec, const RationalDirection& nu, double kappa, int threads,
                            std::string* csv);
CheckRecord check_estimator_symmetry(const VerifySpec& spec, int threads, std::string* csv);
CheckRecord check_volume_bounds(const VerifySpec& spec, int threads, std::string* csv);

}  // namespace cellhom
