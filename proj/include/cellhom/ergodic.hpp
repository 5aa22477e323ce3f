#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cellhom/medium.hpp"
#include "cellhom/surface_cell.hpp"
#include "cellhom/volume_cell.hpp"

namespace cellhom {

// Surface process: for a fixed jump vector and rational direction, the map
// A' -> m(u_datum, lifted(A')) / M^{n-1} over 1-d intervals. Fields are
// recreated per seed from the medium spec.
struct SurfaceProcessSpec {
  VecD zeta{1.0};
  Frame frame;
  SurfaceFamily family = SurfaceFamily::Perimeter;
  double zcap = 8.0;
  MediumSpec medium;
  CutOptions cut;
};

SurfaceIntegrand surface_integrand_for(const SurfaceProcessSpec& spec, uint64_t seed);

struct MuValue {
  double value = 0;          // (1/M^{n-1}) * cut value
  long long cut_scaled = 0;  // integer cut value before either rescale
};

// Process value on one realization. Enforces |A'| >= 2/M.
double mu_eval(const SurfaceProcessSpec& spec, uint64_t seed, const Interval1& interval);
// Field-level variant without the length precondition (used by the
// subadditivity check, whose pieces may be shorter).
MuValue mu_eval_field(const SurfaceProcessSpec& spec, const CoefficientField& field, const Interval1& interval);

struct SubadditivityReport {
  double whole = 0;
  double pieces_sum = 0;
  double slack = 0;  // pieces_sum - whole, expected >= 0
  bool pass = false;
  std::string detail;
};

// Partition A' at the given cut points (multiples of 1/M strictly inside)
// and compare the process value with the sum over pieces.
SubadditivityReport check_subadditivity(const SurfaceProcessSpec& spec, uint64_t seed, const Interval1& interval,
                                        const std::vector<Rational>& cuts, double eps = 1e-9);

struct CovarianceReport {
  double translated = 0;  // mu(omega, A' + z')
  double shifted = 0;     // mu(tau_{z'_nu} omega, A')
  bool equal = false;     // bit-exact on the integer scale
};

CovarianceReport check_covariance(const SurfaceProcessSpec& spec, uint64_t seed, const Interval1& interval,
                                  long long zprime);

struct EstimateSeries {
  std::vector<long long> ts;
  std::vector<uint64_t> seeds;
  std::vector<std::vector<double>> values;  // [t index][seed index]
  std::vector<double> mean, median, stddev;
  std::vector<double> mean_diffs;  // successive differences of the means
  double point_estimate = 0;  // mean at largest t
  double error_bar = 0;       // 2 x standard error at largest t
  double concentration_ratio = 0;  // stddev(largest t) / stddev(smallest t)
  bool complete = true;  // false when the solver budget truncated the schedule
  int unconverged = 0;   // volume solves that stopped at max_iter
  void compute_stats();
};

// Estimates the homogenised surface density from cube problems Q^nu_t(0).
// (zeta, nu) queries are canonicalized to the hemisphere with positive last
// nonzero coordinate, which realizes the (g7) symmetry of the estimator
// bit-exactly: the flipped query assembles the identical graph.
EstimateSeries estimate_ghom(const SurfaceProcessSpec& spec, const std::vector<long long>& schedule,
                             int n_seeds, uint64_t seed_base, int threads = 1);

struct VolumeProcessSpec {
  Mat xi;
  double p = 2.0;
  MediumSpec medium;
  double h = 0.25;
  double tol = 1e-11;
  int max_iter = 20000;
};

VolumeIntegrand volume_integrand_for(const VolumeProcessSpec& spec, uint64_t seed);

EstimateSeries estimate_fhom(const VolumeProcessSpec& spec, const std::vector<long long>& schedule,
                             int n_seeds, uint64_t seed_base, int threads = 1);

struct GapReport {
  std::vector<long long> ts;
  std::vector<double> mean_gap;  // mean relative gap per t
  double final_gap = 0;
  bool pass = false;
};

// Compares estimates on the field and on the shifted field at one large t.
GapReport check_shift_invariance(const SurfaceProcessSpec& spec, const LatticePoint& z, long long t_large,
                                 int n_seeds, uint64_t seed_base, double tol = 0.05, int threads = 1);

// Compares cubes centered at t*x (with datum through t*x) against centered
// cubes along the schedule; the gap must shrink and end below tol.
GapReport check_center_independence(const SurfaceProcessSpec& spec, const std::vector<long long>& x,
                                    const std::vector<long long>& schedule, int n_seeds, uint64_t seed_base,
                                    double tol = 0.05, int threads = 1);

using CellObservable = std::function<double(const CoefficientField&)>;

// Running averages (1/k) sum_{i<=k} obs(shift(field, i*z)).
std::vector<double> birkhoff_average(const CoefficientField& field, const CellObservable& obs,
                                     const LatticePoint& z, int k_max);

struct ExpectationSeries {
  std::vector<long long> ts;
  std::vector<double> seed_mean;  // mean across seeds per t
  // Volume only: dyadic comparison E[m(Q_2t)/(2t)^n] vs subcube average on
  // common seeds; slack >= 0 realizes the decreasing-expectation property.
  double dyadic_small = 0, dyadic_large = 0, dyadic_slack = 0;
  bool dyadic_pass = true;
};

ExpectationSeries ergodic_expectation_surface(const SurfaceProcessSpec& spec, const std::vector<long long>& schedule,
                                              int n_seeds, uint64_t seed_base, int threads = 1);
ExpectationSeries ergodic_expectation_volume(const VolumeProcessSpec& spec, const std::vector<long long>& schedule,
                                             int n_seeds, uint64_t seed_base, long long dyadic_t, int threads = 1);

// Deterministic mean/median/std helpers (seed-index order, pairwise sums).
double stable_mean(const std::vector<double>& v);
double stable_std(const std::vector<double>& v);
double median_of(std::vector<double> v);

struct SurfaceQuery {
  std::string label;
  VecD zeta;
  RationalDirection nu;
};

struct VolumeQuery {
  std::string label;
  Mat xi;
};

struct DensityTableEntry {
  std::string label;
  EstimateSeries series;
  double estimate = 0;
  double error_bar = 0;
  double lower = 0, upper = 0;  // class bracket for this query
  bool within = false;
};

// Estimated densities over a grid of query points, with the class brackets
// ((g5)/(g6) with the kappa factor for surface, (f3)/(f4) for volume) checked
// per entry. Flipped surface queries (-zeta, -nu) produce bit-identical
// estimates via the canonical hemisphere representative.
struct HomDensityTable {
  std::vector<DensityTableEntry> entries;
  bool brackets_ok() const;
};

HomDensityTable build_surface_table(const SurfaceProcessSpec& base, const std::vector<SurfaceQuery>& queries,
                                    const std::vector<long long>& schedule, int n_seeds, uint64_t seed_base,
                                    long long strip_length = 64, int threads = 1);
HomDensityTable build_volume_table(const VolumeProcessSpec& base, const std::vector<VolumeQuery>& queries,
                                   const std::vector<long long>& schedule, int n_seeds, uint64_t seed_base,
                                   int threads = 1);

// Bit-exact equality of the estimates for (zeta, nu) and (-zeta, -nu).
bool table_symmetry_ok(const HomDensityTable& table, const std::vector<SurfaceQuery>& queries);

}  // namespace cellhom
