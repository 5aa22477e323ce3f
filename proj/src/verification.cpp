#include "cellhom/verification.hpp"

#include <cmath>

#include "cellhom/concurrency.hpp"

namespace cellhom {

namespace {

// Deterministic stream of case parameters: one hash chain per (tag, index).
uint64_t case_word(uint64_t seed0, uint64_t tag, uint64_t index, uint64_t slot) {
  return mix64(mix64(seed0 ^ tag) + mix64(index * 0x9e3779b97f4a7c15ULL + slot));
}

long long pick_range(uint64_t w, long long lo, long long hi) {  // inclusive
  return lo + static_cast<long long>(w % static_cast<uint64_t>(hi - lo + 1));
}

std::string join_rows(const std::string& header, const std::vector<std::string>& rows) {
  std::string out = header + "\n";
  for (const auto& r : rows) out += r + "\n";
  return out;
}

SurfaceProcessSpec process_for(const RationalDirection& nu, const CutOptions& cut, SurfaceFamily family,
                               MediumSpec medium) {
  SurfaceProcessSpec spec;
  spec.zeta = {1.0};
  spec.frame = make_frame(nu);
  spec.family = family;
  spec.medium = std::move(medium);
  spec.cut = cut;
  return spec;
}

}  // namespace

bool VerifyOutput::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

VerifySpec verify_spec_from(const ExperimentConfig& cfg, bool quick) {
  VerifySpec spec;
  spec.mincut_instances = cfg.mincut_instances;
  spec.covariance_cases = cfg.structural_cases;
  spec.subadd_cases = cfg.structural_cases;
  spec.bound_cases = std::max(10, cfg.structural_cases / 2);
  spec.cut = cfg.cut_options();
  if (quick) {
    spec.mincut_instances = std::max(20, spec.mincut_instances / 5);
    spec.covariance_cases = std::max(10, spec.covariance_cases / 5);
    spec.subadd_cases = std::max(10, spec.subadd_cases / 5);
    spec.bound_cases = std::max(10, spec.bound_cases / 5);
    spec.volume_cases = 4;
  }
  return spec;
}

CheckRecord check_mincut_exactness(const VerifySpec& spec, int threads, std::string* csv) {
  const int n = spec.mincut_instances;
  std::vector<std::string> rows(n);
  std::vector<uint8_t> ok(n, 0);

  parallel_for(n, threads, [&](size_t i) {
    uint64_t tag = 0x314c7;
    CutOptions opt = spec.cut;
    opt.neighborhood = (i % 2 == 0) ? Neighborhood::N4 : Neighborhood::N8;

    // Axis cube of side 6: 16 free cells behind a one-cell ring.
    Frame frame = make_frame(RationalDirection({0, 1}, 1));
    OrientedCube cube = make_cube(frame, RVec(2, Rational(0)), Rational(6));
    CellSet cells = rasterize(cube.region(), opt.ring_width);
    ExactHalfSpace side(frame.nu, RVec(2, Rational(0)));

    int kind = static_cast<int>(i % 3);
    CutGraph graph;
    if (kind == 0) {
      // Synthetic integer weights in [1,5] keyed off the facet midpoint.
      uint64_t wseed = case_word(spec.seed0, tag, i, 0);
      EdgeWeightFn weights = [wseed](const VecD& mid, const VecD&) {
        LatticePoint key{static_cast<long long>(std::llround(2 * mid[0])),
                         static_cast<long long>(std::llround(2 * mid[1]))};
        return 1.0 + static_cast<double>(cell_hash(wseed, key) % 5);
      };
      graph = assemble_custom_graph(weights, side, cells, opt);
    } else if (kind == 1) {
      CoefficientField field(MediumSpec::iid_cells(1, 3, 0.5), case_word(spec.seed0, tag, i, 1), 2);
      SurfaceIntegrand g = make_surface_integrand(field, SurfaceFamily::Perimeter);
      graph = assemble_cut_graph_exact(g, {1.0}, side, cells, opt);
    } else {
      CoefficientField field(MediumSpec::iid_cells(1, 2, 0.5), case_word(spec.seed0, tag, i, 2), 2);
      SurfaceIntegrand g = make_surface_integrand(field, SurfaceFamily::Amplitude, 6.0);
      double zmag = 0.5 + static_cast<double>(case_word(spec.seed0, tag, i, 3) % 8) * 0.5;
      graph = assemble_cut_graph_exact(g, {zmag}, side, cells, opt);
    }

    double solver = solve_min_cut(graph).value;
    double oracle = brute_force_min(graph);
    ok[i] = (solver == oracle) ? 1 : 0;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%zu,%s,%d,%s,%s,%d", i, opt.neighborhood == Neighborhood::N4 ? "n4" : "n8",
                  kind, fmt_double(solver).c_str(), fmt_double(oracle).c_str(), static_cast<int>(ok[i]));
    rows[i] = buf;
  });

  int failures = 0;
  for (uint8_t v : ok) failures += (v == 0);
  if (csv) *csv = join_rows("case,neighborhood,kind,solver,oracle,equal", rows);
  CheckRecord rec{"mincut_exactness", failures == 0,
                  std::to_string(n) + " instances, " + std::to_string(failures) + " mismatches"};
  return rec;
}

CheckRecord check_covariance_suite(const VerifySpec& spec, const RationalDirection& nu, int threads,
                                   std::string* csv) {
  const int n = spec.covariance_cases;
  SurfaceProcessSpec base = process_for(nu, spec.cut, SurfaceFamily::Perimeter, MediumSpec::iid_cells(1, 3, 0.5));
  long long M = base.frame.M;
  std::vector<std::string> rows(n);
  std::vector<uint8_t> ok(n, 0);

  parallel_for(n, threads, [&](size_t i) {
    uint64_t tag = 0xc0;
    SurfaceProcessSpec spec_i = base;
    if (i % 4 == 3) {  // every fourth case exercises the amplitude family
      spec_i.family = SurfaceFamily::Amplitude;
      spec_i.zeta = {1.0 + static_cast<double>(case_word(spec.seed0, tag, i, 4) % 5)};
    }
    long long ka = pick_range(case_word(spec.seed0, tag, i, 0), -4 * M, 4 * M);
    long long kl = pick_range(case_word(spec.seed0, tag, i, 1), 2, 6 * M);
    long long zp = pick_range(case_word(spec.seed0, tag, i, 2), -5, 5);
    uint64_t seed = case_word(spec.seed0, tag, i, 3);
    Interval1 interval{Rational(ka, M), Rational(ka + kl, M)};
    CovarianceReport rep = check_covariance(spec_i, seed, interval, zp);
    ok[i] = rep.equal ? 1 : 0;
    char buf[200];
    std::snprintf(buf, sizeof buf, "%zu,%s,%llu,%s,%s,%lld,%s,%s,%d", i, nu.str().c_str(),
                  static_cast<unsigned long long>(seed), interval.a.str().c_str(), interval.b.str().c_str(),
                  zp, fmt_double(rep.translated).c_str(), fmt_double(rep.shifted).c_str(),
                  static_cast<int>(ok[i]));
    rows[i] = buf;
  });

  int failures = 0;
  for (uint8_t v : ok) failures += (v == 0);
  if (csv) *csv = join_rows("case,nu,seed,a,b,zprime,translated,shifted,equal", rows);
  return CheckRecord{"covariance_" + std::string(nu.is_axis_last() ? "axis" : "tilted"), failures == 0,
                     std::to_string(n) + " cases, " + std::to_string(failures) + " mismatches"};
}

CheckRecord check_subadditivity_suite(const VerifySpec& spec, const RationalDirection& nu, int threads,
                                      std::string* csv) {
  const int n = spec.subadd_cases;
  SurfaceProcessSpec base = process_for(nu, spec.cut, SurfaceFamily::Perimeter, MediumSpec::iid_cells(1, 3, 0.5));
  long long M = base.frame.M;
  std::vector<std::string> rows(n);
  std::vector<uint8_t> ok(n, 0);
  std::vector<double> slack(n, 0);
  std::vector<std::string> fail_detail(n);

  parallel_for(n, threads, [&](size_t i) {
    uint64_t tag = 0x5ab;
    long long ka = pick_range(case_word(spec.seed0, tag, i, 0), -3 * M, 3 * M);
    long long kl = pick_range(case_word(spec.seed0, tag, i, 1), 3, 8 * M);
    uint64_t seed = case_word(spec.seed0, tag, i, 2);
    Interval1 interval{Rational(ka, M), Rational(ka + kl, M)};
    int ncuts = static_cast<int>(pick_range(case_word(spec.seed0, tag, i, 3), 1, std::min<long long>(3, kl - 1)));
    std::vector<Rational> cuts;
    for (int c = 0; c < ncuts; ++c) {
      long long kc = pick_range(case_word(spec.seed0, tag, i, 10 + c), ka + 1, ka + kl - 1);
      Rational cut(kc, M);
      bool dup = false;
      for (const auto& existing : cuts) dup |= (existing == cut);
      if (!dup) cuts.push_back(cut);
    }
    std::sort(cuts.begin(), cuts.end(), [](const Rational& x, const Rational& y) { return x < y; });
    SubadditivityReport rep = check_subadditivity(base, seed, interval, cuts);
    ok[i] = rep.pass ? 1 : 0;
    slack[i] = rep.slack;
    if (!rep.pass)
      fail_detail[i] = "seed=" + std::to_string(seed) + " " + rep.detail + " slack=" + fmt_double(rep.slack);
    char buf[200];
    std::snprintf(buf, sizeof buf, "%zu,%s,%llu,%s,%s,%zu,%s,%s,%s,%d", i, nu.str().c_str(),
                  static_cast<unsigned long long>(seed), interval.a.str().c_str(), interval.b.str().c_str(),
                  cuts.size(), fmt_double(rep.whole).c_str(), fmt_double(rep.pieces_sum).c_str(),
                  fmt_double(rep.slack).c_str(), static_cast<int>(ok[i]));
    rows[i] = buf;
  });

  int failures = 0;
  std::string first_fail;
  for (int i = 0; i < n; ++i)
    if (!ok[i]) {
      ++failures;
      if (first_fail.empty()) first_fail = fail_detail[i];
    }
  if (csv) *csv = join_rows("case,nu,seed,a,b,ncuts,whole,pieces_sum,slack,pass", rows);
  std::string detail = std::to_string(n) + " cases, " + std::to_string(failures) + " violations";
  if (!first_fail.empty()) detail += "; first: " + first_fail;
  return CheckRecord{"subadditivity_" + std::string(nu.is_axis_last() ? "axis" : "tilted"), failures == 0, detail};
}

CheckRecord check_mu_bounds(const VerifySpec& spec, const RationalDirection& nu, double kappa, int threads,
                            std::string* csv) {
  const int n = spec.bound_cases;
  std::vector<std::string> rows(n);
  std::vector<uint8_t> ok(n, 0);

  parallel_for(n, threads, [&](size_t i) {
    uint64_t tag = 0xb0;
    SurfaceFamily family = (i % 2 == 0) ? SurfaceFamily::Perimeter : SurfaceFamily::Amplitude;
    SurfaceProcessSpec sp = process_for(nu, spec.cut, family, MediumSpec::iid_cells(1, 3, 0.5));
    if (family == SurfaceFamily::Amplitude)
      sp.zeta = {0.5 + static_cast<double>(case_word(spec.seed0, tag, i, 4) % 10) * 0.5};
    long long M = sp.frame.M;
    long long ka = pick_range(case_word(spec.seed0, tag, i, 0), -3 * M, 3 * M);
    long long kl = pick_range(case_word(spec.seed0, tag, i, 1), 2 * M, 8 * M);
    uint64_t seed = case_word(spec.seed0, tag, i, 2);
    Interval1 interval{Rational(ka, M), Rational(ka + kl, M)};
    double mu = mu_eval(sp, seed, interval);
    SurfaceIntegrand g = surface_integrand_for(sp, seed);
    double len = interval.length().to_double();
    // c5 (1+|zeta|) L(A') kappa, plus one interface cell of rasterization slack.
    double upper = g.c5 * (1.0 + norm2(sp.zeta)) * (len + 1.0) * kappa;
    ok[i] = (mu >= 0.0 && mu <= upper) ? 1 : 0;
    char buf[200];
    std::snprintf(buf, sizeof buf, "%zu,%s,%llu,%s,%s,%s,%s,%d", i, nu.str().c_str(),
                  static_cast<unsigned long long>(seed), interval.a.str().c_str(), interval.b.str().c_str(),
                  fmt_double(mu).c_str(), fmt_double(upper).c_str(), static_cast<int>(ok[i]));
    rows[i] = buf;
  });

  int failures = 0;
  for (uint8_t v : ok) failures += (v == 0);
  if (csv) *csv = join_rows("case,nu,seed,a,b,mu,upper,pass", rows);
  return CheckRecord{"mu_bounds_" + std::string(nu.is_axis_last() ? "axis" : "tilted"), failures == 0,
                     std::to_string(n) + " cases, " + std::to_string(failures) + " violations"};
}

CheckRecord check_estimator_symmetry(const VerifySpec& spec, int threads, std::string* csv) {
  std::vector<std::string> rows;
  bool all_equal = true;
  std::vector<RationalDirection> dirs{RationalDirection({0, 1}, 1), RationalDirection({3, 4}, 5),
                                      RationalDirection({-4, 3}, 5)};
  for (const auto& nu : dirs) {
    for (SurfaceFamily family : {SurfaceFamily::Perimeter, SurfaceFamily::Amplitude}) {
      SurfaceProcessSpec sp = process_for(nu, spec.cut, family, MediumSpec::iid_cells(1, 3, 0.5));
      sp.zeta = {1.5};
      SurfaceProcessSpec flipped = sp;
      flipped.frame = make_frame(nu.negated());
      flipped.zeta = {-1.5};
      EstimateSeries a = estimate_ghom(sp, {8, 16}, 3, spec.seed0, threads);
      EstimateSeries b = estimate_ghom(flipped, {8, 16}, 3, spec.seed0, threads);
      bool equal = a.point_estimate == b.point_estimate;
      for (size_t ti = 0; ti < a.values.size() && equal; ++ti)
        for (size_t si = 0; si < a.values[ti].size() && equal; ++si)
          equal = a.values[ti][si] == b.values[ti][si];
      all_equal &= equal;
      rows.push_back(nu.str() + "," + (family == SurfaceFamily::Perimeter ? "perimeter" : "amplitude") + "," +
                     fmt_double(a.point_estimate) + "," + fmt_double(b.point_estimate) + "," +
                     std::to_string(equal ? 1 : 0));
    }
  }
  if (csv) *csv = join_rows("nu,family,estimate,flipped_estimate,equal", rows);
  return CheckRecord{"estimator_symmetry", all_equal, std::to_string(rows.size()) + " query pairs"};
}

CheckRecord check_volume_bounds(const VerifySpec& spec, int threads, std::string* csv) {
  const int n = spec.volume_cases;
  std::vector<std::string> rows(n);
  std::vector<uint8_t> ok(n, 0);

  parallel_for(n, threads, [&](size_t i) {
    uint64_t tag = 0xf0;
    uint64_t seed = case_word(spec.seed0, tag, i, 0);
    CoefficientField field(MediumSpec::iid_cells(1, 4, 0.5), seed, 2);
    VolumeIntegrand f = make_volume_integrand(field, 2.0);
    Mat xi(1, 2);
    xi.at(0, 0) = 1.0 + 0.25 * static_cast<double>(case_word(spec.seed0, tag, i, 1) % 4);
    xi.at(0, 1) = 0.25 * static_cast<double>(case_word(spec.seed0, tag, i, 2) % 4);
    auto problem = assemble_volume_problem(f, xi, {0.0, 0.0}, 8.0, 0.5);
    double affine = problem.energy(problem.u);
    VolumeCellResult r = solve_volume_cell(problem, 1e-12, 40000);
    double xin = xi.frobenius();
    double lower = f.c1 * std::pow(xin, f.p) * std::pow(8.0, 2);
    // Pinned affine competitor is admissible; pinned row sums make the mean
    // discrete gradient exactly xi, so Jensen gives the c1 bound.
    ok[i] = (r.converged && r.value <= affine * (1 + 1e-12) && r.value >= lower * (1 - 1e-12)) ? 1 : 0;
    char buf[200];
    std::snprintf(buf, sizeof buf, "%zu,%llu,%s,%s,%s,%d", i, static_cast<unsigned long long>(seed),
                  fmt_double(r.value).c_str(), fmt_double(affine).c_str(), fmt_double(lower).c_str(),
                  static_cast<int>(ok[i]));
    rows[i] = buf;
  });

  int failures = 0;
  for (uint8_t v : ok) failures += (v == 0);
  if (csv) *csv = join_rows("case,seed,value,affine_competitor,jensen_lower,pass", rows);
  return CheckRecord{"volume_bounds", failures == 0,
                     std::to_string(n) + " cases, " + std::to_string(failures) + " violations"};
}

VerifyOutput run_structural_suite(const VerifySpec& spec, int threads) {
  VerifyOutput out;
  RationalDirection axis({0, 1}, 1);
  RationalDirection tilted({3, 4}, 5);

  std::string csv;
  out.checks.push_back(check_mincut_exactness(spec, threads, &csv));
  out.case_files.emplace_back("mincut_cases.csv", csv);

  out.checks.push_back(check_covariance_suite(spec, axis, threads, &csv));
  out.case_files.emplace_back("covariance_axis_cases.csv", csv);
  out.checks.push_back(check_covariance_suite(spec, tilted, threads, &csv));
  out.case_files.emplace_back("covariance_tilted_cases.csv", csv);

  out.checks.push_back(check_subadditivity_suite(spec, axis, threads, &csv));
  out.case_files.emplace_back("subadditivity_axis_cases.csv", csv);
  out.checks.push_back(check_subadditivity_suite(spec, tilted, threads, &csv));
  out.case_files.emplace_back("subadditivity_tilted_cases.csv", csv);

  double kappa_axis = 1.0;
  double kappa_tilted = calibrate_metrication(spec.cut, tilted, 64);
  out.scalars.push_back({"kappa_axis", fmt_double(kappa_axis)});
  out.scalars.push_back({"kappa_tilted_3_4_5", fmt_double(kappa_tilted)});

  out.checks.push_back(check_mu_bounds(spec, axis, kappa_axis, threads, &csv));
  out.case_files.emplace_back("mu_bounds_axis_cases.csv", csv);
  out.checks.push_back(check_mu_bounds(spec, tilted, kappa_tilted, threads, &csv));
  out.case_files.emplace_back("mu_bounds_tilted_cases.csv", csv);

  out.checks.push_back(check_estimator_symmetry(spec, threads, &csv));
  out.case_files.emplace_back("symmetry_cases.csv", csv);

  out.checks.push_back(check_volume_bounds(spec, threads, &csv));
  out.case_files.emplace_back("volume_bounds_cases.csv", csv);

  return out;
}

}  // namespace cellhom
