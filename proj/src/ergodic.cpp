#include "cellhom/ergodic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "cellhom/concurrency.hpp"

namespace cellhom {

namespace {

double pairwise(const std::vector<double>& v, size_t lo, size_t hi) {
  if (hi - lo <= 8) {
    double s = 0;
    for (size_t i = lo; i < hi; ++i) s += v[i];
    return s;
  }
  size_t mid = lo + (hi - lo) / 2;
  return pairwise(v, lo, mid) + pairwise(v, mid, hi);
}

// Canonical representative of a (zeta, nu) query: last nonzero coordinate of
// nu positive. The flipped query labels the complementary side of the same
// hyperplane, which leaves the cut value unchanged.
void canonicalize(VecD& zeta, RationalDirection& nu) {
  if (nu.is_canonical()) return;
  nu = nu.negated();
  for (auto& z : zeta) z = -z;
}

}  // namespace

double stable_mean(const std::vector<double>& v) {
  if (v.empty()) return 0;
  return pairwise(v, 0, v.size()) / static_cast<double>(v.size());
}

double stable_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0;
  double m = stable_mean(v);
  std::vector<double> sq(v.size());
  for (size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - m) * (v[i] - m);
  return std::sqrt(pairwise(sq, 0, sq.size()) / static_cast<double>(v.size() - 1));
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

SurfaceIntegrand surface_integrand_for(const SurfaceProcessSpec& spec, uint64_t seed) {
  CoefficientField field = sample_medium(spec.medium, seed, spec.frame.dim());
  return make_surface_integrand(std::move(field), spec.family, spec.zcap);
}

MuValue mu_eval_field(const SurfaceProcessSpec& spec, const CoefficientField& field, const Interval1& interval) {
  SurfaceIntegrand g = make_surface_integrand(field, spec.family, spec.zcap);
  Parallelepiped lifted = lift_interval(interval, spec.frame);
  // Thickness floored at one lattice layer so short pieces still rasterize
  // to cells straddling the interface.
  CellSet cells = rasterize(lifted.region(Rational(1, spec.frame.M)), spec.cut.ring_width);
  ExactHalfSpace side(spec.frame.nu, RVec(2, Rational(0)));
  CutGraph graph = assemble_cut_graph_exact(g, spec.zeta, side, cells, spec.cut);
  SurfaceCellResult r = solve_min_cut(graph);
  MuValue mv;
  mv.cut_scaled = r.value_scaled;
  mv.value = r.value / static_cast<double>(spec.frame.M);
  return mv;
}

double mu_eval(const SurfaceProcessSpec& spec, uint64_t seed, const Interval1& interval) {
  Rational min_len(2, spec.frame.M);
  if (interval.length() < min_len)
    throw std::invalid_argument("mu_eval: interval shorter than 2/M lattice layers");
  CoefficientField field = sample_medium(spec.medium, seed, spec.frame.dim());
  return mu_eval_field(spec, field, interval).value;
}

SubadditivityReport check_subadditivity(const SurfaceProcessSpec& spec, uint64_t seed, const Interval1& interval,
                                        const std::vector<Rational>& cuts, double eps) {
  for (const Rational& c : cuts) {
    if (!(interval.a < c && c < interval.b))
      throw std::invalid_argument("subadditivity: cut outside the interval");
    if ((c * Rational(spec.frame.M)).den != 1)
      throw std::invalid_argument("subadditivity: cuts must be multiples of 1/M");
  }
  std::vector<Rational> pts;
  pts.push_back(interval.a);
  for (const Rational& c : cuts) pts.push_back(c);
  pts.push_back(interval.b);
  for (size_t i = 0; i + 1 < pts.size(); ++i)
    if (!(pts[i] < pts[i + 1])) throw std::invalid_argument("subadditivity: cuts must be strictly increasing");

  CoefficientField field = sample_medium(spec.medium, seed, spec.frame.dim());
  SubadditivityReport rep;
  rep.whole = mu_eval_field(spec, field, interval).value;
  for (size_t i = 0; i + 1 < pts.size(); ++i)
    rep.pieces_sum += mu_eval_field(spec, field, Interval1(pts[i], pts[i + 1])).value;
  rep.slack = rep.pieces_sum - rep.whole;
  rep.pass = rep.slack >= -eps;
  rep.detail = "A'=[" + interval.a.str() + "," + interval.b.str() + ") pieces=" + std::to_string(pts.size() - 1);
  return rep;
}

CovarianceReport check_covariance(const SurfaceProcessSpec& spec, uint64_t seed, const Interval1& interval,
                                  long long zprime) {
  CoefficientField field = sample_medium(spec.medium, seed, spec.frame.dim());
  Interval1 translated(interval.a + Rational(zprime), interval.b + Rational(zprime));
  MuValue lhs = mu_eval_field(spec, field, translated);

  LatticePoint shift_vec = lattice_tangent_shift(spec.frame, {zprime});
  CoefficientField shifted = field.shifted(shift_vec);
  MuValue rhs = mu_eval_field(spec, shifted, interval);

  CovarianceReport rep;
  rep.translated = lhs.value;
  rep.shifted = rhs.value;
  rep.equal = lhs.cut_scaled == rhs.cut_scaled;
  return rep;
}

void EstimateSeries::compute_stats() {
  size_t nt = ts.size();
  mean.assign(nt, 0);
  median.assign(nt, 0);
  stddev.assign(nt, 0);
  for (size_t i = 0; i < nt; ++i) {
    mean[i] = stable_mean(values[i]);
    median[i] = median_of(values[i]);
    stddev[i] = stable_std(values[i]);
  }
  mean_diffs.clear();
  for (size_t i = 0; i + 1 < nt; ++i) mean_diffs.push_back(mean[i + 1] - mean[i]);
  if (nt > 0) {
    point_estimate = mean.back();
    size_t ns = values.back().size();
    error_bar = ns > 1 ? 2.0 * stddev.back() / std::sqrt(static_cast<double>(ns)) : 0.0;
    concentration_ratio = (stddev.front() > 0) ? stddev.back() / stddev.front() : 0.0;
  }
}

EstimateSeries estimate_ghom(const SurfaceProcessSpec& spec, const std::vector<long long>& schedule,
                             int n_seeds, uint64_t seed_base, int threads) {
  for (size_t i = 0; i + 1 < schedule.size(); ++i)
    if (schedule[i] >= schedule[i + 1]) throw std::invalid_argument("schedule must be strictly increasing");

  SurfaceProcessSpec canon = spec;
  RationalDirection nu = spec.frame.nu;
  canonicalize(canon.zeta, nu);
  canon.frame = make_frame(nu);

  EstimateSeries series;
  series.ts = schedule;
  for (int s = 0; s < n_seeds; ++s) series.seeds.push_back(seed_base + static_cast<uint64_t>(s));
  series.values.assign(schedule.size(), std::vector<double>(n_seeds, 0.0));

  size_t total = schedule.size() * static_cast<size_t>(n_seeds);
  std::vector<uint8_t> failed(schedule.size(), 0);
  parallel_for(total, threads, [&](size_t task) {
    size_t ti = task / n_seeds;
    size_t si = task % n_seeds;
    try {
      SurfaceIntegrand g = surface_integrand_for(canon, series.seeds[si]);
      SurfaceCellResult r = surface_cell_value(g, canon.zeta, canon.frame, RVec(2, Rational(0)),
                                               Rational(schedule[ti]), canon.cut);
      series.values[ti][si] = r.normalized;
    } catch (const std::exception&) {
      failed[ti] = 1;  // budget exceeded at this scale; series is truncated below
    }
  });
  size_t keep = 0;
  while (keep < schedule.size() && !failed[keep]) ++keep;
  if (keep < schedule.size()) {
    if (keep == 0) throw std::invalid_argument("estimate: every scale exceeded the solver budget");
    series.ts.resize(keep);
    series.values.resize(keep);
    series.complete = false;
  }
  series.compute_stats();
  return series;
}

VolumeIntegrand volume_integrand_for(const VolumeProcessSpec& spec, uint64_t seed) {
  CoefficientField field = sample_medium(spec.medium, seed, spec.xi.cols);
  return make_volume_integrand(std::move(field), spec.p);
}

EstimateSeries estimate_fhom(const VolumeProcessSpec& spec, const std::vector<long long>& schedule,
                             int n_seeds, uint64_t seed_base, int threads) {
  EstimateSeries series;
  series.ts = schedule;
  for (int s = 0; s < n_seeds; ++s) series.seeds.push_back(seed_base + static_cast<uint64_t>(s));
  series.values.assign(schedule.size(), std::vector<double>(n_seeds, 0.0));

  size_t total = schedule.size() * static_cast<size_t>(n_seeds);
  std::vector<uint8_t> nonconv(total, 0);
  parallel_for(total, threads, [&](size_t task) {
    size_t ti = task / n_seeds;
    size_t si = task % n_seeds;
    VolumeIntegrand f = volume_integrand_for(spec, series.seeds[si]);
    VecD center(spec.xi.cols, 0.0);
    auto problem = assemble_volume_problem(f, spec.xi, center, static_cast<double>(schedule[ti]), spec.h);
    VolumeCellResult r = solve_volume_cell(problem, spec.tol, spec.max_iter);
    series.values[ti][si] = r.normalized;
    nonconv[task] = r.converged ? 0 : 1;
  });
  for (uint8_t v : nonconv) series.unconverged += v;
  series.compute_stats();
  return series;
}

GapReport check_shift_invariance(const SurfaceProcessSpec& spec, const LatticePoint& z, long long t_large,
                                 int n_seeds, uint64_t seed_base, double tol, int threads) {
  GapReport rep;
  rep.ts = {t_large};
  std::vector<double> gaps(n_seeds, 0.0);
  parallel_for(static_cast<size_t>(n_seeds), threads, [&](size_t si) {
    uint64_t seed = seed_base + si;
    CoefficientField field = sample_medium(spec.medium, seed, spec.frame.dim());
    SurfaceIntegrand g0 = make_surface_integrand(field, spec.family, spec.zcap);
    SurfaceIntegrand g1 = make_surface_integrand(field.shifted(z), spec.family, spec.zcap);
    RVec origin(2, Rational(0));
    double v0 = surface_cell_value(g0, spec.zeta, spec.frame, origin, Rational(t_large), spec.cut).normalized;
    double v1 = surface_cell_value(g1, spec.zeta, spec.frame, origin, Rational(t_large), spec.cut).normalized;
    gaps[si] = std::abs(v1 - v0) / std::max(std::abs(v0), 1e-300);
  });
  rep.mean_gap = {stable_mean(gaps)};
  rep.final_gap = rep.mean_gap.back();
  rep.pass = rep.final_gap <= tol;
  return rep;
}

GapReport check_center_independence(const SurfaceProcessSpec& spec, const std::vector<long long>& x,
                                    const std::vector<long long>& schedule, int n_seeds, uint64_t seed_base,
                                    double tol, int threads) {
  GapReport rep;
  rep.ts = schedule;
  std::vector<std::vector<double>> gaps(schedule.size(), std::vector<double>(n_seeds, 0.0));
  size_t total = schedule.size() * static_cast<size_t>(n_seeds);
  parallel_for(total, threads, [&](size_t task) {
    size_t ti = task / n_seeds;
    size_t si = task % n_seeds;
    long long t = schedule[ti];
    uint64_t seed = seed_base + si;
    SurfaceIntegrand g = surface_integrand_for(spec, seed);
    RVec origin(2, Rational(0));
    RVec moved{Rational(t * x[0]), Rational(t * x[1])};
    double v0 = surface_cell_value(g, spec.zeta, spec.frame, origin, Rational(t), spec.cut).normalized;
    double v1 = surface_cell_value(g, spec.zeta, spec.frame, moved, Rational(t), spec.cut).normalized;
    gaps[ti][si] = std::abs(v1 - v0) / std::max(std::abs(v0), 1e-300);
  });
  rep.mean_gap.resize(schedule.size());
  for (size_t ti = 0; ti < schedule.size(); ++ti) rep.mean_gap[ti] = stable_mean(gaps[ti]);
  rep.final_gap = rep.mean_gap.back();
  bool shrinking = true;
  for (size_t i = 0; i + 1 < rep.mean_gap.size(); ++i) shrinking &= rep.mean_gap[i + 1] <= rep.mean_gap[i];
  rep.pass = shrinking && rep.final_gap <= tol;
  return rep;
}

std::vector<double> birkhoff_average(const CoefficientField& field, const CellObservable& obs,
                                     const LatticePoint& z, int k_max) {
  std::vector<double> out(static_cast<size_t>(k_max));
  double acc = 0;
  CoefficientField current = field;
  for (int k = 1; k <= k_max; ++k) {
    current = current.shifted(z);
    acc += obs(current);
    out[static_cast<size_t>(k - 1)] = acc / k;
  }
  return out;
}

ExpectationSeries ergodic_expectation_surface(const SurfaceProcessSpec& spec, const std::vector<long long>& schedule,
                                              int n_seeds, uint64_t seed_base, int threads) {
  ExpectationSeries out;
  out.ts = schedule;
  EstimateSeries series = estimate_ghom(spec, schedule, n_seeds, seed_base, threads);
  out.seed_mean = series.mean;
  return out;
}

bool HomDensityTable::brackets_ok() const {
  for (const auto& e : entries)
    if (!e.within) return false;
  return true;
}

HomDensityTable build_surface_table(const SurfaceProcessSpec& base, const std::vector<SurfaceQuery>& queries,
                                    const std::vector<long long>& schedule, int n_seeds, uint64_t seed_base,
                                    long long strip_length, int threads) {
  HomDensityTable table;
  std::map<std::string, double> kappa_cache;
  for (const auto& q : queries) {
    SurfaceProcessSpec spec = base;
    spec.zeta = q.zeta;
    spec.frame = make_frame(q.nu);
    DensityTableEntry entry;
    entry.label = q.label;
    entry.series = estimate_ghom(spec, schedule, n_seeds, seed_base, threads);
    entry.estimate = entry.series.point_estimate;
    entry.error_bar = entry.series.error_bar;

    RationalDirection canon = q.nu.is_canonical() ? q.nu : q.nu.negated();
    double kappa = 1.0;
    if (!canon.is_axis_last()) {
      auto it = kappa_cache.find(canon.str());
      if (it == kappa_cache.end())
        it = kappa_cache.emplace(canon.str(), calibrate_metrication(spec.cut, canon, strip_length)).first;
      kappa = it->second;
    }
    SurfaceIntegrand g = surface_integrand_for(spec, seed_base);
    double slack = 2.0 / static_cast<double>(schedule.back());
    entry.lower = g.c4 * (1.0 - slack);
    entry.upper = g.c5 * (1.0 + norm2(q.zeta)) * kappa * (1.0 + slack);
    entry.within = entry.estimate >= entry.lower && entry.estimate <= entry.upper;
    table.entries.push_back(std::move(entry));
  }
  return table;
}

HomDensityTable build_volume_table(const VolumeProcessSpec& base, const std::vector<VolumeQuery>& queries,
                                   const std::vector<long long>& schedule, int n_seeds, uint64_t seed_base,
                                   int threads) {
  HomDensityTable table;
  for (const auto& q : queries) {
    VolumeProcessSpec spec = base;
    spec.xi = q.xi;
    DensityTableEntry entry;
    entry.label = q.label;
    entry.series = estimate_fhom(spec, schedule, n_seeds, seed_base, threads);
    entry.estimate = entry.series.point_estimate;
    entry.error_bar = entry.series.error_bar;
    VolumeIntegrand f = volume_integrand_for(spec, seed_base);
    double xin = q.xi.frobenius();
    entry.lower = f.c1 * std::pow(xin, f.p) * (1 - 1e-9);
    entry.upper = f.c2 * (1.0 + std::pow(xin, f.p)) * (1 + 1e-9);
    entry.within = entry.estimate >= entry.lower && entry.estimate <= entry.upper;
    table.entries.push_back(std::move(entry));
  }
  return table;
}

bool table_symmetry_ok(const HomDensityTable& table, const std::vector<SurfaceQuery>& queries) {
  for (size_t i = 0; i < queries.size(); ++i)
    for (size_t j = i + 1; j < queries.size(); ++j) {
      if (queries[i].zeta.size() != queries[j].zeta.size()) continue;
      bool flipped = queries[i].nu.negated().num == queries[j].nu.num &&
                     queries[i].nu.den == queries[j].nu.den;
      for (size_t k = 0; k < queries[i].zeta.size() && flipped; ++k)
        flipped = (queries[i].zeta[k] == -queries[j].zeta[k]);
      if (flipped && table.entries[i].estimate != table.entries[j].estimate) return false;
    }
  return true;
}

ExpectationSeries ergodic_expectation_volume(const VolumeProcessSpec& spec, const std::vector<long long>& schedule,
                                             int n_seeds, uint64_t seed_base, long long dyadic_t, int threads) {
  ExpectationSeries out;
  out.ts = schedule;
  EstimateSeries series = estimate_fhom(spec, schedule, n_seeds, seed_base, threads);
  out.seed_mean = series.mean;

  // Dyadic comparison on common realizations: the cube of side 2t against
  // the average over its 2^n subcubes, which pastes exactly, so per seed
  // m(Q_2t)/(2t)^n <= subcube average. Means over seeds then compare the
  // expectations at t and 2t.
  if (dyadic_t > 0) {
    if (dyadic_t % 2 != 0) throw std::invalid_argument("dyadic check: t must be even");
    int n = spec.xi.cols;
    std::vector<double> big(n_seeds, 0.0), small(n_seeds, 0.0);
    parallel_for(static_cast<size_t>(n_seeds), threads, [&](size_t si) {
      VolumeIntegrand f = volume_integrand_for(spec, seed_base + si);
      double t2 = static_cast<double>(2 * dyadic_t);
      auto pb = assemble_volume_problem(f, spec.xi, VecD(n, 0.0), t2, spec.h);
      big[si] = solve_volume_cell(pb, spec.tol, spec.max_iter).value / std::pow(t2, n);
      double tt = static_cast<double>(dyadic_t);
      double sum = 0;
      int corners = 1 << n;
      for (int mask = 0; mask < corners; ++mask) {
        VecD c(n);
        for (int i = 0; i < n; ++i) c[i] = (mask >> i & 1) ? tt / 2 : -tt / 2;
        auto ps = assemble_volume_problem(f, spec.xi, c, tt, spec.h);
        sum += solve_volume_cell(ps, spec.tol, spec.max_iter).value;
      }
      small[si] = sum / (corners * std::pow(tt, n));
    });
    out.dyadic_large = stable_mean(big);
    out.dyadic_small = stable_mean(small);
    out.dyadic_slack = out.dyadic_small - out.dyadic_large;
    out.dyadic_pass = out.dyadic_slack >= -1e-9;
  }
  return out;
}

}  // namespace cellhom
