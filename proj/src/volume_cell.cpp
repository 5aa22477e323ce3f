#include "cellhom/volume_cell.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace cellhom {

namespace {

// Strides for a (k+1)^n node grid / k^n cell grid, row-major.
void fill_strides(int n, long long per_side, long long* strides) {
  long long s = 1;
  for (int i = 0; i < n; ++i) {
    strides[i] = s;
    s *= per_side;
  }
}

double pairwise_sum(const std::vector<double>& v, size_t lo, size_t hi) {
  if (hi - lo <= 8) {
    double s = 0;
    for (size_t i = lo; i < hi; ++i) s += v[i];
    return s;
  }
  size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

}  // namespace

long long DiscreteVolumeProblem::node_count() const {
  long long c = 1;
  for (int i = 0; i < n; ++i) c *= cells_per_side + 1;
  return c;
}

long long DiscreteVolumeProblem::cell_count() const {
  long long c = 1;
  for (int i = 0; i < n; ++i) c *= cells_per_side;
  return c;
}

VecD DiscreteVolumeProblem::node_position(const std::vector<int>& idx) const {
  VecD y(n);
  for (int i = 0; i < n; ++i) y[i] = center[i] - t / 2 + h * idx[i];
  return y;
}

double DiscreteVolumeProblem::energy(const std::vector<double>& values) const {
  const long long N = cells_per_side;
  long long node_stride[3], cell_stride[3];
  fill_strides(n, N + 1, node_stride);
  fill_strides(n, N, cell_stride);
  const double hn = std::pow(h, n);
  const double inv_h = 1.0 / h;
  const long long ncells = cell_count();
  std::vector<double> terms(static_cast<size_t>(ncells));

  std::vector<int> c(n, 0);
  for (long long cid = 0; cid < ncells; ++cid) {
    long long corner = 0;
    for (int i = 0; i < n; ++i) corner += static_cast<long long>(c[i]) * node_stride[i];
    double s2 = 0;
    for (int i = 0; i < n; ++i) {
      long long nb = corner + node_stride[i];
      for (int j = 0; j < m; ++j) {
        double g = (values[nb * m + j] - values[corner * m + j]) * inv_h;
        s2 += g * g;
      }
    }
    terms[cid] = coeff[cid] * hn * (p_is_two() ? s2 : std::pow(s2, f.p / 2.0));
    for (int i = 0; i < n; ++i) {
      if (++c[i] < N) break;
      c[i] = 0;
    }
  }
  return pairwise_sum(terms, 0, terms.size());
}

void DiscreteVolumeProblem::gradient(const std::vector<double>& values, std::vector<double>& out) const {
  const long long N = cells_per_side;
  long long node_stride[3];
  fill_strides(n, N + 1, node_stride);
  const double hn = std::pow(h, n);
  const double inv_h = 1.0 / h;
  out.assign(values.size(), 0.0);

  std::vector<int> c(n, 0);
  const long long ncells = cell_count();
  double G[3 * 4];  // m*n scratch, m <= 4
  if (m > 4) throw std::invalid_argument("volume problem: m > 4 unsupported");
  for (long long cid = 0; cid < ncells; ++cid) {
    long long corner = 0;
    for (int i = 0; i < n; ++i) corner += static_cast<long long>(c[i]) * node_stride[i];
    double s2 = 0;
    for (int i = 0; i < n; ++i) {
      long long nb = corner + node_stride[i];
      for (int j = 0; j < m; ++j) {
        double g = (values[nb * m + j] - values[corner * m + j]) * inv_h;
        G[i * m + j] = g;
        s2 += g * g;
      }
    }
    // d/dG of a |G|^p = p a |G|^(p-2) G; for p=2 this is 2 a G exactly.
    double w;
    if (p_is_two()) {
      w = 2.0 * coeff[cid] * hn;
    } else if (s2 == 0.0) {
      w = 0.0;
    } else {
      w = f.p * coeff[cid] * hn * std::pow(s2, f.p / 2.0 - 1.0);
    }
    for (int i = 0; i < n; ++i) {
      long long nb = corner + node_stride[i];
      for (int j = 0; j < m; ++j) {
        double d = w * G[i * m + j] * inv_h;
        out[nb * m + j] += d;
        out[corner * m + j] -= d;
      }
    }
    for (int i = 0; i < n; ++i) {
      if (++c[i] < N) break;
      c[i] = 0;
    }
  }
}

DiscreteVolumeProblem assemble_volume_problem(const VolumeIntegrand& f, const Mat& xi, const VecD& center,
                                              double t, double h) {
  DiscreteVolumeProblem pr;
  pr.f = f;
  pr.xi = xi;
  pr.center = center;
  pr.t = t;
  pr.h = h;
  pr.n = xi.cols;
  pr.m = xi.rows;
  if (pr.n != f.field.dim()) throw std::invalid_argument("volume problem: xi columns must match field dimension");
  double ratio = t / h;
  long long N = std::llround(ratio);
  if (std::abs(ratio - static_cast<double>(N)) > 1e-9 || N < 2)
    throw std::invalid_argument("volume problem: t/h must be an integer >= 2");
  pr.cells_per_side = static_cast<int>(N);

  const long long nodes = pr.node_count();
  pr.u.assign(static_cast<size_t>(nodes * pr.m), 0.0);
  pr.pinned.assign(static_cast<size_t>(nodes), 0);

  long long node_stride[3];
  fill_strides(pr.n, N + 1, node_stride);
  std::vector<int> idx(pr.n, 0);
  for (long long nd = 0; nd < nodes; ++nd) {
    bool ring = false;
    for (int i = 0; i < pr.n; ++i) ring |= (idx[i] == 0 || idx[i] == N);
    pr.pinned[nd] = ring ? 1 : 0;
    VecD y = pr.node_position(idx);
    for (int j = 0; j < pr.m; ++j) {
      double v = 0;
      for (int i = 0; i < pr.n; ++i) v += xi.at(j, i) * y[i];
      pr.u[nd * pr.m + j] = v;  // interior initialized to the affine datum too
    }
    for (int i = 0; i < pr.n; ++i) {
      if (++idx[i] <= N) break;
      idx[i] = 0;
    }
  }

  pr.coeff.resize(static_cast<size_t>(pr.cell_count()));
  std::vector<int> c(pr.n, 0);
  for (long long cid = 0; cid < pr.cell_count(); ++cid) {
    VecD x = pr.node_position(c);
    pr.coeff[cid] = f.field.at_point(x);
    for (int i = 0; i < pr.n; ++i) {
      if (++c[i] < N) break;
      c[i] = 0;
    }
  }
  return pr;
}

namespace {

// Quadratic operator for p = 2: gradient of the energy at (free = v,
// pinned = 0), which is exactly A v on the free block.
void apply_quadratic(const DiscreteVolumeProblem& pr, const std::vector<double>& v, std::vector<double>& out) {
  pr.gradient(v, out);
}

double dot_free(const DiscreteVolumeProblem& pr, const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  const long long nodes = pr.node_count();
  for (long long nd = 0; nd < nodes; ++nd) {
    if (pr.pinned[nd]) continue;
    for (int j = 0; j < pr.m; ++j) s += a[nd * pr.m + j] * b[nd * pr.m + j];
  }
  return s;
}

void zero_pinned(const DiscreteVolumeProblem& pr, std::vector<double>& v) {
  const long long nodes = pr.node_count();
  for (long long nd = 0; nd < nodes; ++nd)
    if (pr.pinned[nd])
      for (int j = 0; j < pr.m; ++j) v[nd * pr.m + j] = 0.0;
}

VolumeCellResult solve_quadratic(const DiscreteVolumeProblem& pr, double tol, int max_iter) {
  const size_t sz = pr.u.size();
  std::vector<double> x = pr.u;       // full state, pinned entries fixed
  std::vector<double> r(sz), ap(sz), pdir(sz), tmp(sz);

  // r = -grad E(x) restricted to free nodes.
  pr.gradient(x, tmp);
  for (size_t i = 0; i < sz; ++i) r[i] = -tmp[i];
  zero_pinned(pr, r);

  // Reference scale: residual of the affine start (datum everywhere).
  double rr = dot_free(pr, r, r);
  const double ref = std::sqrt(rr);
  VolumeCellResult res;
  if (ref == 0.0) {
    res.converged = true;
    res.iterations = 0;
    res.residual = 0.0;
  } else {
    pdir = r;
    int it = 0;
    for (; it < max_iter; ++it) {
      if (std::sqrt(rr) <= tol * ref) break;
      apply_quadratic(pr, pdir, ap);
      zero_pinned(pr, ap);
      double pap = dot_free(pr, pdir, ap);
      if (pap <= 0) break;  // numerically flat direction
      double alpha = rr / pap;
      for (size_t i = 0; i < sz; ++i) x[i] += alpha * pdir[i];
      for (size_t i = 0; i < sz; ++i) r[i] -= alpha * ap[i];
      double rr_new = dot_free(pr, r, r);
      double beta = rr_new / rr;
      rr = rr_new;
      for (size_t i = 0; i < sz; ++i) pdir[i] = r[i] + beta * pdir[i];
      zero_pinned(pr, pdir);
    }
    res.iterations = it;
    res.residual = std::sqrt(rr) / ref;
    res.converged = std::sqrt(rr) <= tol * ref;
  }
  res.minimizer = std::move(x);
  res.value = pr.energy(res.minimizer);
  res.normalized = res.value / std::pow(pr.t, pr.n);
  return res;
}

VolumeCellResult solve_descent(const DiscreteVolumeProblem& pr, double tol, int max_iter) {
  const size_t sz = pr.u.size();
  std::vector<double> x = pr.u;
  std::vector<double> g(sz), trial(sz);
  double e = pr.energy(x);
  double step = 1.0;
  int it = 0;
  double rel_drop = 0;
  for (; it < max_iter; ++it) {
    pr.gradient(x, g);
    zero_pinned(pr, g);
    double gg = dot_free(pr, g, g);
    if (gg == 0.0) break;
    // Backtracking with Armijo decrease; step carried across sweeps.
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      for (size_t i = 0; i < sz; ++i) trial[i] = x[i] - step * g[i];
      double et = pr.energy(trial);
      if (et <= e - 1e-4 * step * gg) {
        rel_drop = (e - et) / std::max(std::abs(e), 1.0);
        x.swap(trial);
        e = et;
        step *= 2.0;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    if (rel_drop < tol) {
      ++it;
      break;
    }
  }
  VolumeCellResult res;
  res.iterations = it;
  res.residual = rel_drop;
  res.converged = it < max_iter;
  res.minimizer = std::move(x);
  res.value = e;
  res.normalized = e / std::pow(pr.t, pr.n);
  return res;
}

}  // namespace

VolumeCellResult solve_volume_cell(const DiscreteVolumeProblem& problem, double tol, int max_iter) {
  if (problem.p_is_two()) return solve_quadratic(problem, tol, max_iter);
  return solve_descent(problem, tol, max_iter);
}

double gradient_check(const DiscreteVolumeProblem& problem, const std::vector<double>& values,
                      int probe_count, uint64_t rng_seed, double step) {
  std::vector<double> g;
  problem.gradient(values, g);
  std::vector<double> work = values;
  std::mt19937_64 rng(rng_seed);
  const long long nodes = problem.node_count();
  std::uniform_int_distribution<long long> pick_node(0, nodes - 1);
  std::uniform_int_distribution<int> pick_comp(0, problem.m - 1);
  double worst = 0;
  for (int k = 0; k < probe_count; ++k) {
    long long nd = pick_node(rng);
    if (problem.pinned[nd]) {
      --k;  // probe free nodes only
      continue;
    }
    int j = pick_comp(rng);
    size_t i = static_cast<size_t>(nd) * problem.m + j;
    double save = work[i];
    work[i] = save + step;
    double ep = problem.energy(work);
    work[i] = save - step;
    double em = problem.energy(work);
    work[i] = save;
    double fd = (ep - em) / (2 * step);
    double denom = std::max({std::abs(g[i]), std::abs(fd), 1e-8});
    worst = std::max(worst, std::abs(fd - g[i]) / denom);
  }
  return worst;
}

}  // namespace cellhom
