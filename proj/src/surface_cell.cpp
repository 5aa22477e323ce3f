#include "cellhom/surface_cell.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace cellhom {

int CellSet::index_of(long long x, long long y) const {
  if (x < lo[0] || x >= hi[0] || y < lo[1] || y >= hi[1]) return -1;
  size_t w = static_cast<size_t>(hi[0] - lo[0]);
  return grid[static_cast<size_t>(y - lo[1]) * w + static_cast<size_t>(x - lo[0])];
}

size_t CellSet::free_count() const {
  size_t c = 0;
  for (uint8_t r : ring) c += (r == 0);
  return c;
}

CellSet rasterize(const LatticeRegion& region, int ring_width) {
  if (region.dim() != 2) throw std::invalid_argument("rasterize: surface problems are 2-d");
  CellSet cs;
  region.cell_bounds(cs.lo, cs.hi);
  long long w = cs.hi[0] - cs.lo[0];
  long long h = cs.hi[1] - cs.lo[1];
  if (w <= 0 || h <= 0 || w * h > (1LL << 26)) throw std::invalid_argument("rasterize: degenerate or oversized region");
  cs.grid.assign(static_cast<size_t>(w * h), -1);

  // Row-major scan keeps cell order covariant under integer translations.
  LatticePoint z(2);
  for (long long y = cs.lo[1]; y < cs.hi[1]; ++y)
    for (long long x = cs.lo[0]; x < cs.hi[0]; ++x) {
      z[0] = x;
      z[1] = y;
      if (region.contains_center(z)) {
        cs.grid[static_cast<size_t>(y - cs.lo[1]) * w + (x - cs.lo[0])] = static_cast<int>(cs.cells.size());
        cs.cells.push_back({x, y});
      }
    }

  cs.ring.assign(cs.cells.size(), 0);
  for (size_t i = 0; i < cs.cells.size(); ++i) {
    auto [x, y] = cs.cells[i];
    bool edge = false;
    for (long long dy = -ring_width; dy <= ring_width && !edge; ++dy)
      for (long long dx = -ring_width; dx <= ring_width && !edge; ++dx) {
        if (dx == 0 && dy == 0) continue;
        if (cs.index_of(x + dx, y + dy) < 0) edge = true;
      }
    cs.ring[i] = edge ? 1 : 0;
  }
  return cs;
}

namespace {

struct EdgeDir {
  int dx, dy;
  bool diag;
};

const EdgeDir kDirsN4[] = {{1, 0, false}, {0, 1, false}};
const EdgeDir kDirsN8[] = {{1, 0, false}, {0, 1, false}, {1, 1, true}, {-1, 1, true}};

template <typename LabelFn>
CutGraph assemble_impl(const EdgeWeightFn& weight, LabelFn&& label_of, const CellSet& cells,
                       const CutOptions& opt) {
  CutGraph g;
  g.cells = cells;
  g.scale = std::ldexp(1.0, opt.precision_bits);
  g.free_id.assign(cells.size(), -1);
  g.ring_label.assign(cells.size(), 0);

  for (size_t i = 0; i < cells.size(); ++i) {
    if (cells.ring[i]) {
      g.ring_label[i] = label_of(cells.cells[i]) ? 1 : 0;
    } else {
      g.free_id[i] = g.n_free++;
    }
  }
  if (g.n_free == 0 && cells.size() == 0) throw std::invalid_argument("cut graph: empty region");
  g.cap_s.assign(g.n_free, 0);
  g.cap_t.assign(g.n_free, 0);

  const EdgeDir* dirs = (opt.neighborhood == Neighborhood::N4) ? kDirsN4 : kDirsN8;
  int ndirs = (opt.neighborhood == Neighborhood::N4) ? 2 : 4;
  const double inv_sqrt2 = 0.70710678118654752440;

  auto edge_weight = [&](long long x, long long y, int d) {
    double lam = dirs[d].diag ? opt.lambda_diag : opt.lambda_axis;
    VecD mid{static_cast<double>(x) + 0.5 + dirs[d].dx * 0.5, static_cast<double>(y) + 0.5 + dirs[d].dy * 0.5};
    double ul = dirs[d].diag ? inv_sqrt2 : 1.0;
    VecD nu_edge{dirs[d].dx * ul, dirs[d].dy * ul};
    double wreal = weight(mid, nu_edge) * lam;
    if (!(wreal > 0)) throw std::invalid_argument("cut graph: nonpositive edge weight");
    return std::max<long long>(1, std::llround(wreal * g.scale));
  };

  for (size_t i = 0; i < cells.size(); ++i) {
    auto [x, y] = cells.cells[i];
    for (int d = 0; d < ndirs; ++d) {
      int j = cells.index_of(x + dirs[d].dx, y + dirs[d].dy);
      if (j < 0) continue;  // facets against the exterior are handled below
      long long w = edge_weight(x, y, d);
      int fi = g.free_id[i], fj = g.free_id[static_cast<size_t>(j)];
      if (fi >= 0 && fj >= 0) {
        g.edges.push_back({fi, fj, w});
      } else if (fi >= 0) {
        (g.ring_label[static_cast<size_t>(j)] ? g.cap_s : g.cap_t)[fi] += w;
      } else if (fj >= 0) {
        (g.ring_label[i] ? g.cap_s : g.cap_t)[fj] += w;
      } else if (g.ring_label[i] != g.ring_label[static_cast<size_t>(j)]) {
        g.ring_const += w;
      }
    }
    // Facets between a boundary cell and the datum-labeled exterior: fixed
    // cost whenever the datum jumps across them. Counting these (instead of
    // dropping the edges) is what makes the lifted process exactly
    // subadditive under partitions: seam facets are then paid once by each
    // piece but only once by the whole interval.
    if (cells.ring[i]) {
      bool mine = label_of(cells.cells[i]);
      for (int d = 0; d < ndirs; ++d) {
        for (int sgn : {1, -1}) {
          long long nx = x + sgn * dirs[d].dx, ny = y + sgn * dirs[d].dy;
          if (cells.index_of(nx, ny) >= 0) continue;
          bool outside = label_of(std::array<long long, 2>{nx, ny});
          if (outside != mine) {
            // the edge's base cell is the one the direction points away from
            long long bx = (sgn == 1) ? x : nx;
            long long by = (sgn == 1) ? y : ny;
            g.ring_const += edge_weight(bx, by, d);
          }
        }
      }
    }
  }
  return g;
}

// Dinic max-flow on integer capacities; deterministic for a fixed arc order.
class MaxFlow {
 public:
  explicit MaxFlow(int n) : head_(n, -1), level_(n), it_(n) {}

  void add_edge(int u, int v, long long cap, long long cap_rev) {
    arcs_.push_back({v, head_[u], cap});
    head_[u] = static_cast<int>(arcs_.size()) - 1;
    arcs_.push_back({u, head_[v], cap_rev});
    head_[v] = static_cast<int>(arcs_.size()) - 1;
  }

  long long run(int s, int t, int* augmentations) {
    long long flow = 0;
    while (bfs(s, t)) {
      it_ = head_;
      long long f;
      while ((f = dfs(s, t, INT64_MAX)) > 0) {
        flow += f;
        if (augmentations) ++*augmentations;
      }
    }
    return flow;
  }

  std::vector<uint8_t> source_side(int s) const {
    std::vector<uint8_t> seen(level_.size(), 0);
    std::vector<int> stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int e = head_[u]; e >= 0; e = arcs_[e].next)
        if (arcs_[e].cap > 0 && !seen[arcs_[e].to]) {
          seen[arcs_[e].to] = 1;
          stack.push_back(arcs_[e].to);
        }
    }
    return seen;
  }

 private:
  struct Arc {
    int to, next;
    long long cap;
  };

  bool bfs(int s, int t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<int> q;
    q.push(s);
    level_[s] = 0;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int e = head_[u]; e >= 0; e = arcs_[e].next)
        if (arcs_[e].cap > 0 && level_[arcs_[e].to] < 0) {
          level_[arcs_[e].to] = level_[u] + 1;
          q.push(arcs_[e].to);
        }
    }
    return level_[t] >= 0;
  }

  long long dfs(int u, int t, long long pushed) {
    if (u == t) return pushed;
    for (int& e = it_[u]; e >= 0; e = arcs_[e].next) {
      Arc& a = arcs_[e];
      if (a.cap > 0 && level_[a.to] == level_[u] + 1) {
        long long f = dfs(a.to, t, std::min(pushed, a.cap));
        if (f > 0) {
          a.cap -= f;
          arcs_[e ^ 1].cap += f;
          return f;
        }
      }
    }
    return 0;
  }

  std::vector<Arc> arcs_;
  std::vector<int> head_, level_, it_;
};

}  // namespace

CutGraph assemble_cut_graph(const SurfaceIntegrand& g, const JumpDatum& datum, const CellSet& cells,
                            const CutOptions& opt) {
  EdgeWeightFn w = [&](const VecD& mid, const VecD& nu_edge) { return g.eval(mid, datum.zeta, nu_edge); };
  auto label = [&](const std::array<long long, 2>& z) {
    VecD center{static_cast<double>(z[0]) + 0.5, static_cast<double>(z[1]) + 0.5};
    double dot = 0;
    for (int i = 0; i < 2; ++i) dot += (center[i] - datum.x[i]) * datum.nu[i];
    return dot >= 0.0;
  };
  return assemble_impl(w, label, cells, opt);
}

CutGraph assemble_cut_graph_exact(const SurfaceIntegrand& g, const VecD& zeta, const ExactHalfSpace& side,
                                  const CellSet& cells, const CutOptions& opt) {
  EdgeWeightFn w = [&](const VecD& mid, const VecD& nu_edge) { return g.eval(mid, zeta, nu_edge); };
  auto label = [&](const std::array<long long, 2>& z) { return side.upper_side({z[0], z[1]}); };
  return assemble_impl(w, label, cells, opt);
}

CutGraph assemble_custom_graph(const EdgeWeightFn& weight, const ExactHalfSpace& side, const CellSet& cells,
                               const CutOptions& opt) {
  auto label = [&](const std::array<long long, 2>& z) { return side.upper_side({z[0], z[1]}); };
  return assemble_impl(weight, label, cells, opt);
}

SurfaceCellResult solve_min_cut(const CutGraph& graph) {
  SurfaceCellResult res;
  int s = graph.n_free, t = graph.n_free + 1;
  MaxFlow mf(graph.n_free + 2);
  for (const auto& e : graph.edges) mf.add_edge(e.a, e.b, e.w, e.w);
  for (int v = 0; v < graph.n_free; ++v) {
    if (graph.cap_s[v] > 0) mf.add_edge(s, v, graph.cap_s[v], 0);
    if (graph.cap_t[v] > 0) mf.add_edge(v, t, graph.cap_t[v], 0);
  }
  res.max_flow_scaled = mf.run(s, t, &res.augmentations);
  res.value_scaled = res.max_flow_scaled + graph.ring_const;
  res.value = static_cast<double>(res.value_scaled) / graph.scale;

  auto reach = mf.source_side(s);
  res.labels.assign(graph.cells.size(), 0);
  for (size_t i = 0; i < graph.cells.size(); ++i) {
    int f = graph.free_id[i];
    res.labels[i] = (f >= 0) ? reach[f] : graph.ring_label[i];
  }
  return res;
}

double labeling_cost(const CutGraph& graph, const std::vector<uint8_t>& free_labels) {
  if (static_cast<int>(free_labels.size()) != graph.n_free)
    throw std::invalid_argument("labeling_cost: label count mismatch");
  long long total = graph.ring_const;
  for (const auto& e : graph.edges)
    if (free_labels[e.a] != free_labels[e.b]) total += e.w;
  for (int v = 0; v < graph.n_free; ++v) total += free_labels[v] ? graph.cap_t[v] : graph.cap_s[v];
  return static_cast<double>(total) / graph.scale;
}

double brute_force_min(const CutGraph& graph) {
  if (graph.n_free > 20) throw std::invalid_argument("brute_force_min: too many free cells");
  long long best = INT64_MAX;
  uint32_t count = 1u << graph.n_free;
  for (uint32_t mask = 0; mask < count; ++mask) {
    long long total = graph.ring_const;
    for (int v = 0; v < graph.n_free; ++v) total += (mask >> v & 1) ? graph.cap_t[v] : graph.cap_s[v];
    for (const auto& e : graph.edges)
      if (((mask >> e.a) & 1) != ((mask >> e.b) & 1)) total += e.w;
    best = std::min(best, total);
  }
  return static_cast<double>(best) / graph.scale;
}

SurfaceCellResult surface_cell_value(const SurfaceIntegrand& g, const VecD& zeta, const Frame& frame,
                                     const RVec& center, const Rational& t, const CutOptions& opt) {
  if (t < Rational(4)) throw std::invalid_argument("surface cell: cube side must be >= 4");
  OrientedCube cube = make_cube(frame, center, t);
  CellSet cells = rasterize(cube.region(), opt.ring_width);
  if (cells.size() == 0) throw std::invalid_argument("surface cell: empty rasterization");
  ExactHalfSpace side(frame.nu, center);
  CutGraph graph = assemble_cut_graph_exact(g, zeta, side, cells, opt);
  SurfaceCellResult res = solve_min_cut(graph);
  res.normalized = res.value / t.to_double();
  return res;
}

double calibrate_metrication(const CutOptions& opt, const RationalDirection& nu, long long strip_length,
                             long long m_cap) {
  if (strip_length < 16) throw std::invalid_argument("calibrate: strip_length must be >= 16");
  Frame frame = make_frame(nu, m_cap);

  // Commensurate length: a multiple of 2M so that the strip ends at scale L
  // and 2L are lattice translates of each other and endpoint costs cancel in
  // the difference quotient.
  long long L = strip_length;
  long long q = 2 * frame.M;
  L = ((L + q - 1) / q) * q;
  const Rational width(12);

  CoefficientField unit(MediumSpec::constant(1.0), 0, 2);
  SurfaceIntegrand g = make_surface_integrand(unit, SurfaceFamily::Perimeter);
  VecD zeta{1.0};

  auto strip_cut = [&](const Frame& fr, long long len) {
    RVec half{Rational(len, 2), width / Rational(2)};
    LatticeRegion region = oriented_box_region(fr, RVec(2, Rational(0)), half);
    CellSet cells = rasterize(region, opt.ring_width);
    ExactHalfSpace side(fr.nu, RVec(2, Rational(0)));
    CutGraph graph = assemble_cut_graph_exact(g, zeta, side, cells, opt);
    return solve_min_cut(graph).value;
  };

  double tilted = strip_cut(frame, 2 * L) - strip_cut(frame, L);
  Frame axis = make_frame(RationalDirection({0, 1}, 1));
  double reference = strip_cut(axis, 2 * L) - strip_cut(axis, L);
  return tilted / reference;
}

}  // namespace cellhom
