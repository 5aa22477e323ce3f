#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "cellhom/geometry.hpp"
#include "cellhom/integrand.hpp"

namespace cellhom {

enum class Neighborhood { N4, N8 };

// Rasterization of a region: lattice cells whose centers satisfy the
// region's exact inequalities, sorted row-major so that translated regions
// enumerate in the same relative order. The ring is the layer of member
// cells within Chebyshev distance ring_width of a non-member cell.
struct CellSet {
  std::vector<std::array<long long, 2>> cells;
  std::vector<uint8_t> ring;
  LatticePoint lo, hi;            // bounding box scanned
  std::vector<int> grid;          // dense cell index lookup, -1 = absent

  int index_of(long long x, long long y) const;
  size_t size() const { return cells.size(); }
  size_t free_count() const;
};

CellSet rasterize(const LatticeRegion& region, int ring_width = 1);

struct CutOptions {
  Neighborhood neighborhood = Neighborhood::N4;
  double lambda_axis = 1.0;
  double lambda_diag = 0.70710678118654752; // 1/sqrt(2); overall normalization measured, not assumed
  int precision_bits = 20;
  int ring_width = 1;
};

// Binary interface problem on the cell complex: one node per free cell, ring
// cells pinned to the jump datum (1 on the zeta side, 0 elsewhere), edge
// weights g at facet midpoints scaled to integers.
struct CutGraph {
  struct FreeEdge {
    int a, b;
    long long w;
  };
  int n_free = 0;
  std::vector<long long> cap_s, cap_t;  // accumulated terminal weights per free cell
  std::vector<FreeEdge> edges;
  long long ring_const = 0;  // opposite-label ring pairs, paid by every cut
  double scale = 1 << 20;
  CellSet cells;
  std::vector<int> free_id;        // per member cell, -1 for ring
  std::vector<uint8_t> ring_label; // per member cell (valid on ring)
};

using EdgeWeightFn = std::function<double(const VecD& midpoint, const VecD& nu_edge)>;

CutGraph assemble_cut_graph(const SurfaceIntegrand& g, const JumpDatum& datum, const CellSet& cells,
                            const CutOptions& opt);
// Exact-label variant: datum side decided in integer arithmetic. Used by all
// paths that participate in bit-exact identities.
CutGraph assemble_cut_graph_exact(const SurfaceIntegrand& g, const VecD& zeta, const ExactHalfSpace& side,
                                  const CellSet& cells, const CutOptions& opt);
// Explicit edge weights (oracle tests, calibration).
CutGraph assemble_custom_graph(const EdgeWeightFn& weight, const ExactHalfSpace& side, const CellSet& cells,
                               const CutOptions& opt);

struct SurfaceCellResult {
  double value = 0;          // minimum cut weight, ring constant included
  long long value_scaled = 0;
  double normalized = 0;     // value / t^{n-1} (cube) or value / M^{n-1} (lifted)
  std::vector<uint8_t> labels;  // per member cell, 1 = jump side
  long long max_flow_scaled = 0;
  int augmentations = 0;
};

// Exact minimum s-t cut by max-flow on the integer-scaled graph. Among
// minimum cuts the source-side-minimal one (residual-reachable set) is
// returned, which fixes the labeling deterministically.
SurfaceCellResult solve_min_cut(const CutGraph& graph);

// Exhaustive enumeration over the 2^k free labelings, k <= 20.
double brute_force_min(const CutGraph& graph);

// Cut cost of a prescribed free labeling (competitor evaluations).
double labeling_cost(const CutGraph& graph, const std::vector<uint8_t>& free_labels);

// Cell problem on the oriented cube Q^nu_t(center) with datum jumping across
// the hyperplane through the center. normalized = value / t^{n-1}.
SurfaceCellResult surface_cell_value(const SurfaceIntegrand& g, const VecD& zeta, const Frame& frame,
                                     const RVec& center, const Rational& t, const CutOptions& opt);

// Lattice anisotropy factor of the cut metric: incremental homogeneous-strip
// cut cost per unit interface length for datum normal nu, normalized by the
// same neighborhood's axis-direction rate. Exactly 1 for N4 and axis nu.
double calibrate_metrication(const CutOptions& opt, const RationalDirection& nu, long long strip_length = 96,
                             long long m_cap = 1000);

}  // namespace cellhom
