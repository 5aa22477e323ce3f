#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "cellhom/surface_cell.hpp"

using namespace cellhom;

namespace {

Frame axis_frame() { return make_frame(RationalDirection({0, 1}, 1)); }

CellSet cube_cells(long long side, const Frame& fr) {
  OrientedCube cube = make_cube(fr, RVec(2, Rational(0)), Rational(side));
  return rasterize(cube.region(), 1);
}

SurfaceIntegrand constant_g(double c) {
  return make_surface_integrand(CoefficientField(MediumSpec::constant(c), 0, 2), SurfaceFamily::Perimeter);
}

SurfaceIntegrand medium_g(MediumSpec spec, uint64_t seed, SurfaceFamily fam = SurfaceFamily::Perimeter,
                          double zcap = 8.0) {
  return make_surface_integrand(CoefficientField(std::move(spec), seed, 2), fam, zcap);
}

CutGraph graph_on_cube(const SurfaceIntegrand& g, const VecD& zeta, long long side, const CutOptions& opt,
                       const Frame& fr) {
  CellSet cells = cube_cells(side, fr);
  ExactHalfSpace hs(fr.nu, RVec(2, Rational(0)));
  return assemble_cut_graph_exact(g, zeta, hs, cells, opt);
}

}  // namespace

TEST_CASE("rasterized 4x4 square splits into a 12-cell ring and 4 free cells") {
  CellSet cells = cube_cells(4, axis_frame());
  CHECK(cells.size() == 16);
  int ring = 0;
  for (auto r : cells.ring) ring += r;
  CHECK(ring == 12);
  CHECK(cells.free_count() == 4);
}

TEST_CASE("terminal labels split by the sign rule") {
  CutOptions opt;
  CutGraph g = graph_on_cube(constant_g(1.0), {1.0}, 4, opt, axis_frame());
  int ones = 0, zeros = 0;
  for (size_t i = 0; i < g.cells.size(); ++i) {
    if (!g.cells.ring[i]) continue;
    (g.ring_label[i] ? ones : zeros)++;
  }
  CHECK(ones == 6);
  CHECK(zeros == 6);
}

TEST_CASE("constant coefficients give constant axis edge weights") {
  CutOptions opt;
  CutGraph g = graph_on_cube(constant_g(2.0), {1.0}, 4, opt, axis_frame());
  long long expected = 2 * (1 << opt.precision_bits);
  for (const auto& e : g.edges) CHECK(e.w == expected);
  for (int v = 0; v < g.n_free; ++v) {
    CHECK(g.cap_s[v] % expected == 0);
    CHECK(g.cap_t[v] % expected == 0);
  }
}

TEST_CASE("assembling with flipped jump data swaps terminals, weights unchanged") {
  CutOptions opt;
  SurfaceIntegrand g = medium_g(MediumSpec::iid_cells(1.0, 3.0, 0.5), 7, SurfaceFamily::Amplitude, 6.0);
  Frame fr = make_frame(RationalDirection({3, 4}, 5));
  CellSet cells = cube_cells(8, fr);
  ExactHalfSpace up(fr.nu, RVec(2, Rational(0)));
  ExactHalfSpace down(fr.nu.negated(), RVec(2, Rational(0)));
  CutGraph a = assemble_cut_graph_exact(g, {1.5}, up, cells, opt);
  CutGraph b = assemble_cut_graph_exact(g, {-1.5}, down, cells, opt);
  REQUIRE(a.edges.size() == b.edges.size());
  for (size_t i = 0; i < a.edges.size(); ++i) {
    CHECK(a.edges[i].a == b.edges[i].a);
    CHECK(a.edges[i].b == b.edges[i].b);
    CHECK(a.edges[i].w == b.edges[i].w);
  }
  CHECK(a.cap_s == b.cap_t);
  CHECK(a.cap_t == b.cap_s);
  CHECK(a.ring_const == b.ring_const);
}

TEST_CASE("flat cut through a constant medium: value = c * t exactly") {
  CutOptions opt;
  for (long long t : {8, 32}) {
    SurfaceCellResult r = surface_cell_value(constant_g(1.0), {1.0}, axis_frame(), RVec(2, Rational(0)),
                                             Rational(t), opt);
    CHECK(r.value == static_cast<double>(t));
    CHECK(r.normalized == 1.0);
  }
}

TEST_CASE("degenerate problems: one free cell and all-ring regions") {
  CutOptions opt;
  // side-3 cube: 3x3 raster, single free cell in the middle
  CellSet cells3 = cube_cells(3, axis_frame());
  CHECK(cells3.free_count() == 1);
  ExactHalfSpace hs(RationalDirection({0, 1}, 1), RVec(2, Rational(0)));
  CutGraph g3 = assemble_cut_graph_exact(constant_g(2.0), {1.0}, hs, cells3, opt);
  CHECK(solve_min_cut(g3).value == brute_force_min(g3));
  CHECK(solve_min_cut(g3).value == 6.0);  // flat cut severs 3 columns of weight 2

  // a 2-cell-thick lifted region has no free cells: value = ring constant
  Frame fr = axis_frame();
  Parallelepiped p = lift_interval(Interval1(Rational(0), Rational(2)), fr);
  CellSet thin = rasterize(p.region(), 1);
  CHECK(thin.free_count() == 0);
  CutGraph gt = assemble_cut_graph_exact(constant_g(2.0), {1.0}, hs, thin, opt);
  CHECK(gt.n_free == 0);
  CHECK(solve_min_cut(gt).value == brute_force_min(gt));
  CHECK(solve_min_cut(gt).value == gt.ring_const / gt.scale);
}

TEST_CASE("exactness: solver equals brute force on random small instances") {
  std::mt19937_64 rng(2027);
  for (int trial = 0; trial < 120; ++trial) {
    CutOptions opt;
    opt.neighborhood = (trial % 2) ? Neighborhood::N8 : Neighborhood::N4;
    Frame fr = (trial % 3 == 0) ? make_frame(RationalDirection({3, 4}, 5)) : axis_frame();
    CellSet cells = cube_cells(6, fr);
    REQUIRE(cells.free_count() <= 16);
    ExactHalfSpace hs(fr.nu, RVec(2, Rational(0)));

    CutGraph graph;
    if (trial % 4 == 0) {
      uint64_t wseed = rng();
      EdgeWeightFn weights = [wseed](const VecD& mid, const VecD&) {
        LatticePoint key{static_cast<long long>(std::llround(2 * mid[0])),
                         static_cast<long long>(std::llround(2 * mid[1]))};
        return 1.0 + static_cast<double>(cell_hash(wseed, key) % 5);
      };
      graph = assemble_custom_graph(weights, hs, cells, opt);
    } else {
      SurfaceIntegrand g = medium_g(MediumSpec::iid_cells(1.0, 3.0, 0.5), rng(),
                                    (trial % 5 == 0) ? SurfaceFamily::Amplitude : SurfaceFamily::Perimeter);
      graph = assemble_cut_graph_exact(g, {1.0 + (trial % 7) * 0.5}, hs, cells, opt);
    }
    double solver = solve_min_cut(graph).value;
    double oracle = brute_force_min(graph);
    CHECK(solver == oracle);
  }
}

TEST_CASE("brute force rejects oversized instances") {
  CutOptions opt;
  CutGraph g = graph_on_cube(constant_g(1.0), {1.0}, 16, opt, axis_frame());
  CHECK(g.n_free > 20);
  CHECK_THROWS(brute_force_min(g));
}

TEST_CASE("value scales exactly under dyadic coefficient scaling") {
  CutOptions opt;
  uint64_t seed = 99;
  SurfaceIntegrand g1 = medium_g(MediumSpec::iid_cells(1.0, 3.0, 0.5), seed);
  SurfaceIntegrand g2 = medium_g(MediumSpec::iid_cells(2.0, 6.0, 0.5), seed);
  Frame fr = axis_frame();
  double v1 = 0, v2 = 0;
  v1 = solve_min_cut(graph_on_cube(g1, {1.0}, 12, opt, fr)).value;
  v2 = solve_min_cut(graph_on_cube(g2, {1.0}, 12, opt, fr)).value;
  CHECK(std::abs(v2 - 2.0 * v1) <= 1e-12);

  // generic scaling is exact up to integer rounding of the weights
  SurfaceIntegrand g3 = medium_g(MediumSpec::iid_cells(1.7, 5.1, 0.5), seed);
  double v3 = solve_min_cut(graph_on_cube(g3, {1.0}, 12, opt, fr)).value;
  CHECK(v3 == doctest::Approx(1.7 * v1).epsilon(1e-5));
}

TEST_CASE("increasing any single edge weight never decreases the cut value") {
  CutOptions opt;
  SurfaceIntegrand g = medium_g(MediumSpec::iid_cells(1.0, 3.0, 0.5), 1234);
  CutGraph graph = graph_on_cube(g, {1.0}, 8, opt, axis_frame());
  double base = solve_min_cut(graph).value;
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    CutGraph bumped = graph;
    size_t which = rng() % bumped.edges.size();
    bumped.edges[which].w += 1 + static_cast<long long>(rng() % (1 << 18));
    CHECK(solve_min_cut(bumped).value >= base - 1e-15);
  }
}

TEST_CASE("cut value bounded by unit-coefficient cuts scaled by c4 and c5") {
  CutOptions opt;
  SurfaceIntegrand g = medium_g(MediumSpec::iid_cells(1.0, 3.0, 0.5), 5150, SurfaceFamily::Amplitude, 4.0);
  VecD zeta{2.0};
  Frame fr = axis_frame();
  CellSet cells = cube_cells(10, fr);
  ExactHalfSpace hs(fr.nu, RVec(2, Rational(0)));
  CutGraph graph = assemble_cut_graph_exact(g, zeta, hs, cells, opt);
  EdgeWeightFn unit = [](const VecD&, const VecD&) { return 1.0; };
  CutGraph unit_graph = assemble_custom_graph(unit, hs, cells, opt);
  double value = solve_min_cut(graph).value;
  double u = solve_min_cut(unit_graph).value;
  CHECK(value >= g.c4 * u * (1 - 1e-9));
  CHECK(value <= g.c5 * (1 + norm2(zeta)) * u * (1 + 1e-9));
}

TEST_CASE("datum labeling is an admissible competitor") {
  CutOptions opt;
  SurfaceIntegrand g = medium_g(MediumSpec::iid_cells(1.0, 3.0, 0.5), 31, SurfaceFamily::Perimeter);
  Frame fr = make_frame(RationalDirection({3, 4}, 5));
  CellSet cells = cube_cells(10, fr);
  ExactHalfSpace hs(fr.nu, RVec(2, Rational(0)));
  CutGraph graph = assemble_cut_graph_exact(g, {1.0}, hs, cells, opt);
  std::vector<uint8_t> datum(graph.n_free);
  for (size_t i = 0; i < cells.size(); ++i)
    if (graph.free_id[i] >= 0)
      datum[graph.free_id[i]] = hs.upper_side({cells.cells[i][0], cells.cells[i][1]}) ? 1 : 0;
  CHECK(solve_min_cut(graph).value <= labeling_cost(graph, datum) + 1e-15);
}

TEST_CASE("two labels suffice for jump-independent energies: 3-label enumeration") {
  // Merging the third phase into either side never increases a perimeter
  // energy, so the binary minimum matches the 3-label minimum.
  std::mt19937_64 rng(606);
  for (int trial = 0; trial < 10; ++trial) {
    CutOptions opt;
    SurfaceIntegrand g = medium_g(MediumSpec::iid_cells(1.0, 3.0, 0.5), rng());
    CellSet cells = cube_cells(5, axis_frame());
    REQUIRE(cells.free_count() == 9);
    ExactHalfSpace hs(RationalDirection({0, 1}, 1), RVec(2, Rational(0)));
    CutGraph graph = assemble_cut_graph_exact(g, {1.0}, hs, cells, opt);

    long long best3 = INT64_MAX;
    long long pow3 = 1;
    for (int i = 0; i < 9; ++i) pow3 *= 3;
    std::vector<int> lab(9);
    for (long long code = 0; code < pow3; ++code) {
      long long c = code;
      for (int i = 0; i < 9; ++i) {
        lab[i] = static_cast<int>(c % 3);
        c /= 3;
      }
      long long total = graph.ring_const;
      for (const auto& e : graph.edges)
        if (lab[e.a] != lab[e.b]) total += e.w;
      // ring labels are 0/1; any differing pair is an interface of equal cost
      for (int v = 0; v < graph.n_free; ++v) {
        if (lab[v] != 1) total += graph.cap_s[v];
        if (lab[v] != 0) total += graph.cap_t[v];
      }
      best3 = std::min(best3, total);
    }
    double binary = solve_min_cut(graph).value;
    CHECK(binary == static_cast<double>(best3) / graph.scale);
  }
}

TEST_CASE("floating-datum assembly matches the exact path on rational directions") {
  CutOptions opt;
  SurfaceIntegrand g = medium_g(MediumSpec::iid_cells(1.0, 3.0, 0.5), 404);
  Frame fr = make_frame(RationalDirection({3, 4}, 5));
  CellSet cells = cube_cells(8, fr);
  ExactHalfSpace hs(fr.nu, RVec(2, Rational(0)));
  CutGraph exact = assemble_cut_graph_exact(g, {1.0}, hs, cells, opt);
  JumpDatum datum{{0.0, 0.0}, {1.0}, {0.6, 0.8}};
  CutGraph approx = assemble_cut_graph(g, datum, cells, opt);
  CHECK(solve_min_cut(exact).value_scaled == solve_min_cut(approx).value_scaled);

  // irrational datum direction: floating evaluation only
  JumpDatum diag{{0.0, 0.0}, {1.0}, {std::sqrt(0.5), std::sqrt(0.5)}};
  CellSet axis_cells = cube_cells(6, axis_frame());
  CutGraph irr = assemble_cut_graph(g, diag, axis_cells, opt);
  SurfaceCellResult r = solve_min_cut(irr);
  CHECK(r.value == brute_force_min(irr));
  CHECK(r.value > 0);
}

TEST_CASE("cut value symmetric under jump reversal, bit-exactly") {
  CutOptions opt;
  for (uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    SurfaceIntegrand g = medium_g(MediumSpec::iid_cells(1.0, 3.0, 0.5), seed, SurfaceFamily::Amplitude, 6.0);
    Frame fr = make_frame(RationalDirection({3, 4}, 5));
    CellSet cells = cube_cells(8, fr);
    ExactHalfSpace up(fr.nu, RVec(2, Rational(0)));
    ExactHalfSpace down(fr.nu.negated(), RVec(2, Rational(0)));
    long long a = solve_min_cut(assemble_cut_graph_exact(g, {1.5}, up, cells, opt)).value_scaled;
    long long b = solve_min_cut(assemble_cut_graph_exact(g, {-1.5}, down, cells, opt)).value_scaled;
    CHECK(a == b);
  }
}

TEST_CASE("laminate interface migrates to the cheap stripe (brute-checked at t=6)") {
  CutOptions opt;
  // stripe at the datum line costs 3, the neighboring stripe costs 1
  SurfaceIntegrand g = medium_g(MediumSpec::laminate(0, 2, {3.0, 1.0}), 0);
  Frame fr = make_frame(RationalDirection({1, 0}, 1));  // vertical interface
  CellSet cells = cube_cells(6, fr);
  REQUIRE(cells.free_count() <= 16);
  ExactHalfSpace hs(fr.nu, RVec(2, Rational(0)));
  CutGraph graph = assemble_cut_graph_exact(g, {1.0}, hs, cells, opt);
  SurfaceCellResult r = solve_min_cut(graph);
  CHECK(r.value == brute_force_min(graph));

  std::vector<uint8_t> datum(graph.n_free);
  for (size_t i = 0; i < cells.size(); ++i)
    if (graph.free_id[i] >= 0)
      datum[graph.free_id[i]] = hs.upper_side({cells.cells[i][0], cells.cells[i][1]}) ? 1 : 0;
  CHECK(r.value < labeling_cost(graph, datum));  // strictly beats the flat interface
}

TEST_CASE("surface laminate duality at moderate size") {
  CutOptions opt;
  SurfaceIntegrand g = medium_g(MediumSpec::laminate(0, 2, {1.0, 3.0}), 0);
  // interface along the cheap stripe: normal e_1
  SurfaceCellResult along =
      surface_cell_value(g, {1.0}, make_frame(RationalDirection({1, 0}, 1)), RVec(2, Rational(0)), Rational(32), opt);
  CHECK(along.normalized == doctest::Approx(1.0).epsilon(0.05));
  // transversal interface: flat cut pays the stripe average exactly
  SurfaceCellResult across =
      surface_cell_value(g, {1.0}, axis_frame(), RVec(2, Rational(0)), Rational(32), opt);
  CHECK(across.normalized == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("metrication: axis directions are exact, tilted N4 pays the l1 length") {
  CutOptions n4;
  CHECK(calibrate_metrication(n4, RationalDirection({1, 0}, 1), 32) == 1.0);
  CHECK(calibrate_metrication(n4, RationalDirection({0, 1}, 1), 32) == 1.0);
  double k4 = calibrate_metrication(n4, RationalDirection({3, 4}, 5), 64);
  CHECK(k4 == doctest::Approx(1.4).epsilon(0.01));

  CutOptions n8;
  n8.neighborhood = Neighborhood::N8;
  double k8 = calibrate_metrication(n8, RationalDirection({3, 4}, 5), 64);
  CHECK(k8 < k4);
  CHECK(k8 > 0.9);
  CHECK(k8 < 1.2);
}

TEST_CASE("calibration rejects too-short strips") {
  CutOptions opt;
  CHECK_THROWS(calibrate_metrication(opt, RationalDirection({3, 4}, 5), 8));
}

TEST_CASE("surface cell rejects tiny cubes") {
  CutOptions opt;
  CHECK_THROWS(surface_cell_value(constant_g(1.0), {1.0}, axis_frame(), RVec(2, Rational(0)), Rational(2), opt));
}
