#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "cellhom/integrand.hpp"

using namespace cellhom;

namespace {
Mat xi_of(double a, double b) {
  Mat m(1, 2);
  m.at(0, 0) = a;
  m.at(0, 1) = b;
  return m;
}
}  // namespace

TEST_CASE("volume eval: |xi|^p with unit coefficient") {
  VolumeIntegrand f = make_volume_integrand(CoefficientField(MediumSpec::constant(1.0), 0, 2), 2.0);
  CHECK(f.eval({0.3, 0.4}, xi_of(2.0, 0.0)) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(f.eval({0.3, 0.4}, xi_of(1.0, 1.0)) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("volume eval: laminate stripe lookup") {
  VolumeIntegrand f = make_volume_integrand(CoefficientField(MediumSpec::laminate(0, 2, {1.0, 4.0}), 0, 2), 2.0);
  CHECK(f.eval({0.5, 0.5}, xi_of(1.0, 0.0)) == 1.0);
  CHECK(f.eval({1.5, 0.5}, xi_of(1.0, 0.0)) == 4.0);
}

TEST_CASE("volume class constants come from the value range") {
  VolumeIntegrand f = make_volume_integrand(CoefficientField(MediumSpec::iid_cells(1.0, 4.0, 0.5), 3, 2), 2.0);
  CHECK(f.c1 == 1.0);
  CHECK(f.c2 == 4.0);
  CHECK_THROWS(make_volume_integrand(CoefficientField(MediumSpec::constant(1.0), 0, 2), 1.0));  // p > 1
  CHECK_THROWS(make_volume_integrand(CoefficientField(MediumSpec::constant(-1.0), 0, 2), 2.0));
}

TEST_CASE("volume bounds (f3)/(f4) over sampled tuples") {
  VolumeIntegrand f = make_volume_integrand(CoefficientField(MediumSpec::iid_cells(1.0, 4.0, 0.5), 9, 2), 2.0);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> coord(-20.0, 20.0), comp(-3.0, 3.0);
  for (int i = 0; i < 10000; ++i) {
    VecD x{coord(rng), coord(rng)};
    Mat xi = xi_of(comp(rng), comp(rng));
    double v = f.eval(x, xi);
    double xin = xi.frobenius();
    CHECK(v >= f.c1 * std::pow(xin, f.p) - 1e-12);
    CHECK(v <= f.c2 * (1 + std::pow(xin, f.p)) + 1e-12);
  }
}

TEST_CASE("lower bound attained with equality for the constant-c1 field") {
  VolumeIntegrand f = make_volume_integrand(CoefficientField(MediumSpec::constant(2.0), 0, 2), 3.0);
  Mat xi = xi_of(1.5, -0.5);
  CHECK(f.eval({0, 0}, xi) == doctest::Approx(f.c1 * std::pow(xi.frobenius(), 3.0)).epsilon(1e-14));
}

TEST_CASE("surface eval: perimeter family is constant in zeta") {
  SurfaceIntegrand g = make_surface_integrand(CoefficientField(MediumSpec::constant(2.0), 0, 2),
                                              SurfaceFamily::Perimeter);
  CHECK(g.eval({0.1, 0.2}, {1.0}, {0.0, 1.0}) == 2.0);
  CHECK(g.eval({0.1, 0.2}, {100.0}, {1.0, 0.0}) == 2.0);
}

TEST_CASE("surface eval: amplitude family 1+min(|zeta|,cap)") {
  SurfaceIntegrand g = make_surface_integrand(CoefficientField(MediumSpec::constant(1.0), 0, 2),
                                              SurfaceFamily::Amplitude, 8.0);
  CHECK(g.eval({0, 0}, {3.0}, {0.0, 1.0}) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(g.eval({0, 0}, {50.0}, {0.0, 1.0}) == doctest::Approx(9.0).epsilon(1e-15));  // capped
}

TEST_CASE("surface eval rejects zero jumps and non-unit normals") {
  SurfaceIntegrand g = make_surface_integrand(CoefficientField(MediumSpec::constant(1.0), 0, 2),
                                              SurfaceFamily::Perimeter);
  CHECK_THROWS_AS((void)g.eval({0, 0}, {0.0}, {0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS((void)g.eval({0, 0}, {1.0}, {0.5, 0.5}), std::invalid_argument);
}

TEST_CASE("surface bounds and symmetry over sampled tuples") {
  SurfaceIntegrand g = make_surface_integrand(CoefficientField(MediumSpec::iid_cells(1.0, 3.0, 0.5), 11, 2),
                                              SurfaceFamily::Amplitude, 8.0);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> coord(-20.0, 20.0), mag(0.01, 20.0), ang(0.0, 2 * M_PI);
  for (int i = 0; i < 10000; ++i) {
    VecD x{coord(rng), coord(rng)};
    VecD zeta{mag(rng)};
    double th = ang(rng);
    VecD nu{std::cos(th), std::sin(th)};
    double v = g.eval(x, zeta, nu);
    CHECK(v >= g.c4 - 1e-12);
    CHECK(v <= g.c5 * (1 + zeta[0]) + 1e-12);
    VecD mz{-zeta[0]}, mnu{-nu[0], -nu[1]};
    CHECK(g.eval(x, mz, mnu) == v);  // (g7) exactly
  }
}

TEST_CASE("coefficient scaling multiplies evaluations exactly") {
  double lambda = 1.75;
  uint64_t seed = 2718;
  SurfaceIntegrand g1 = make_surface_integrand(CoefficientField(MediumSpec::iid_cells(1.0, 3.0, 0.5), seed, 2),
                                               SurfaceFamily::Perimeter);
  SurfaceIntegrand g2 = make_surface_integrand(
      CoefficientField(MediumSpec::iid_cells(1.0 * lambda, 3.0 * lambda, 0.5), seed, 2), SurfaceFamily::Perimeter);
  VolumeIntegrand f1 = make_volume_integrand(CoefficientField(MediumSpec::iid_cells(1.0, 4.0, 0.5), seed, 2), 2.0);
  VolumeIntegrand f2 = make_volume_integrand(
      CoefficientField(MediumSpec::iid_cells(1.0 * lambda, 4.0 * lambda, 0.5), seed, 2), 2.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> coord(-20.0, 20.0);
  for (int i = 0; i < 200; ++i) {
    VecD x{coord(rng), coord(rng)};
    CHECK(g2.eval(x, {2.0}, {0.0, 1.0}) == lambda * g1.eval(x, {2.0}, {0.0, 1.0}));
    CHECK(f2.eval(x, xi_of(1.0, 2.0)) == lambda * f1.eval(x, xi_of(1.0, 2.0)));
  }
}

TEST_CASE("axiom validator passes the perimeter family") {
  SurfaceIntegrand g = make_surface_integrand(CoefficientField(MediumSpec::iid_cells(1.0, 3.0, 0.5), 4, 2),
                                              SurfaceFamily::Perimeter);
  AxiomReport rep = validate_surface_axioms(g, 4000, 99);
  CHECK(rep.pass(1e-12));
}

TEST_CASE("axiom validator passes the amplitude family with c3 = 1 + zcap") {
  SurfaceIntegrand g = make_surface_integrand(CoefficientField(MediumSpec::iid_cells(1.0, 3.0, 0.5), 4, 2),
                                              SurfaceFamily::Amplitude, 6.0);
  CHECK(g.c3 == 7.0);
  AxiomReport rep = validate_surface_axioms(g, 4000, 99);
  CHECK(rep.pass(1e-12));

  // Brute scan oracle over the zeta profile (1 + min(z, cap)): the (g3)
  // ratio is monotone-bounded by 1, so the declared c3 = 1 + cap is valid.
  double worst = 0;
  for (double z1 = 0.05; z1 <= 12.0; z1 += 0.05)
    for (double z2 = z1; z2 <= 12.0; z2 += 0.05)
      worst = std::max(worst, (1 + std::min(z1, 6.0)) / (1 + std::min(z2, 6.0)));
  CHECK(worst <= 1.0 + 1e-12);
  CHECK(worst <= g.c3);
}

TEST_CASE("axiom validator flags a deliberately broken declaration") {
  SurfaceIntegrand g = make_surface_integrand(CoefficientField(MediumSpec::iid_cells(1.0, 3.0, 0.5), 4, 2),
                                              SurfaceFamily::Perimeter);
  g.c5 = 2.0;  // true sup of c is 3 > declared bound
  AxiomReport rep = validate_surface_axioms(g, 4000, 99);
  CHECK(rep.g6 > 0);
  CHECK_FALSE(rep.pass(1e-12));
}
