#pragma once

#include <string>
#include <vector>

#include "cellhom/medium.hpp"

namespace cellhom {

// Dense m x n matrix, row major. Gradients of R^m-valued maps on R^n.
struct Mat {
  int rows = 0, cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(int m, int n) : rows(m), cols(n), a(static_cast<size_t>(m) * n, 0.0) {}
  double& at(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  double at(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
  double frobenius() const;
  static Mat row(const VecD& v);  // 1 x n
};

double norm2(const VecD& v);

// Volume integrand family a(floor(x)) * |xi|^p with declared class bounds
// c1 <= a <= c2, so c1|xi|^p <= f <= c2(1+|xi|^p).
struct VolumeIntegrand {
  CoefficientField field;
  double p = 2.0;
  double c1 = 0.0, c2 = 0.0;

  double eval(const VecD& x, const Mat& xi) const;
};

VolumeIntegrand make_volume_integrand(CoefficientField field, double p);

enum class SurfaceFamily { Perimeter, Amplitude };

// Surface integrand families:
//   perimeter:  g = c(floor(x))                      (independent of zeta)
//   amplitude:  g = c(floor(x)) * (1 + min(|zeta|, zcap))
// Both depend on zeta only through |zeta|, so the (g7) symmetry holds
// identically. Declared constants may be overridden to build negative
// controls for the axiom validator.
struct SurfaceIntegrand {
  CoefficientField field;
  SurfaceFamily family = SurfaceFamily::Perimeter;
  double c3 = 1.0, c4 = 0.0, c5 = 0.0;
  double zcap = 8.0;

  double eval(const VecD& x, const VecD& zeta, const VecD& nu) const;
};

SurfaceIntegrand make_surface_integrand(CoefficientField field, SurfaceFamily family, double zcap = 8.0);

struct AxiomReport {
  // Worst sampled violation margin per axiom; <= 0 means satisfied.
  double g3 = 0, g4 = 0, g5 = 0, g6 = 0, g7 = 0;
  bool pass(double tol = 0.0) const {
    return g3 <= tol && g4 <= tol && g5 <= tol && g6 <= tol && g7 <= tol;
  }
  std::string str() const;
};

AxiomReport validate_surface_axioms(const SurfaceIntegrand& g, int n_samples, uint64_t rng_seed);

}  // namespace cellhom
