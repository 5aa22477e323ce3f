#include "cellhom/integrand.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace cellhom {

double Mat::frobenius() const {
  double s = 0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

Mat Mat::row(const VecD& v) {
  Mat m(1, static_cast<int>(v.size()));
  m.a = v;
  return m;
}

double norm2(const VecD& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double VolumeIntegrand::eval(const VecD& x, const Mat& xi) const {
  double a = field.at_point(x);
  return a * std::pow(xi.frobenius(), p);
}

VolumeIntegrand make_volume_integrand(CoefficientField field, double p) {
  if (!(p > 1.0)) throw std::invalid_argument("volume integrand: p must exceed 1");
  auto [lo, hi] = field.spec().value_range();
  if (!(lo > 0.0)) throw std::invalid_argument("volume integrand: coefficient values must be positive");
  return VolumeIntegrand{std::move(field), p, lo, hi};
}

double SurfaceIntegrand::eval(const VecD& x, const VecD& zeta, const VecD& nu) const {
  double zn = norm2(zeta);
  if (zn == 0.0) throw std::invalid_argument("surface integrand: zeta must be nonzero");
  double nn = norm2(nu);
  if (std::abs(nn - 1.0) > 1e-12) throw std::invalid_argument("surface integrand: nu must be a unit vector");
  double c = field.at_point(x);
  switch (family) {
    case SurfaceFamily::Perimeter:
      return c;
    case SurfaceFamily::Amplitude:
      return c * (1.0 + std::min(zn, zcap));
  }
  throw std::logic_error("unreachable surface family");
}

SurfaceIntegrand make_surface_integrand(CoefficientField field, SurfaceFamily family, double zcap) {
  auto [lo, hi] = field.spec().value_range();
  if (!(lo > 0.0)) throw std::invalid_argument("surface integrand: coefficient values must be positive");
  double c3 = (family == SurfaceFamily::Amplitude) ? 1.0 + zcap : 1.0;
  return SurfaceIntegrand{std::move(field), family, c3, lo, hi, zcap};
}

std::string AxiomReport::str() const {
  char buf[160];
  std::snprintf(buf, sizeof buf, "g3=%.3g g4=%.3g g5=%.3g g6=%.3g g7=%.3g", g3, g4, g5, g6, g7);
  return buf;
}

AxiomReport validate_surface_axioms(const SurfaceIntegrand& g, int n_samples, uint64_t rng_seed) {
  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> coord(-16.0, 16.0);
  std::uniform_real_distribution<double> zmag(0.05, 2.0 * g.zcap);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  AxiomReport rep;
  rep.g3 = rep.g4 = rep.g5 = rep.g6 = rep.g7 = -1e300;
  int dim = g.field.dim();

  auto rand_nu = [&]() {
    double th = angle(rng);
    VecD nu(dim, 0.0);
    nu[0] = std::cos(th);
    nu[1] = std::sin(th);
    return nu;
  };

  for (int s = 0; s < n_samples; ++s) {
    VecD x(dim);
    for (auto& xi : x) xi = coord(rng);
    VecD nu = rand_nu();
    double m1 = zmag(rng), m2 = zmag(rng);
    if (m1 > m2) std::swap(m1, m2);
    VecD z1{m1}, z2{m2};
    double g1 = g.eval(x, z1, nu);
    double g2 = g.eval(x, z2, nu);
    // (g3): |z1| <= |z2|  =>  g(z1) <= c3 g(z2)
    rep.g3 = std::max(rep.g3, g1 - g.c3 * g2);
    // (g4): c3|z1| <= |z2|  =>  g(z1) <= g(z2)
    if (g.c3 * m1 <= m2) rep.g4 = std::max(rep.g4, g1 - g2);
    // (g5), (g6)
    rep.g5 = std::max(rep.g5, g.c4 - g1);
    rep.g6 = std::max(rep.g6, g1 - g.c5 * (1.0 + m1));
    // (g7) checked as an exact identity
    VecD mz1{-m1}, mnu(nu);
    for (auto& v : mnu) v = -v;
    rep.g7 = std::max(rep.g7, std::abs(g1 - g.eval(x, mz1, mnu)));
  }
  return rep;
}

}  // namespace cellhom
