#include "cellhom/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cellhom {

RationalDirection::RationalDirection(std::vector<long long> numerators, long long denominator)
    : num(std::move(numerators)), den(denominator) {
  if (den <= 0) throw std::invalid_argument("direction: denominator must be positive");
  if (num.size() < 2) throw std::invalid_argument("direction: dimension must be >= 2");
  __int128 s = 0;
  for (long long v : num) s += static_cast<__int128>(v) * v;
  if (s != static_cast<__int128>(den) * den)
    throw std::invalid_argument("direction " + str() + " is not a rational unit vector");
  long long g = den;
  for (long long v : num) g = std::gcd(g, v < 0 ? -v : v);
  if (g > 1) {
    for (auto& v : num) v /= g;
    den /= g;
  }
}

VecD RationalDirection::to_double() const {
  VecD v(num.size());
  for (size_t i = 0; i < num.size(); ++i) v[i] = static_cast<double>(num[i]) / static_cast<double>(den);
  return v;
}

RationalDirection RationalDirection::negated() const {
  RationalDirection d = *this;
  for (auto& v : d.num) v = -v;
  return d;
}

bool RationalDirection::is_axis_last() const {
  for (size_t i = 0; i + 1 < num.size(); ++i)
    if (num[i] != 0) return false;
  return num.back() == den;
}

bool RationalDirection::is_canonical() const {
  for (size_t i = num.size(); i-- > 0;)
    if (num[i] != 0) return num[i] > 0;
  return false;
}

std::string RationalDirection::str() const {
  std::string s = "(";
  for (size_t i = 0; i < num.size(); ++i) s += (i ? "," : "") + std::to_string(num[i]);
  return s + ")/" + std::to_string(den);
}

RVec Frame::apply(const RVec& v) const {
  int n = dim();
  RVec out(n, Rational(0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out[i] = out[i] + R[i][j] * v[j];
  return out;
}

RVec Frame::apply_transpose(const RVec& v) const {
  int n = dim();
  RVec out(n, Rational(0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out[i] = out[i] + R[j][i] * v[j];
  return out;
}

std::vector<long long> Frame::lattice_column(int j) const {
  int n = dim();
  std::vector<long long> col(n);
  for (int i = 0; i < n; ++i) {
    Rational r = R[i][j] * Rational(M);
    if (r.den != 1) throw std::logic_error("frame: M*R not integral");
    col[i] = r.num;
  }
  return col;
}

Frame make_frame(const RationalDirection& nu, long long m_cap) {
  int n = nu.dim();
  Frame fr;
  fr.nu = nu;
  fr.R.assign(n, RVec(n, Rational(0)));

  if (nu.is_axis_last()) {
    for (int i = 0; i < n; ++i) fr.R[i][i] = Rational(1);
    fr.M = 1;
    return fr;
  }

  // w = e_n - nu; H = I - 2 w w^T / |w|^2 sends e_n to nu and is rational
  // because |w|^2 = 2 - 2 nu_n. D negates the first column to restore det +1.
  RVec w(n);
  for (int i = 0; i < n; ++i) w[i] = (i == n - 1 ? Rational(1) : Rational(0)) - nu.coord(i);
  Rational wnorm2(0);
  for (int i = 0; i < n; ++i) wnorm2 = wnorm2 + w[i] * w[i];
  Rational two_over(2);
  two_over = two_over / wnorm2;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Rational h = (i == j ? Rational(1) : Rational(0)) - two_over * w[i] * w[j];
      fr.R[i][j] = (j == 0) ? -h : h;
    }

  long long m = 1;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m = lcm_ll(m, fr.R[i][j].den);
  if (m > m_cap)
    throw std::invalid_argument("frame for " + nu.str() + ": scale " + std::to_string(m) +
                                " exceeds cap " + std::to_string(m_cap));
  fr.M = m;
  return fr;
}

LatticeRegion::LatticeRegion(RMat map, RMat inverse_map, RVec shift, RVec lo, RVec hi)
    : n_(static_cast<int>(shift.size())),
      map_(std::move(map)),
      inv_(std::move(inverse_map)),
      shift_(std::move(shift)),
      lo_(std::move(lo)),
      hi_(std::move(hi)) {
  if (n_ < 2 || n_ > 3) throw std::invalid_argument("region: dimension must be 2 or 3");
  rows_.resize(n_);
  lo_int_.resize(n_);
  hi_int_.resize(n_);
  // Canonical integer form per axis: with y = (2z+1)/2,
  //   lo <= sum_j m_ij y_j - s_i < hi
  // multiplies through by 2*L (L = lcm of all denominators in the row) into
  //   2L*lo <= sum_j (L m_ij)(2 z_j + 1) - 2L s_i < 2L*hi.
  for (int i = 0; i < n_; ++i) {
    long long L = 1;
    for (int j = 0; j < n_; ++j) L = lcm_ll(L, map_[i][j].den);
    L = lcm_ll(L, shift_gather(i).den);
    L = lcm_ll(L, lo_[i].den);
    L = lcm_ll(L, hi_[i].den);
    std::array<long long, 4> row{0, 0, 0, 0};
    for (int j = 0; j < n_; ++j) row[j] = map_[i][j].num * (L / map_[i][j].den);
    Rational s = shift_gather(i);
    row[3] = 2 * s.num * (L / s.den);  // subtracted constant on the 2L scale
    rows_[i] = row;
    lo_int_[i] = 2 * lo_[i].num * (L / lo_[i].den);
    hi_int_[i] = 2 * hi_[i].num * (L / hi_[i].den);
  }
}

// sum_j map_ij * shift_j (the constant the map subtracts on axis i)
Rational LatticeRegion::shift_gather(int i) const {
  Rational s(0);
  for (int j = 0; j < n_; ++j) s = s + map_[i][j] * shift_[j];
  return s;
}

bool LatticeRegion::contains_center(const LatticePoint& z) const {
  for (int i = 0; i < n_; ++i) {
    long long v = -rows_[i][3];
    for (int j = 0; j < n_; ++j) v += rows_[i][j] * (2 * z[j] + 1);
    if (v < lo_int_[i] || v >= hi_int_[i]) return false;
  }
  return true;
}

void LatticeRegion::cell_bounds(LatticePoint& lo, LatticePoint& hi) const {
  // Vertices of the region in physical space: shift + inv * corner.
  lo.assign(n_, 0);
  hi.assign(n_, 0);
  std::vector<double> mn(n_, 1e300), mx(n_, -1e300);
  int corners = 1 << n_;
  for (int mask = 0; mask < corners; ++mask) {
    RVec c(n_);
    for (int i = 0; i < n_; ++i) c[i] = (mask >> i & 1) ? hi_[i] : lo_[i];
    for (int i = 0; i < n_; ++i) {
      Rational y = shift_[i];
      for (int j = 0; j < n_; ++j) y = y + inv_[i][j] * c[j];
      double v = y.to_double();
      mn[i] = std::min(mn[i], v);
      mx[i] = std::max(mx[i], v);
    }
  }
  for (int i = 0; i < n_; ++i) {
    lo[i] = static_cast<long long>(std::floor(mn[i])) - 1;
    hi[i] = static_cast<long long>(std::ceil(mx[i])) + 1;
  }
}

namespace {
RMat identity_mat(int n) {
  RMat m(n, RVec(n, Rational(0)));
  for (int i = 0; i < n; ++i) m[i][i] = Rational(1);
  return m;
}

RMat transpose(const RMat& m) {
  int n = static_cast<int>(m.size());
  RMat t(n, RVec(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) t[i][j] = m[j][i];
  return t;
}
}  // namespace

LatticeRegion OrientedCube::region() const {
  int n = frame.dim();
  Rational h = side / Rational(2);
  RVec lo(n, -h), hi(n, h);
  return LatticeRegion(transpose(frame.R), frame.R, center, lo, hi);
}

OrientedCube make_cube(const Frame& frame, RVec center, Rational side) {
  if (side <= Rational(0)) throw std::invalid_argument("cube side must be positive");
  if (static_cast<int>(center.size()) != frame.dim()) throw std::invalid_argument("cube center dimension mismatch");
  return OrientedCube{std::move(center), side, frame};
}

LatticeRegion oriented_box_region(const Frame& frame, const RVec& center, const RVec& half_extent) {
  int n = frame.dim();
  RVec lo(n), hi(n);
  for (int i = 0; i < n; ++i) {
    lo[i] = -half_extent[i];
    hi[i] = half_extent[i];
  }
  return LatticeRegion(transpose(frame.R), frame.R, center, lo, hi);
}

Interval1::Interval1(Rational lo, Rational hi) : a(lo), b(hi) {
  if (!(a < b)) throw std::invalid_argument("interval: need a < b");
}

Parallelepiped lift_interval(const Interval1& base, const Frame& frame) {
  if (frame.dim() != 2) throw std::invalid_argument("lift_interval: only n=2 supported");
  Parallelepiped p{frame, base, Rational(0), {}, {}};
  p.c = (base.b - base.a) / Rational(2);

  Rational mid = (base.a + base.b) / Rational(2);
  RVec mid_pre{mid, Rational(0)};
  RVec scaled(2);
  RVec center_pre(2);
  for (int i = 0; i < 2; ++i) center_pre[i] = mid_pre[i];
  p.center = frame.apply(center_pre);
  for (auto& v : p.center) v = v * Rational(frame.M);

  // Edge vectors M R e_1 (b-a) and M R e_2 (2c).
  for (int j = 0; j < 2; ++j) {
    RVec e(2, Rational(0));
    e[j] = (j == 0) ? (base.b - base.a) : (p.c * Rational(2));
    RVec edge = frame.apply(e);
    for (auto& v : edge) v = v * Rational(frame.M);
    p.edges.push_back(edge);
  }
  return p;
}

LatticeRegion Parallelepiped::region(Rational min_half_thickness) const {
  // y in M R (A' x [-c,c))  <=>  R^T y / M in A' x [-c,c)
  int n = 2;
  RMat map = transpose(frame.R);
  for (auto& row : map)
    for (auto& v : row) v = v / Rational(frame.M);
  RMat inv = frame.R;
  for (auto& row : inv)
    for (auto& v : row) v = v * Rational(frame.M);
  Rational ceff = (c < min_half_thickness) ? min_half_thickness : c;
  RVec lo{base.a, -ceff}, hi{base.b, ceff};
  return LatticeRegion(std::move(map), std::move(inv), RVec(n, Rational(0)), std::move(lo), std::move(hi));
}

VecD jump_value(const JumpDatum& d, const VecD& y) {
  double dot = 0;
  for (size_t i = 0; i < y.size(); ++i) dot += (y[i] - d.x[i]) * d.nu[i];
  if (dot >= 0) return d.zeta;
  return VecD(d.zeta.size(), 0.0);
}

ExactHalfSpace::ExactHalfSpace(const RationalDirection& nu, const RVec& x) {
  int n = nu.dim();
  if (static_cast<int>(x.size()) != n) throw std::invalid_argument("half-space: dimension mismatch");
  // (center(z) - x) . nu >= 0 with center = (2z+1)/2:
  //   sum_i num_i (2 z_i + 1) >= 2 den (x . nu) -- scaled by lcm of x denominators.
  long long L = 1;
  for (const auto& xi : x) L = lcm_ll(L, xi.den);
  coeff_.resize(n);
  for (int i = 0; i < n; ++i) coeff_[i] = nu.num[i] * L;
  __int128 thr = 0;
  for (int i = 0; i < n; ++i) thr += static_cast<__int128>(2) * x[i].num * (L / x[i].den) * nu.num[i];
  threshold2_ = detail::checked_ll(thr, "half-space threshold");
  // Fold the +1 from 2z+1 into the threshold: sum coeff_i (2 z_i) >= threshold2_ - sum coeff_i.
  long long csum = 0;
  for (long long c : coeff_) csum += c;
  threshold2_ -= csum;
}

bool ExactHalfSpace::upper_side(const LatticePoint& z) const {
  __int128 v = 0;
  for (size_t i = 0; i < coeff_.size(); ++i) v += static_cast<__int128>(coeff_[i]) * 2 * z[i];
  return v >= threshold2_;
}

LatticePoint lattice_tangent_shift(const Frame& frame, const std::vector<long long>& zprime) {
  int n = frame.dim();
  if (static_cast<int>(zprime.size()) != n - 1)
    throw std::invalid_argument("tangent shift: expected n-1 integer components");
  LatticePoint out(n, 0);
  for (int j = 0; j < n - 1; ++j) {
    auto col = frame.lattice_column(j);
    for (int i = 0; i < n; ++i) out[i] += col[i] * zprime[j];
  }
  return out;
}

}  // namespace cellhom
