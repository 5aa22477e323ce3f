#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "cellhom/rational.hpp"

namespace cellhom {

using LatticePoint = std::vector<long long>;
using VecD = std::vector<double>;

// Unit direction with exactly rational coordinates: nu_i = num_i / den,
// sum num_i^2 == den^2. Only such directions admit rational rotation frames.
struct RationalDirection {
  std::vector<long long> num;
  long long den = 1;

  RationalDirection() = default;
  RationalDirection(std::vector<long long> numerators, long long denominator);

  int dim() const { return static_cast<int>(num.size()); }
  Rational coord(int i) const { return Rational(num[i], den); }
  VecD to_double() const;
  RationalDirection negated() const;
  bool is_axis_last() const;  // equal to e_n
  // Canonical hemisphere: last nonzero coordinate positive.
  bool is_canonical() const;
  std::string str() const;
};

// Orthogonal rational matrix R with R e_n = nu, together with the minimal
// positive integer M such that M*R has integer entries.
struct Frame {
  RationalDirection nu;
  RMat R;       // n x n, exact
  long long M;  // minimal scale making M*R integral

  int dim() const { return nu.dim(); }
  RVec apply(const RVec& v) const;            // R v
  RVec apply_transpose(const RVec& v) const;  // R^T v
  std::vector<long long> lattice_column(int j) const;  // M * R e_j, integer
};

// Builds the frame by reflection: R = H D with H the reflection across the
// hyperplane orthogonal to e_n - nu and D negating the first coordinate,
// so that det R = +1 and R e_n = nu. Throws if M would exceed m_cap.
Frame make_frame(const RationalDirection& nu, long long m_cap = 1000);

// Half-open box region under an exact rational linear map:
//   y in region  <=>  lo_i <= (map (y - shift))_i < hi_i  for all i.
// Membership at lattice cell centers (z + 1/2) is evaluated in pure integer
// arithmetic so rasterization is bit-reproducible and commutes exactly with
// integer translations of the region.
class LatticeRegion {
 public:
  LatticeRegion(RMat map, RMat inverse_map, RVec shift, RVec lo, RVec hi);

  int dim() const { return n_; }
  bool contains_center(const LatticePoint& z) const;
  // Conservative integer bounds on cells whose centers may lie inside.
  void cell_bounds(LatticePoint& lo, LatticePoint& hi) const;
  const RVec& box_lo() const { return lo_; }
  const RVec& box_hi() const { return hi_; }
  const RMat& map() const { return map_; }
  const RMat& inverse_map() const { return inv_; }
  const RVec& shift() const { return shift_; }

 private:
  Rational shift_gather(int i) const;

  int n_;
  RMat map_, inv_;
  RVec shift_, lo_, hi_;
  // Integer form per axis: row_[i] . (2z+1) in [lo_int_[i], hi_int_[i])
  std::vector<std::array<long long, 4>> rows_;  // up to 3 coeffs + padding
  std::vector<long long> lo_int_, hi_int_;
};

// Axis-extent box rotated by a frame: membership |R^T(y-center)|_inf-style
// with half-open upper faces. half_extent gives side/2 per axis (a cube has
// all entries equal).
struct OrientedCube {
  RVec center;
  Rational side;
  Frame frame;

  LatticeRegion region() const;
};

OrientedCube make_cube(const Frame& frame, RVec center, Rational side);
// Rectangle variant used by the metrication calibrator (per-axis extents).
LatticeRegion oriented_box_region(const Frame& frame, const RVec& center, const RVec& half_extent);

// Half-open 1-d interval [a, b), the n=2 specialization of the (n-1)-d
// interval class the surface process is indexed by.
struct Interval1 {
  Rational a, b;
  Interval1(Rational lo, Rational hi);
  Rational length() const { return b - a; }
};

// Lifted interval M R (A' x [-c, c)), c = (b-a)/2: the n-dimensional rotated
// interval a 1-d interval induces. Exact edge-vector representation plus the
// lattice region for rasterization. Callers discretizing short intervals may
// floor the half thickness at one lattice layer (1/M in interval units) so
// that sub-unit pieces still rasterize to cells straddling the interface.
struct Parallelepiped {
  Frame frame;
  Interval1 base;
  Rational c;          // half thickness, (b-a)/2 exactly
  RVec center;         // M R (midpoint, 0)
  std::vector<RVec> edges;  // M R e_j scaled by the box extents

  LatticeRegion region(Rational min_half_thickness = Rational(0)) const;
};

Parallelepiped lift_interval(const Interval1& base, const Frame& frame);

// Two-valued jump datum: zeta on the side (y-x).nu >= 0, zero on the other.
struct JumpDatum {
  VecD x;
  VecD zeta;
  VecD nu;
};

VecD jump_value(const JumpDatum& d, const VecD& y);

// Same sign rule with exact rational threshold; evaluates at cell centers in
// integer arithmetic. Used wherever labels must be bit-reproducible.
class ExactHalfSpace {
 public:
  ExactHalfSpace(const RationalDirection& nu, const RVec& x);
  // true  <=>  (center(z) - x) . nu >= 0
  bool upper_side(const LatticePoint& z) const;

 private:
  std::vector<long long> coeff_;
  long long threshold2_;  // comparison done on 2*den*lcm scale
};

// Integer lattice vector M R (z', 0) for z' in Z^{n-1}; exactly orthogonal
// to nu. This is the shift that makes the lifted process covariant.
LatticePoint lattice_tangent_shift(const Frame& frame, const std::vector<long long>& zprime);

}  // namespace cellhom
