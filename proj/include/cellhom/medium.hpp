#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cellhom/geometry.hpp"

namespace cellhom {

enum class MediumKind { Constant, IidCells, Laminate, Mixture };

// Parameters of one generator family. Mixture holds two sub-specs; a single
// coin drawn from the seed selects the sub-medium globally, which makes the
// field stationary but not ergodic when the sub-media differ.
struct MediumSpec {
  MediumKind kind = MediumKind::Constant;
  double value = 1.0;                 // constant
  std::vector<double> values;        // iid_cells {alpha, beta}; laminate stripes
  double prob = 0.5;                 // iid_cells: P(alpha)
  int axis = 0;                      // laminate
  long long period = 1;              // laminate
  std::shared_ptr<MediumSpec> sub_a, sub_b;  // mixture
  double coin_prob = 0.5;            // mixture: P(sub_a)

  static MediumSpec constant(double v);
  static MediumSpec iid_cells(double alpha, double beta, double p_alpha);
  static MediumSpec laminate(int axis, long long period, std::vector<double> stripe_values);
  static MediumSpec mixture(MediumSpec a, MediumSpec b, double coin);

  void validate() const;
  // Smallest and largest value the family can produce (used to derive the
  // integrand class constants).
  std::pair<double, double> value_range() const;
  std::string str() const;
};

// SplitMix64-style finalizer; the per-cell value is a pure function of
// (seed, kind, params, z + offset), so a shift is an exact index shift.
uint64_t mix64(uint64_t x);
uint64_t cell_hash(uint64_t seed, const LatticePoint& z);
double hash_u01(uint64_t h);

class CoefficientField {
 public:
  CoefficientField() : CoefficientField(MediumSpec::constant(1.0), 0, 2) {}
  CoefficientField(MediumSpec spec, uint64_t seed, int dim = 2);

  double at(const LatticePoint& z) const;
  // Convenience: coefficient at the unit cell containing a continuum point.
  double at_point(const VecD& x) const;
  CoefficientField shifted(const LatticePoint& z) const;

  const MediumSpec& spec() const { return spec_; }
  uint64_t seed() const { return seed_; }
  int dim() const { return dim_; }
  const LatticePoint& offset() const { return offset_; }

 private:
  double eval_spec(const MediumSpec& s, uint64_t seed, const LatticePoint& z) const;

  MediumSpec spec_;
  uint64_t seed_;
  int dim_;
  LatticePoint offset_;
};

CoefficientField sample_medium(const MediumSpec& kind, uint64_t seed, int dim = 2);

}  // namespace cellhom
