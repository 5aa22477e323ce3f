#include "cellhom/medium.hpp"

#include <cmath>
#include <stdexcept>

namespace cellhom {

namespace {
constexpr uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
constexpr uint64_t kCoinTag = 0xc0117055a1b2c3d4ULL;
constexpr uint64_t kSubATag = 0xa5a5a5a5deadbeefULL;
constexpr uint64_t kSubBTag = 0x5a5a5a5acafef00dULL;
constexpr long long kCoordBound = 1LL << 31;
}  // namespace

MediumSpec MediumSpec::constant(double v) {
  MediumSpec s;
  s.kind = MediumKind::Constant;
  s.value = v;
  return s;
}

MediumSpec MediumSpec::iid_cells(double alpha, double beta, double p_alpha) {
  MediumSpec s;
  s.kind = MediumKind::IidCells;
  s.values = {alpha, beta};
  s.prob = p_alpha;
  return s;
}

MediumSpec MediumSpec::laminate(int axis, long long period, std::vector<double> stripe_values) {
  MediumSpec s;
  s.kind = MediumKind::Laminate;
  s.axis = axis;
  s.period = period;
  s.values = std::move(stripe_values);
  return s;
}

MediumSpec MediumSpec::mixture(MediumSpec a, MediumSpec b, double coin) {
  MediumSpec s;
  s.kind = MediumKind::Mixture;
  s.sub_a = std::make_shared<MediumSpec>(std::move(a));
  s.sub_b = std::make_shared<MediumSpec>(std::move(b));
  s.coin_prob = coin;
  return s;
}

void MediumSpec::validate() const {
  switch (kind) {
    case MediumKind::Constant:
      break;
    case MediumKind::IidCells:
      if (values.size() != 2) throw std::invalid_argument("iid_cells needs exactly two values");
      if (!(prob >= 0.0 && prob <= 1.0)) throw std::invalid_argument("iid_cells: prob must lie in [0,1]");
      break;
    case MediumKind::Laminate:
      if (period < 1) throw std::invalid_argument("laminate: period must be >= 1");
      if (values.size() != static_cast<size_t>(period))
        throw std::invalid_argument("laminate: need one value per stripe");
      if (axis < 0) throw std::invalid_argument("laminate: axis must be >= 0");
      break;
    case MediumKind::Mixture:
      if (!sub_a || !sub_b) throw std::invalid_argument("mixture: missing sub-media");
      if (!(coin_prob >= 0.0 && coin_prob <= 1.0)) throw std::invalid_argument("mixture: coin_prob must lie in [0,1]");
      sub_a->validate();
      sub_b->validate();
      break;
  }
}

std::pair<double, double> MediumSpec::value_range() const {
  switch (kind) {
    case MediumKind::Constant:
      return {value, value};
    case MediumKind::IidCells:
      return {std::min(values[0], values[1]), std::max(values[0], values[1])};
    case MediumKind::Laminate: {
      double lo = values[0], hi = values[0];
      for (double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      return {lo, hi};
    }
    case MediumKind::Mixture: {
      auto ra = sub_a->value_range();
      auto rb = sub_b->value_range();
      return {std::min(ra.first, rb.first), std::max(ra.second, rb.second)};
    }
  }
  return {0, 0};
}

std::string MediumSpec::str() const {
  switch (kind) {
    case MediumKind::Constant:
      return "constant(" + std::to_string(value) + ")";
    case MediumKind::IidCells:
      return "iid_cells{" + std::to_string(values[0]) + "," + std::to_string(values[1]) +
             ";p=" + std::to_string(prob) + "}";
    case MediumKind::Laminate:
      return "laminate(axis=" + std::to_string(axis) + ",period=" + std::to_string(period) + ")";
    case MediumKind::Mixture:
      return "mixture(" + sub_a->str() + "," + sub_b->str() + ";p=" + std::to_string(coin_prob) + ")";
  }
  return "?";
}

uint64_t mix64(uint64_t x) {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  x ^= x >> 33;
  return x;
}

uint64_t cell_hash(uint64_t seed, const LatticePoint& z) {
  uint64_t h = mix64(seed + kGolden);
  for (long long c : z) h = mix64(h ^ (static_cast<uint64_t>(c) + kGolden));
  return h;
}

double hash_u01(uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

CoefficientField::CoefficientField(MediumSpec spec, uint64_t seed, int dim)
    : spec_(std::move(spec)), seed_(seed), dim_(dim), offset_(dim, 0) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("field: dimension must be 1..3");
  spec_.validate();
}

double CoefficientField::at(const LatticePoint& z) const {
  if (static_cast<int>(z.size()) != dim_) throw std::invalid_argument("field: query dimension mismatch");
  LatticePoint q(dim_);
  for (int i = 0; i < dim_; ++i) {
    q[i] = z[i] + offset_[i];
    if (q[i] >= kCoordBound || q[i] <= -kCoordBound)
      throw std::out_of_range("field: lattice coordinate overflow");
  }
  return eval_spec(spec_, seed_, q);
}

double CoefficientField::at_point(const VecD& x) const {
  LatticePoint z(dim_);
  for (int i = 0; i < dim_; ++i) z[i] = static_cast<long long>(std::floor(x[i]));
  return at(z);
}

double CoefficientField::eval_spec(const MediumSpec& s, uint64_t seed, const LatticePoint& z) const {
  switch (s.kind) {
    case MediumKind::Constant:
      return s.value;
    case MediumKind::IidCells: {
      double u = hash_u01(cell_hash(seed, z));
      return u < s.prob ? s.values[0] : s.values[1];
    }
    case MediumKind::Laminate: {
      long long idx = z[s.axis] % s.period;
      if (idx < 0) idx += s.period;
      return s.values[static_cast<size_t>(idx)];
    }
    case MediumKind::Mixture: {
      // One global coin per seed; independent of z, so shifts cannot change it.
      double u = hash_u01(mix64(seed ^ kCoinTag));
      if (u < s.coin_prob) return eval_spec(*s.sub_a, mix64(seed ^ kSubATag), z);
      return eval_spec(*s.sub_b, mix64(seed ^ kSubBTag), z);
    }
  }
  throw std::logic_error("unreachable medium kind");
}

CoefficientField CoefficientField::shifted(const LatticePoint& z) const {
  if (static_cast<int>(z.size()) != dim_) throw std::invalid_argument("field: shift dimension mismatch");
  CoefficientField f = *this;
  for (int i = 0; i < dim_; ++i) f.offset_[i] += z[i];
  return f;
}

CoefficientField sample_medium(const MediumSpec& kind, uint64_t seed, int dim) {
  return CoefficientField(kind, seed, dim);
}

}  // namespace cellhom
