#pragma once

#include <cstdint>
#include <vector>

#include "cellhom/integrand.hpp"

namespace cellhom {

// Finite-difference discretization of the volume cell problem on an
// axis-aligned cube of side t, spacing h (t/h integer): per-cell energy
// f(x_cell, G) h^n with the forward-difference gradient
//   G(:,i) = (u(z + h e_i) - u(z)) / h
// sampled from the cell's lower-corner node, coefficient at the lower
// corner. The outermost node layer is pinned to the affine datum xi*y.
struct DiscreteVolumeProblem {
  VolumeIntegrand f;
  Mat xi;            // m x n boundary gradient
  VecD center;       // cube center
  double t = 0;      // side
  double h = 1;      // spacing
  int n = 2;         // space dimension
  int m = 1;         // components
  int cells_per_side = 0;

  std::vector<double> u;        // node values, node-major (node*m + j)
  std::vector<uint8_t> pinned;  // per node
  std::vector<double> coeff;    // per cell, precomputed a(x_cell)

  bool p_is_two() const { return f.p == 2.0; }
  long long node_count() const;
  long long cell_count() const;
  VecD node_position(const std::vector<int>& idx) const;
  double energy(const std::vector<double>& values) const;
  void gradient(const std::vector<double>& values, std::vector<double>& out) const;
};

DiscreteVolumeProblem assemble_volume_problem(const VolumeIntegrand& f, const Mat& xi, const VecD& center,
                                              double t, double h);

struct VolumeCellResult {
  double value = 0;       // discrete minimum energy
  double normalized = 0;  // value / t^n
  int iterations = 0;
  double residual = 0;
  bool converged = false;
  std::vector<double> minimizer;
};

// p = 2: conjugate gradients on the normal equations to relative residual
// <= tol. General p > 1: damped gradient descent with backtracking until the
// relative energy decrease per sweep drops below tol. Energy is monotone
// non-increasing across iterations in both regimes.
VolumeCellResult solve_volume_cell(const DiscreteVolumeProblem& problem, double tol = 1e-11,
                                   int max_iter = 20000);

// Compares the analytic energy gradient against central finite differences
// at probe_count random free nodes; returns the worst relative error.
double gradient_check(const DiscreteVolumeProblem& problem, const std::vector<double>& values,
                      int probe_count, uint64_t rng_seed = 1, double step = 1e-5);

}  // namespace cellhom
