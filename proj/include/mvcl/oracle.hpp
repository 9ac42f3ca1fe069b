#pragma once

#include <cstdint>
#include <vector>

#include "mvcl/kernels.hpp"
#include "mvcl/losses.hpp"
#include "mvcl/tensor.hpp"

namespace mvcl::oracle {

// Deliberately naive reference evaluation: literal nested loops over the
// defining sums, plain exp/log, no log-sum-exp, no shared subexpressions, and
// no code shared with the losses module. Ground truth for the agreement
// tests. Guarded to m <= 16, n <= 8.
double naive_evaluate(const LossSpec& spec, const ViewBatch& batch);

struct EnergyResult {
  std::vector<double> angles;  // sorted, in [0, 2*pi)
  double energy = 0.0;
  std::int64_t evaluations = 0;  // configurations whose energy was computed
};

// Minimal total unordered-pairwise kernel energy of m points on the unit
// circle. The first point is pinned (rotation invariance); the remaining
// m-1 grid angles are enumerated as nondecreasing tuples with a pair-energy
// lookup keyed by circular gap, then refined by coordinate descent with step
// 2*pi/(10*resolution). Full enumeration at the requested resolution is
// intractable for m >= 5 (resolution^(m-1) tuples), so the enumeration grid
// is internally capped at 120 for m=5 and 48 for m=6 before refinement.
// base_angle rigidly rotates the whole search (used to check rotation
// invariance); energies are unaffected.
EnergyResult circle_energy_minimum(std::size_t m, const Kernel& kernel,
                                   std::size_t resolution,
                                   double base_angle = 0.0);

}  // namespace mvcl::oracle
