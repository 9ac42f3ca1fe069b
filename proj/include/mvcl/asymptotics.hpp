#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mvcl/losses.hpp"

namespace mvcl {

// How the positive-pair expectation in the large-batch limit formula is
// estimated from the sample set.
enum class PositiveMode {
  // v = u: the estimator evaluated at perfect alignment, where the limit
  //   formula's first term reduces to -1/tau for unit samples.
  PerfectAlignment,
  // Two independent uniform draws from the sample set per pair draw.
  IndependentPairs,
};

struct AsymptoticEstimate {
  double first_term = 0.0;   // E[-(v . u) / tau] over positive pairs
  double second_term = 0.0;  // E_v[ log E_u[ e^{(v . u)/tau} ] ]
  double total = 0.0;
};

// Monte-Carlo estimate of the large-batch limit  E[-v.u/tau] +
// E_v[log E_u[e^{v.u/tau}]]  treating `samples` (count unit rows of length d,
// row-major) as draws from the embedding distribution. The inner mean of the
// second term runs over the full sample set including u = v; the bias this
// adds is e^{1/tau}/count inside the log and vanishes as count grows.
// Deterministic given seed. pair_draws is used by IndependentPairs only.
AsymptoticEstimate asymptotic_formula_mc(
    const std::vector<double>& samples, std::size_t d, double tau,
    std::size_t pair_draws, std::uint64_t seed,
    PositiveMode mode = PositiveMode::PerfectAlignment);

// Probe of the large-batch limit through the batch losses themselves: draws
// m anchors uniformly on the sphere, builds the perfectly-aligned batch with
// all n views equal to the anchor, and compares the loss's normalized
// uniformity term against the limit formula's second term estimated on the
// same anchors. Normalization removes the loss-specific additive and
// multiplicative constants:
//   mv-infonce: uniformity - log(m-1) - log(n(n-1))
//   mv-dhel:    uniformity / n - log(m-1)
// Returns |normalized - target|; decreasing in m by the law of large
// numbers. Only the two losses above are supported.
double normalized_uniformity_gap(LossName name, std::size_t m, std::size_t n,
                                 std::size_t d, double tau,
                                 std::uint64_t seed);

}  // namespace mvcl
