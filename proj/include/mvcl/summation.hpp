#pragma once

#include <cstddef>
#include <span>

namespace mvcl {

// Pairwise-tree summation: recursive halving with a linear base case of 16
// elements. Deterministic for a fixed input order and much better conditioned
// than left-to-right accumulation; all reductions whose result is pinned by
// the determinism contract go through this.
double pairwise_sum(const double* x, std::size_t count);

inline double pairwise_sum(std::span<const double> x) {
  return pairwise_sum(x.data(), x.size());
}

}  // namespace mvcl
