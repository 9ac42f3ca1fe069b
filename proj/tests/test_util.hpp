#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "mvcl/losses.hpp"
#include "mvcl/sampling.hpp"
#include "mvcl/tensor.hpp"

namespace testutil {

inline double rel_err(double a, double b, double floor_scale = 1e-8) {
  return std::abs(a - b) /
         std::max({std::abs(a), std::abs(b), floor_scale});
}

// Elementwise gradient comparison; the 1e-3 floor keeps near-zero entries
// from blowing up the relative error (finite differences carry ~1e-11
// absolute noise at h = 1e-5).
inline double max_grad_rel_err(const mvcl::Tensor3& a,
                               const mvcl::Tensor3& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.data.size(); ++k) {
    worst = std::max(worst, std::abs(a.data[k] - b.data[k]) /
                                std::max({std::abs(a.data[k]),
                                          std::abs(b.data[k]), 1e-3}));
  }
  return worst;
}

// View count a loss accepts: the two-view losses are pinned to 2.
inline std::size_t views_for(mvcl::LossName name, std::size_t preferred) {
  if (name == mvcl::LossName::NtXent || name == mvcl::LossName::Dhel) {
    return 2;
  }
  return preferred;
}

inline mvcl::ViewBatch random_batch(std::size_t m, std::size_t n,
                                    std::size_t d, std::uint64_t seed,
                                    double concentration = 3.0) {
  return mvcl::sample_multiview({m, n, d, concentration, seed});
}

}  // namespace testutil
