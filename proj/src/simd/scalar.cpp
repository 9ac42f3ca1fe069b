#include <cstddef>

#include "mvcl/simd.hpp"

namespace mvcl::simd::detail {

// Canonical 4-lane blocked reduction. The vector backends reproduce exactly
// this association order, so results match bit-for-bit.

void dots_scalar(const double* q, const double* rows, std::size_t rc,
                 std::size_t d, double* out) {
  for (std::size_t r = 0; r < rc; ++r) {
    const double* row = rows + r * d;
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    const std::size_t main = d - d % 4;
    for (std::size_t k = 0; k < main; k += 4) {
      acc[0] += q[k] * row[k];
      acc[1] += q[k + 1] * row[k + 1];
      acc[2] += q[k + 2] * row[k + 2];
      acc[3] += q[k + 3] * row[k + 3];
    }
    for (std::size_t k = main; k < d; ++k) acc[k - main] += q[k] * row[k];
    out[r] = (acc[0] + acc[1]) + (acc[2] + acc[3]);
  }
}

void sqdists_scalar(const double* q, const double* rows, std::size_t rc,
                    std::size_t d, double* out) {
  for (std::size_t r = 0; r < rc; ++r) {
    const double* row = rows + r * d;
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    const std::size_t main = d - d % 4;
    for (std::size_t k = 0; k < main; k += 4) {
      const double d0 = q[k] - row[k];
      const double d1 = q[k + 1] - row[k + 1];
      const double d2 = q[k + 2] - row[k + 2];
      const double d3 = q[k + 3] - row[k + 3];
      acc[0] += d0 * d0;
      acc[1] += d1 * d1;
      acc[2] += d2 * d2;
      acc[3] += d3 * d3;
    }
    for (std::size_t k = main; k < d; ++k) {
      const double diff = q[k] - row[k];
      acc[k - main] += diff * diff;
    }
    out[r] = (acc[0] + acc[1]) + (acc[2] + acc[3]);
  }
}

}  // namespace mvcl::simd::detail
