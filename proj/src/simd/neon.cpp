#include <cstddef>

#include "mvcl/simd.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>

namespace mvcl::simd::detail {

bool neon_compiled() { return true; }

// Two float64x2_t registers hold lanes {0,1} and {2,3}; vmulq/vaddq keep
// multiply and add separate (the TU is built with -ffp-contract=off so the
// compiler cannot fuse them either).

void dots_neon(const double* q, const double* rows, std::size_t rc,
               std::size_t d, double* out) {
  const std::size_t main = d - d % 4;
  for (std::size_t r = 0; r < rc; ++r) {
    const double* row = rows + r * d;
    float64x2_t acc01 = vdupq_n_f64(0.0);
    float64x2_t acc23 = vdupq_n_f64(0.0);
    for (std::size_t k = 0; k < main; k += 4) {
      acc01 = vaddq_f64(acc01, vmulq_f64(vld1q_f64(q + k), vld1q_f64(row + k)));
      acc23 = vaddq_f64(acc23,
                        vmulq_f64(vld1q_f64(q + k + 2), vld1q_f64(row + k + 2)));
    }
    double acc[4] = {vgetq_lane_f64(acc01, 0), vgetq_lane_f64(acc01, 1),
                     vgetq_lane_f64(acc23, 0), vgetq_lane_f64(acc23, 1)};
    for (std::size_t k = main; k < d; ++k) acc[k - main] += q[k] * row[k];
    out[r] = (acc[0] + acc[1]) + (acc[2] + acc[3]);
  }
}

void sqdists_neon(const double* q, const double* rows, std::size_t rc,
                  std::size_t d, double* out) {
  const std::size_t main = d - d % 4;
  for (std::size_t r = 0; r < rc; ++r) {
    const double* row = rows + r * d;
    float64x2_t acc01 = vdupq_n_f64(0.0);
    float64x2_t acc23 = vdupq_n_f64(0.0);
    for (std::size_t k = 0; k < main; k += 4) {
      const float64x2_t d01 =
          vsubq_f64(vld1q_f64(q + k), vld1q_f64(row + k));
      const float64x2_t d23 =
          vsubq_f64(vld1q_f64(q + k + 2), vld1q_f64(row + k + 2));
      acc01 = vaddq_f64(acc01, vmulq_f64(d01, d01));
      acc23 = vaddq_f64(acc23, vmulq_f64(d23, d23));
    }
    double acc[4] = {vgetq_lane_f64(acc01, 0), vgetq_lane_f64(acc01, 1),
                     vgetq_lane_f64(acc23, 0), vgetq_lane_f64(acc23, 1)};
    for (std::size_t k = main; k < d; ++k) {
      const double diff = q[k] - row[k];
      acc[k - main] += diff * diff;
    }
    out[r] = (acc[0] + acc[1]) + (acc[2] + acc[3]);
  }
}

}  // namespace mvcl::simd::detail

#else

namespace mvcl::simd::detail {

bool neon_compiled() { return false; }

void dots_neon(const double* q, const double* rows, std::size_t rc,
               std::size_t d, double* out) {
  dots_scalar(q, rows, rc, d, out);
}

void sqdists_neon(const double* q, const double* rows, std::size_t rc,
                  std::size_t d, double* out) {
  sqdists_scalar(q, rows, rc, d, out);
}

}  // namespace mvcl::simd::detail

#endif
