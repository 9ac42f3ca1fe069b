#include <cstddef>

#include "mvcl/simd.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>

namespace mvcl::simd::detail {

bool avx2_compiled() { return true; }

bool avx2_supported() {
#if defined(__GNUC__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

// One __m256d accumulator holds the four canonical lanes; mul and add stay
// separate instructions so the result matches the scalar reference exactly.

void dots_avx2(const double* q, const double* rows, std::size_t rc,
               std::size_t d, double* out) {
  const std::size_t main = d - d % 4;
  for (std::size_t r = 0; r < rc; ++r) {
    const double* row = rows + r * d;
    __m256d vacc = _mm256_setzero_pd();
    for (std::size_t k = 0; k < main; k += 4) {
      const __m256d vq = _mm256_loadu_pd(q + k);
      const __m256d vr = _mm256_loadu_pd(row + k);
      vacc = _mm256_add_pd(vacc, _mm256_mul_pd(vq, vr));
    }
    alignas(32) double acc[4];
    _mm256_store_pd(acc, vacc);
    for (std::size_t k = main; k < d; ++k) acc[k - main] += q[k] * row[k];
    out[r] = (acc[0] + acc[1]) + (acc[2] + acc[3]);
  }
}

void sqdists_avx2(const double* q, const double* rows, std::size_t rc,
                  std::size_t d, double* out) {
  const std::size_t main = d - d % 4;
  for (std::size_t r = 0; r < rc; ++r) {
    const double* row = rows + r * d;
    __m256d vacc = _mm256_setzero_pd();
    for (std::size_t k = 0; k < main; k += 4) {
      const __m256d diff =
          _mm256_sub_pd(_mm256_loadu_pd(q + k), _mm256_loadu_pd(row + k));
      vacc = _mm256_add_pd(vacc, _mm256_mul_pd(diff, diff));
    }
    alignas(32) double acc[4];
    _mm256_store_pd(acc, vacc);
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

bool avx2_compiled() { return false; }
bool avx2_supported() { return false; }

void dots_avx2(const double* q, const double* rows, std::size_t rc,
               std::size_t d, double* out) {
  dots_scalar(q, rows, rc, d, out);
}

void sqdists_avx2(const double* q, const double* rows, std::size_t rc,
                  std::size_t d, double* out) {
  sqdists_scalar(q, rows, rc, d, out);
}

}  // namespace mvcl::simd::detail

#endif
