#include <atomic>
#include <cstdlib>
#include <cstring>
#include <string>

#include "mvcl/simd.hpp"

namespace mvcl::simd {

namespace {

std::atomic<Backend> g_backend{Backend::Auto};
std::atomic<bool> g_resolved{false};

Backend detect() {
  if (const char* env = std::getenv("MVCL_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::Scalar;
    if (std::strcmp(env, "avx2") == 0 && detail::avx2_compiled() &&
        detail::avx2_supported()) {
      return Backend::Avx2;
    }
    if (std::strcmp(env, "neon") == 0 && detail::neon_compiled()) {
      return Backend::Neon;
    }
    // "auto" or an unusable request falls through to detection.
  }
  if (detail::avx2_compiled() && detail::avx2_supported()) return Backend::Avx2;
  if (detail::neon_compiled()) return Backend::Neon;
  return Backend::Scalar;
}

Backend resolved() {
  if (!g_resolved.load(std::memory_order_acquire)) {
    g_backend.store(detect(), std::memory_order_release);
    g_resolved.store(true, std::memory_order_release);
  }
  return g_backend.load(std::memory_order_acquire);
}

}  // namespace

void set_backend(Backend backend) {
  if (backend == Backend::Auto) {
    g_backend.store(detect(), std::memory_order_release);
  } else if (backend == Backend::Avx2 &&
             (!detail::avx2_compiled() || !detail::avx2_supported())) {
    g_backend.store(Backend::Scalar, std::memory_order_release);
  } else if (backend == Backend::Neon && !detail::neon_compiled()) {
    g_backend.store(Backend::Scalar, std::memory_order_release);
  } else {
    g_backend.store(backend, std::memory_order_release);
  }
  g_resolved.store(true, std::memory_order_release);
}

Backend active_backend() { return resolved(); }

std::string to_string(Backend backend) {
  switch (backend) {
    case Backend::Auto: return "auto";
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    case Backend::Neon: return "neon";
  }
  return "unknown";
}

void dots(const double* query, const double* rows, std::size_t row_count,
          std::size_t d, double* out) {
  switch (resolved()) {
    case Backend::Avx2:
      detail::dots_avx2(query, rows, row_count, d, out);
      return;
    case Backend::Neon:
      detail::dots_neon(query, rows, row_count, d, out);
      return;
    default:
      detail::dots_scalar(query, rows, row_count, d, out);
      return;
  }
}

void squared_distances(const double* query, const double* rows,
                       std::size_t row_count, std::size_t d, double* out) {
  switch (resolved()) {
    case Backend::Avx2:
      detail::sqdists_avx2(query, rows, row_count, d, out);
      return;
    case Backend::Neon:
      detail::sqdists_neon(query, rows, row_count, d, out);
      return;
    default:
      detail::sqdists_scalar(query, rows, row_count, d, out);
      return;
  }
}

double dot(const double* a, const double* b, std::size_t d) {
  double out;
  dots(a, b, 1, d, &out);
  return out;
}

}  // namespace mvcl::simd
