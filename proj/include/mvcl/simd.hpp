#pragma once

#include <cstddef>
#include <string>

namespace mvcl::simd {

// Batched float64 primitives with a scalar reference implementation and
// vector variants (AVX2 on x86_64, NEON on aarch64) selected at runtime.
//
// All variants are bit-identical to the scalar reference by construction:
// every reduction uses the same canonical 4-lane blocked accumulation
// (lane j holds elements j, j+4, j+8, ...; tail element k goes to lane k;
// lanes combine as (l0+l1)+(l2+l3)), multiplies and adds are kept separate
// (no FMA; the translation units are built with -ffp-contract=off), and the
// equivalence tests assert exact equality, not closeness.

enum class Backend { Auto, Scalar, Avx2, Neon };

// Selects the backend. Auto re-runs CPU detection. Requesting a backend the
// CPU cannot run falls back to Scalar.
void set_backend(Backend backend);

// Active backend after dispatch (never Auto). Honours the MVCL_SIMD
// environment variable ("scalar", "avx2", "neon", "auto") on first use.
Backend active_backend();

std::string to_string(Backend backend);

// out[r] = dot(query, rows + r*d) for r in [0, row_count).
void dots(const double* query, const double* rows, std::size_t row_count,
          std::size_t d, double* out);

// out[r] = squared Euclidean distance between query and row r.
void squared_distances(const double* query, const double* rows,
                       std::size_t row_count, std::size_t d, double* out);

double dot(const double* a, const double* b, std::size_t d);

namespace detail {
void dots_scalar(const double* q, const double* rows, std::size_t rc,
                 std::size_t d, double* out);
void sqdists_scalar(const double* q, const double* rows, std::size_t rc,
                    std::size_t d, double* out);
bool avx2_compiled();
bool avx2_supported();
void dots_avx2(const double* q, const double* rows, std::size_t rc,
               std::size_t d, double* out);
void sqdists_avx2(const double* q, const double* rows, std::size_t rc,
                  std::size_t d, double* out);
bool neon_compiled();
void dots_neon(const double* q, const double* rows, std::size_t rc,
               std::size_t d, double* out);
void sqdists_neon(const double* q, const double* rows, std::size_t rc,
                  std::size_t d, double* out);
}  // namespace detail

}  // namespace mvcl::simd
