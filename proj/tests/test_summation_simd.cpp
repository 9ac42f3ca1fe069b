#include <cmath>
#include <vector>

#include "doctest.h"
#include "mvcl/rng.hpp"
#include "mvcl/simd.hpp"
#include "mvcl/summation.hpp"

using namespace mvcl;

TEST_CASE("pairwise sum matches exact sums") {
  std::vector<double> x;
  CHECK(pairwise_sum(x.data(), 0) == 0.0);
  x = {1.5};
  CHECK(pairwise_sum(x.data(), 1) == 1.5);
  x = {1.0, 2.0, 3.0, 4.0, 5.0};
  CHECK(pairwise_sum(x.data(), x.size()) == 15.0);
}

TEST_CASE("pairwise sum tracks a long double reference closely") {
  Rng rng(derive_stream(3, 0));
  std::vector<double> x(100000);
  long double exact = 0.0L;
  for (double& v : x) {
    v = rng.gaussian() * 1e6;
    exact += static_cast<long double>(v);
  }
  const double got = pairwise_sum(x.data(), x.size());
  CHECK(std::abs(got - static_cast<double>(exact)) <
        1e-6 * 1e6 * std::sqrt(100000.0));
}

namespace {

void fill_random(std::vector<double>& v, std::uint64_t seed) {
  Rng rng(derive_stream(seed, 7));
  for (double& x : v) x = rng.gaussian();
}

}  // namespace

TEST_CASE("simd variants are bit-identical to the scalar reference") {
  using namespace mvcl::simd;
  if (!detail::avx2_compiled() || !detail::avx2_supported()) {
    MESSAGE("avx2 unavailable; scalar-only platform");
    return;
  }
  for (std::size_t d : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 13u, 16u, 31u}) {
    const std::size_t rows = 17;
    std::vector<double> q(d), r(rows * d), a(rows), b(rows);
    fill_random(q, d);
    fill_random(r, d + 100);
    detail::dots_scalar(q.data(), r.data(), rows, d, a.data());
    detail::dots_avx2(q.data(), r.data(), rows, d, b.data());
    CHECK(a == b);
    detail::sqdists_scalar(q.data(), r.data(), rows, d, a.data());
    detail::sqdists_avx2(q.data(), r.data(), rows, d, b.data());
    CHECK(a == b);
  }
}

TEST_CASE("backend selection is honored with graceful fallback") {
  using namespace mvcl::simd;
  set_backend(Backend::Scalar);
  CHECK(active_backend() == Backend::Scalar);

  set_backend(Backend::Avx2);
  if (detail::avx2_compiled() && detail::avx2_supported()) {
    CHECK(active_backend() == Backend::Avx2);
  } else {
    CHECK(active_backend() == Backend::Scalar);
  }

  set_backend(Backend::Neon);
  if (detail::neon_compiled()) {
    CHECK(active_backend() == Backend::Neon);
  } else {
    CHECK(active_backend() == Backend::Scalar);
  }

  set_backend(Backend::Auto);
  CHECK(active_backend() != Backend::Auto);

  // Dispatch through the public entry points agrees across backends bitwise.
  const std::size_t d = 9, rows = 11;
  std::vector<double> q(d), r(rows * d), scalar_out(rows), active_out(rows);
  fill_random(q, 1);
  fill_random(r, 2);
  set_backend(Backend::Scalar);
  dots(q.data(), r.data(), rows, d, scalar_out.data());
  set_backend(Backend::Auto);
  dots(q.data(), r.data(), rows, d, active_out.data());
  CHECK(scalar_out == active_out);
  CHECK(dot(q.data(), r.data(), d) == scalar_out[0]);
  set_backend(Backend::Auto);
}
