#include <cmath>
#include <limits>

#include "doctest.h"
#include "mvcl/errors.hpp"
#include "mvcl/sampling.hpp"
#include "mvcl/tensor.hpp"

using namespace mvcl;

TEST_CASE("tensor shape validation") {
  CHECK_THROWS_AS(Tensor3(0, 2, 3), Error);
  CHECK_THROWS_AS(Tensor3(2, 0, 3), Error);
  CHECK_THROWS_AS(Tensor3(2, 2, 0), Error);
  CHECK_THROWS_AS(Tensor3::from_data(2, 2, 2, {1.0, 2.0}), Error);
  const Tensor3 t(3, 2, 4);
  CHECK(t.rows() == 6);
  CHECK(t.data.size() == 24);
}

TEST_CASE("normalize scales rows to unit norm") {
  Tensor3 b(1, 2, 2);
  b.row(0, 0)[0] = 3.0;
  b.row(0, 0)[1] = 4.0;
  b.row(0, 1)[0] = 1.0;
  const ViewBatch u = normalize(b);
  CHECK(u.row(0, 0)[0] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(u.row(0, 0)[1] == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(u.row(0, 1)[0] == 1.0);  // already unit: copied bit-for-bit
  CHECK(u.row(0, 1)[1] == 0.0);
}

TEST_CASE("normalize rejects zero and non-finite rows") {
  Tensor3 zero(1, 2, 2);
  zero.row(0, 1)[0] = 1.0;
  CHECK_THROWS_WITH_AS(normalize(zero), doctest::Contains("ZeroRow"), Error);

  Tensor3 nan_row(1, 2, 2);
  nan_row.row(0, 0)[0] = std::numeric_limits<double>::quiet_NaN();
  nan_row.row(0, 1)[0] = 1.0;
  CHECK_THROWS_WITH_AS(normalize(nan_row), doctest::Contains("NonFinite"),
                       Error);
  Tensor3 inf_row(1, 2, 2);
  inf_row.row(0, 0)[0] = std::numeric_limits<double>::infinity();
  inf_row.row(0, 1)[0] = 1.0;
  CHECK_THROWS_AS(normalize(inf_row), Error);
}

TEST_CASE("normalize is exactly idempotent") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Tensor3 raw(4, 3, 5);
    // Scatter non-unit values deterministically.
    for (std::size_t k = 0; k < raw.data.size(); ++k) {
      raw.data[k] = std::sin(static_cast<double>(k + 17 * seed) * 0.7) *
                    (1.0 + static_cast<double>(seed));
    }
    const ViewBatch once = normalize(raw);
    const ViewBatch twice = normalize(once);
    CHECK(once.data == twice.data);  // bitwise
  }
}

TEST_CASE("unit-norm deviation and the norm gate") {
  const ViewBatch b = sample_uniform_sphere(5, 2, 6, 11);
  CHECK(max_unit_norm_deviation(b) < 1e-9);
  CHECK_NOTHROW(require_unit_rows(b, 1e-6));

  Tensor3 off = b;
  off.row(2, 1)[0] += 1e-3;
  CHECK_THROWS_WITH_AS(require_unit_rows(off, 1e-6),
                       doctest::Contains("NotUnitNorm"), Error);
}
