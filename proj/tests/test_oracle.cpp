#include <cmath>
#include <numbers>

#include "doctest.h"
#include "mvcl/errors.hpp"
#include "mvcl/losses.hpp"
#include "mvcl/oracle.hpp"
#include "test_util.hpp"

using namespace mvcl;
using testutil::random_batch;
using testutil::views_for;

TEST_CASE("instrumented losses agree with the naive oracle to 1e-12") {
  for (LossName name : all_losses()) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const std::size_t m = 2 + seed % 5;
      const std::size_t n = views_for(name, 2 + seed % 3);
      const std::size_t d = 2 + seed % 4;
      const ViewBatch b = random_batch(m, n, d, 100 + seed);
      for (double tau : {0.2, 1.0}) {
        const double fast = evaluate({name, tau}, b).total;
        const double slow = oracle::naive_evaluate({name, tau}, b);
        CHECK(testutil::rel_err(fast, slow) < 1e-12);
      }
    }
  }
}

TEST_CASE("oracle reproduces the antipodal hand value independently") {
  ViewBatch b(2, 2, 2);
  b.row(0, 0)[0] = 1.0;
  b.row(0, 1)[0] = 1.0;
  b.row(1, 0)[0] = -1.0;
  b.row(1, 1)[0] = -1.0;
  const double got = oracle::naive_evaluate({LossName::MvDhel, 1.0}, b);
  CHECK(std::abs(got - (-3.0 - std::log(2.0))) < 1e-12);
}

TEST_CASE("oracle refuses batches beyond its size guard") {
  const ViewBatch big = random_batch(17, 2, 3, 4);
  CHECK_THROWS_WITH_AS(oracle::naive_evaluate({LossName::NtXent, 0.5}, big),
                       doctest::Contains("SizeGuard"), Error);
}

TEST_CASE("two circle points settle antipodally") {
  const auto r = oracle::circle_energy_minimum(2, Kernel::gaussian_cl(1.0),
                                               360);
  REQUIRE(r.angles.size() == 2);
  CHECK(std::abs(r.angles[0] - 0.0) < 1e-2);
  CHECK(std::abs(r.angles[1] - std::numbers::pi) < 1e-2);
  CHECK(r.evaluations > 0);
}

TEST_CASE("three circle points settle equilaterally with energy 3/sqrt(e)") {
  const auto r = oracle::circle_energy_minimum(3, Kernel::gaussian_cl(1.0),
                                               360);
  REQUIRE(r.angles.size() == 3);
  // pair energy at gap 2*pi/3: exp(cos(2*pi/3)) = exp(-1/2), three pairs
  CHECK(std::abs(r.energy - 3.0 * std::exp(-0.5)) < 1e-6);
  const double g01 = r.angles[1] - r.angles[0];
  const double g12 = r.angles[2] - r.angles[1];
  const double third = 2.0 * std::numbers::pi / 3.0;
  CHECK(std::abs(g01 - third) < 1e-2);
  CHECK(std::abs(g12 - third) < 1e-2);
}

TEST_CASE("four circle points settle on a square") {
  const auto r = oracle::circle_energy_minimum(4, Kernel::gaussian_cl(1.0),
                                               360);
  REQUIRE(r.angles.size() == 4);
  const double quarter = std::numbers::pi / 2.0;
  for (std::size_t k = 0; k + 1 < 4; ++k) {
    CHECK(std::abs((r.angles[k + 1] - r.angles[k]) - quarter) < 1e-2);
  }
}

TEST_CASE("circle energy is invariant under a rigid base rotation") {
  const Kernel kernel = Kernel::gaussian_cl(0.7);
  const auto a = oracle::circle_energy_minimum(3, kernel, 360, 0.0);
  const auto b = oracle::circle_energy_minimum(3, kernel, 360, 0.9);
  CHECK(std::abs(a.energy - b.energy) < 1e-9);
}

TEST_CASE("circle oracle input guards") {
  CHECK_THROWS_WITH_AS(
      oracle::circle_energy_minimum(3, Kernel::gaussian_cl(1.0), 359),
      doctest::Contains("BadParameter"), Error);
  CHECK_THROWS_WITH_AS(
      oracle::circle_energy_minimum(7, Kernel::gaussian_cl(1.0), 360),
      doctest::Contains("SizeGuard"), Error);
  CHECK_THROWS_AS(
      oracle::circle_energy_minimum(1, Kernel::gaussian_cl(1.0), 360), Error);
}
