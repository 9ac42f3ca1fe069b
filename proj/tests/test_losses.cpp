#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#include "doctest.h"
#include "mvcl/errors.hpp"
#include "mvcl/losses.hpp"
#include "mvcl/rng.hpp"
#include "mvcl/sampling.hpp"
#include "test_util.hpp"

using namespace mvcl;
using testutil::random_batch;
using testutil::views_for;

namespace {

ViewBatch antipodal_two_instance() {
  ViewBatch b(2, 2, 2);
  b.row(0, 0)[0] = 1.0;
  b.row(0, 1)[0] = 1.0;
  b.row(1, 0)[0] = -1.0;
  b.row(1, 1)[0] = -1.0;
  return b;
}

ViewBatch aligned_copies(const ViewBatch& anchors, std::size_t n) {
  ViewBatch b(anchors.m, n, anchors.d);
  for (std::size_t i = 0; i < anchors.m; ++i) {
    for (std::size_t l = 0; l < n; ++l) {
      std::memcpy(b.row(i, l), anchors.row(i, 0),
                  anchors.d * sizeof(double));
    }
  }
  return b;
}

}  // namespace

TEST_CASE("mv-dhel antipodal hand value") {
  const LossBreakdown bd =
      evaluate({LossName::MvDhel, 1.0}, antipodal_two_instance());
  CHECK(std::abs(bd.alignment_term - (-std::log(2.0) - 1.0)) < 1e-12);
  CHECK(std::abs(bd.uniformity_term - (-2.0)) < 1e-12);
  CHECK(std::abs(bd.total - (-3.0 - std::log(2.0))) < 1e-12);
}

TEST_CASE("mv-infonce aligned alignment term is -1/tau - log(n(n-1))") {
  for (double tau : {0.5, 1.0}) {
    for (std::size_t n : {2u, 3u, 4u}) {
      const ViewBatch b =
          aligned_copies(sample_uniform_sphere(5, 1, 4, 3 + n), n);
      const double align =
          evaluate({LossName::MvInfoNce, tau}, b).alignment_term;
      const double expect =
          -1.0 / tau - std::log(static_cast<double>(n * (n - 1)));
      CHECK(std::abs(align - expect) < 1e-10);
    }
  }
}

TEST_CASE("pwe with two views equals nt-xent bitwise") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const ViewBatch b = random_batch(6, 2, 4, seed);
    const LossBreakdown a = evaluate({LossName::Pwe, 0.5}, b);
    const LossBreakdown x = evaluate({LossName::NtXent, 0.5}, b);
    CHECK(a.total == x.total);
    CHECK(a.alignment_term == x.alignment_term);
    CHECK(a.uniformity_term == x.uniformity_term);
  }
}

TEST_CASE("breakdown total is the exact sum of its parts") {
  for (LossName name : all_losses()) {
    const ViewBatch b = random_batch(5, views_for(name, 3), 4, 77);
    const LossBreakdown bd = evaluate({name, 0.7}, b);
    CHECK(bd.total == bd.alignment_term + bd.uniformity_term);
    CHECK(std::isfinite(bd.total));
  }
}

TEST_CASE("instrumented kernel-eval counters match the closed forms") {
  for (LossName name : all_losses()) {
    for (std::size_t m : {2u, 3u, 5u, 8u}) {
      for (std::size_t np : {2u, 3u, 4u}) {
        const std::size_t n = views_for(name, np);
        const ViewBatch b = random_batch(m, n, 3, 11 * m + n);
        const LossBreakdown bd = evaluate({name, 0.5}, b);
        const KernelEvalSplit split = kernel_eval_split(name, m, n);
        const TermCounts tc = term_counts(name, m, n);
        CHECK(bd.kernel_evals == split.alignment + split.uniformity);
        CHECK(bd.kernel_evals == tc.kernel_evals);
        CHECK(bd.terms_per_instance == tc.terms_per_instance);
      }
    }
  }
}

TEST_CASE("terms per instance follow the summation placement") {
  for (std::size_t n = 2; n <= 8; ++n) {
    const auto tpi = [&](LossName name) {
      return term_counts(name, 4, n).terms_per_instance;
    };
    const auto sn = static_cast<std::int64_t>(n);
    CHECK(tpi(LossName::Pwe) == sn * (sn - 1) / 2);
    CHECK(tpi(LossName::Pvc) == sn * (sn - 1));
    CHECK(tpi(LossName::Avg) == sn);
    CHECK(tpi(LossName::MvInfoNce) == 1);
    CHECK(tpi(LossName::MvDhel) == 1);
    CHECK(tpi(LossName::MvCl1) == sn);
    CHECK(tpi(LossName::MvCl2) == sn);
  }
  CHECK(term_counts(LossName::NtXent, 4, 2).terms_per_instance == 1);
  CHECK(term_counts(LossName::Dhel, 4, 2).terms_per_instance == 1);
}

TEST_CASE("mv-dhel uniformity cost is Theta(1/N) of mv-infonce's") {
  for (std::size_t n = 2; n <= 8; ++n) {
    const std::size_t m = 16;
    const KernelEvalSplit dh = kernel_eval_split(LossName::MvDhel, m, n);
    const KernelEvalSplit in = kernel_eval_split(LossName::MvInfoNce, m, n);
    // n * (m-1) / (m * (n-1)) -> exactly the documented ratio.
    const double ratio = static_cast<double>(dh.uniformity) /
                         static_cast<double>(in.uniformity);
    const double expect = static_cast<double>(m - 1) /
                          static_cast<double>(m * (n - 1));
    CHECK(ratio == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("loss evaluation is deterministic bitwise") {
  for (LossName name : all_losses()) {
    const ViewBatch b = random_batch(6, views_for(name, 3), 5, 1234);
    const LossBreakdown r1 = evaluate({name, 0.5}, b);
    const LossBreakdown r2 = evaluate({name, 0.5}, b);
    CHECK(r1.total == r2.total);
  }
}

TEST_CASE("extreme temperature stays finite through log-sum-exp") {
  for (LossName name : all_losses()) {
    const ViewBatch b = random_batch(4, views_for(name, 3), 3, 9);
    const LossBreakdown bd = evaluate({name, 1e-3}, b);
    CHECK(std::isfinite(bd.total));     // naive exp(s/tau) would overflow
    CHECK(std::isfinite(bd.alignment_term));
    CHECK(std::isfinite(bd.uniformity_term));
  }
}

TEST_CASE("loss name round-trip and unknown names") {
  for (LossName name : all_losses()) {
    CHECK(loss_from_name(to_string(name)) == name);
  }
  CHECK_THROWS_WITH_AS(loss_from_name("simclr"),
                       doctest::Contains("UnknownLoss"), Error);
}

TEST_CASE("loss preconditions are enforced") {
  const ViewBatch three_views = random_batch(4, 3, 3, 1);
  CHECK_THROWS_WITH_AS(evaluate({LossName::NtXent, 0.5}, three_views),
                       doctest::Contains("WrongViewCount"), Error);
  CHECK_THROWS_AS(evaluate({LossName::Dhel, 0.5}, three_views), Error);

  const ViewBatch one_instance = random_batch(1, 2, 3, 2);
  CHECK_THROWS_WITH_AS(evaluate({LossName::Dhel, 0.5}, one_instance),
                       doctest::Contains("TooFewInstances"), Error);
  CHECK_THROWS_AS(evaluate({LossName::MvDhel, 0.5}, one_instance), Error);
  CHECK_THROWS_AS(evaluate({LossName::MvCl2, 0.5}, one_instance), Error);

  const ViewBatch ok = random_batch(4, 2, 3, 3);
  CHECK_THROWS_WITH_AS(evaluate({LossName::NtXent, 1e-4}, ok),
                       doctest::Contains("BadParameter"), Error);

  ViewBatch off = ok;
  off.row(0, 0)[0] += 1e-3;
  CHECK_THROWS_WITH_AS(evaluate({LossName::NtXent, 0.5}, off),
                       doctest::Contains("NotUnitNorm"), Error);
  CHECK_NOTHROW(evaluate_free({LossName::NtXent, 0.5}, off));
}

TEST_CASE("instance permutation leaves every loss unchanged") {
  Rng rng(derive_stream(55, 0));
  for (LossName name : all_losses()) {
    const std::size_t m = 6, n = views_for(name, 3), d = 4;
    const ViewBatch b = random_batch(m, n, d, 21);
    std::vector<std::size_t> perm(m);
    for (std::size_t i = 0; i < m; ++i) perm[i] = i;
    for (std::size_t i = m; i > 1; --i) {
      std::swap(perm[i - 1],
                perm[static_cast<std::size_t>(rng.uniform01() * i)]);
    }
    ViewBatch p(m, n, d);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t l = 0; l < n; ++l) {
        std::memcpy(p.row(i, l), b.row(perm[i], l), d * sizeof(double));
      }
    }
    const double a = evaluate({name, 0.5}, b).total;
    const double c = evaluate({name, 0.5}, p).total;
    CHECK(testutil::rel_err(a, c) < 1e-12);
  }
}

TEST_CASE("mv-dhel uniformity ignores cross-view pairings") {
  // Decoupling signature: permuting instances independently inside each view
  // changes alignment but not mv-dhel's same-view uniformity term.
  const std::size_t m = 7, n = 3, d = 4;
  const ViewBatch b = random_batch(m, n, d, 31);
  Rng rng(derive_stream(31, 9));
  ViewBatch p = b;
  for (std::size_t l = 0; l < n; ++l) {
    std::vector<std::size_t> perm(m);
    for (std::size_t i = 0; i < m; ++i) perm[i] = i;
    for (std::size_t i = m; i > 1; --i) {
      std::swap(perm[i - 1],
                perm[static_cast<std::size_t>(rng.uniform01() * i)]);
    }
    for (std::size_t i = 0; i < m; ++i) {
      std::memcpy(p.row(i, l), b.row(perm[i], l), d * sizeof(double));
    }
  }
  const double ub = evaluate({LossName::MvDhel, 0.5}, b).uniformity_term;
  const double up = evaluate({LossName::MvDhel, 0.5}, p).uniformity_term;
  CHECK(testutil::rel_err(ub, up) < 1e-12);
  // mv-infonce couples views in its denominator, so it does move.
  const double ib = evaluate({LossName::MvInfoNce, 0.5}, b).uniformity_term;
  const double ip = evaluate({LossName::MvInfoNce, 0.5}, p).uniformity_term;
  CHECK(std::abs(ib - ip) > 1e-6);
}

TEST_CASE("coincident views minimize the alignment term") {
  // First-principle check of the alignment optimum: the aligned batch beats
  // every perturbed variant.
  const ViewBatch anchors = sample_uniform_sphere(5, 1, 4, 8);
  const ViewBatch aligned = aligned_copies(anchors, 3);
  for (LossName name : {LossName::MvInfoNce, LossName::MvDhel}) {
    const double best = evaluate({name, 0.5}, aligned).alignment_term;
    Rng rng(derive_stream(99, static_cast<std::uint64_t>(name)));
    for (int trial = 0; trial < 100; ++trial) {
      Tensor3 perturbed = aligned;
      for (double& x : perturbed.data) x += 1e-3 * rng.gaussian();
      const double got =
          evaluate({name, 0.5}, normalize(perturbed)).alignment_term;
      CHECK(got >= best - 1e-12);
    }
  }
}
