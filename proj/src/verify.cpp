#include "mvcl/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "mvcl/asymptotics.hpp"
#include "mvcl/gradcheck.hpp"
#include "mvcl/kernels.hpp"
#include "mvcl/losses.hpp"
#include "mvcl/oracle.hpp"
#include "mvcl/rng.hpp"
#include "mvcl/sampling.hpp"

namespace mvcl {

namespace {

double rel_err(double a, double b, double floor_scale) {
  return std::abs(a - b) /
         std::max({std::abs(a), std::abs(b), floor_scale});
}

ViewBatch hand_antipodal_batch() {
  ViewBatch b(2, 2, 2);
  b.row(0, 0)[0] = 1.0;
  b.row(0, 1)[0] = 1.0;
  b.row(1, 0)[0] = -1.0;
  b.row(1, 1)[0] = -1.0;
  return b;
}

ViewBatch aligned_batch(std::size_t m, std::size_t n, std::size_t d,
                        std::uint64_t seed) {
  const Tensor3 anchors = sample_uniform_sphere(m, 1, d, seed);
  ViewBatch b(m, n, d);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t l = 0; l < n; ++l) {
      std::copy(anchors.row(i, 0), anchors.row(i, 0) + d, b.row(i, l));
    }
  }
  return b;
}

}  // namespace

VerifyReport run_verification(const VerifyOptions& opts) {
  VerifyReport report;
  const auto add = [&report](const std::string& name, double measured,
                             double threshold) {
    report.checks.push_back(
        {name, measured, threshold, measured <= threshold});
  };

  // Fast loss vs oracle agreement, two batch shapes per loss.
  {
    double worst = 0.0;
    std::size_t batch_index = 0;
    for (LossName name : all_losses()) {
      const std::size_t n_views =
          (name == LossName::NtXent || name == LossName::Dhel) ? 2 : 3;
      for (std::size_t rep = 0; rep < 2; ++rep) {
        const std::size_t m = rep == 0 ? 4 : 7;
        const ViewBatch batch = sample_multiview(
            {m, n_views, 4, 3.0, derive_stream(opts.seed, batch_index++)});
        const LossSpec spec{name, 0.5};
        const double fast = evaluate(spec, batch).total;
        const double naive = oracle::naive_evaluate(spec, batch);
        worst = std::max(worst, rel_err(fast, naive, 1e-8));
      }
    }
    add("oracle-agreement", worst, 1e-12);
  }

  // Analytic vs finite-difference gradients, one batch per loss.
  {
    double worst = 0.0;
    std::size_t batch_index = 100;
    for (LossName name : all_losses()) {
      const std::size_t n_views =
          (name == LossName::NtXent || name == LossName::Dhel) ? 2 : 3;
      const ViewBatch batch = sample_multiview(
          {5, n_views, 4, 3.0, derive_stream(opts.seed, batch_index++)});
      const LossSpec spec{name, 0.5};
      Tensor3 analytic = euclidean_gradient(spec, batch);
      if (opts.inject_gradient_fault && name == LossName::MvDhel) {
        analytic.data[0] = -analytic.data[0];
      }
      const Tensor3 fd = finite_difference_gradient(spec, batch, 1e-5);
      for (std::size_t k = 0; k < fd.data.size(); ++k) {
        worst = std::max(worst,
                         rel_err(analytic.data[k], fd.data[k], 1e-3));
      }
    }
    add("gradient-check", worst, 1e-6);
  }

  // Pinned hand values.
  {
    const double total =
        evaluate({LossName::MvDhel, 1.0}, hand_antipodal_batch()).total;
    add("hand-value-antipodal", std::abs(total - (-3.0 - std::log(2.0))),
        1e-10);
  }
  {
    double worst = 0.0;
    for (double tau : {0.5, 1.0}) {
      for (std::size_t n : {2u, 3u, 4u}) {
        const ViewBatch b = aligned_batch(6, n, 4, opts.seed + n);
        const double align =
            evaluate({LossName::MvInfoNce, tau}, b).alignment_term;
        const double expect =
            -1.0 / tau -
            std::log(static_cast<double>(n) * static_cast<double>(n - 1));
        worst = std::max(worst, std::abs(align - expect));
      }
    }
    add("hand-value-aligned-positive", worst, 1e-10);
  }

  // Circle energy oracle, equilateral pin.
  {
    const auto res =
        oracle::circle_energy_minimum(3, Kernel::gaussian_cl(1.0), 360);
    add("circle-equilateral",
        std::abs(res.energy - 3.0 * std::exp(-0.5)), 1e-6);
  }

  // Large-batch uniformity gap for both multi-view losses.
  {
    const double g1 = normalized_uniformity_gap(LossName::MvInfoNce, 1024,
                                                3, 3, 0.5, opts.seed);
    const double g2 = normalized_uniformity_gap(LossName::MvDhel, 1024, 3,
                                                3, 0.5, opts.seed);
    add("asymptotic-gap", std::max(g1, g2), 0.02);
  }

  report.all_pass = true;
  for (const CheckResult& c : report.checks) {
    report.all_pass = report.all_pass && c.pass;
  }
  return report;
}

}  // namespace mvcl
