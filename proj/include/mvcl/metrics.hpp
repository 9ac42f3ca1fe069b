#pragma once

#include <cstdint>

#include "mvcl/tensor.hpp"

namespace mvcl {

struct MetricReport {
  double alignment = 0.0;
  double uniformity_wi = 0.0;
  double uniformity_moment = 0.0;
  double rankme = 1.0;
  std::int64_t numerical_rank = 1;
};

// Mean over instances and unordered view pairs of the squared distance
// between the two view embeddings. Zero iff every instance's views coincide.
double alignment_metric(const ViewBatch& batch);

// log of the mean of e^{-t ||u - v||^2} over distinct row pairs, all m * n
// rows pooled. The unordered-pair mean equals the ordered-pair mean exactly,
// so only the upper triangle is evaluated. Zero iff all rows coincide,
// strictly negative otherwise.
double uniformity_wi(const ViewBatch& batch, double t);

// Frobenius distance between the empirical second-moment matrix of the
// pooled rows and I/d. Kernel-free spread measure; zero for tight frames
// such as the +-basis configuration, small for near-uniform clouds.
double uniformity_moment(const ViewBatch& batch);

struct RankMetrics {
  double rankme = 1.0;
  std::int64_t numerical_rank = 1;
};

// Effective-rank measures of the pooled (m * n) x d embedding matrix:
// rankme = exp(entropy of the normalized singular-value distribution),
// numerical_rank = #{k : sigma_k > epsilon * sigma_1}.
RankMetrics rank_metrics(const ViewBatch& batch, double epsilon = 1e-6);

MetricReport metric_report(const ViewBatch& batch, double t = 2.0,
                           double epsilon = 1e-6);

}  // namespace mvcl
