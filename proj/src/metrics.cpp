#include "mvcl/metrics.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

#include "mvcl/errors.hpp"
#include "mvcl/summation.hpp"
#include "mvcl/svd.hpp"

namespace mvcl {

namespace {

double squared_distance(const double* a, const double* b, std::size_t d) {
  double s = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double diff = a[k] - b[k];
    s += diff * diff;
  }
  return s;
}

}  // namespace

double alignment_metric(const ViewBatch& batch) {
  if (batch.n < 2) {
    throw Error(ErrorCode::WrongViewCount,
                "alignment needs at least two views per instance");
  }
  std::vector<double> terms;
  terms.reserve(batch.m * batch.n * (batch.n - 1) / 2);
  for (std::size_t i = 0; i < batch.m; ++i) {
    for (std::size_t l = 0; l + 1 < batch.n; ++l) {
      for (std::size_t lp = l + 1; lp < batch.n; ++lp) {
        terms.push_back(
            squared_distance(batch.row(i, l), batch.row(i, lp), batch.d));
      }
    }
  }
  return pairwise_sum(terms.data(), terms.size()) /
         static_cast<double>(terms.size());
}

double uniformity_wi(const ViewBatch& batch, double t) {
  if (!(t > 0.0)) {
    throw Error(ErrorCode::BadParameter, "uniformity scale t must be > 0");
  }
  const std::size_t rows = batch.rows();
  if (rows < 2) {
    throw Error(ErrorCode::TooFewRows,
                "uniformity needs at least two rows");
  }
  // One strip per row keeps memory O(rows) while the reduction stays a
  // fixed pairwise tree.
  std::vector<double> row_acc(rows - 1);
  std::vector<double> strip;
  for (std::size_t r = 0; r + 1 < rows; ++r) {
    strip.clear();
    const double* u = batch.flat_row(r);
    for (std::size_t s = r + 1; s < rows; ++s) {
      strip.push_back(
          std::exp(-t * squared_distance(u, batch.flat_row(s), batch.d)));
    }
    row_acc[r] = pairwise_sum(strip.data(), strip.size());
  }
  const double upper = pairwise_sum(row_acc.data(), row_acc.size());
  const double pairs = 0.5 * static_cast<double>(rows) *
                       static_cast<double>(rows - 1);
  return std::log(upper / pairs);
}

double uniformity_moment(const ViewBatch& batch) {
  const std::size_t d = batch.d;
  const std::size_t rows = batch.rows();
  std::vector<double> second(d * d, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* u = batch.flat_row(r);
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = 0; b < d; ++b) second[a * d + b] += u[a] * u[b];
    }
  }
  const double inv = 1.0 / static_cast<double>(rows);
  double frob_sq = 0.0;
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) {
      double e = second[a * d + b] * inv;
      if (a == b) e -= 1.0 / static_cast<double>(d);
      frob_sq += e * e;
    }
  }
  return std::sqrt(frob_sq);
}

RankMetrics rank_metrics(const ViewBatch& batch, double epsilon) {
  if (!(epsilon > 0.0)) {
    throw Error(ErrorCode::BadParameter, "rank epsilon must be > 0");
  }
  const std::vector<double> sigma =
      singular_values(batch.data, batch.rows(), batch.d);
  const double top = sigma.front();
  if (!(top > 0.0)) {
    throw Error(ErrorCode::SvdFailure,
                "zero matrix has no singular-value distribution");
  }
  double total = 0.0;
  for (double s : sigma) total += s;
  double entropy = 0.0;
  for (double s : sigma) {
    const double p = s / total;
    if (p > 0.0) entropy -= p * std::log(p);
  }
  RankMetrics out;
  out.rankme = std::exp(entropy);
  out.numerical_rank = 0;
  for (double s : sigma) {
    if (s > epsilon * top) ++out.numerical_rank;
  }
  return out;
}

MetricReport metric_report(const ViewBatch& batch, double t, double epsilon) {
  MetricReport r;
  r.alignment = alignment_metric(batch);
  r.uniformity_wi = uniformity_wi(batch, t);
  r.uniformity_moment = uniformity_moment(batch);
  const RankMetrics rk = rank_metrics(batch, epsilon);
  r.rankme = rk.rankme;
  r.numerical_rank = rk.numerical_rank;
  return r;
}

}  // namespace mvcl
