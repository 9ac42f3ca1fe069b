#include "mvcl/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace mvcl {

Tensor3 Tensor3::from_data(std::size_t m, std::size_t n, std::size_t d,
                           std::vector<double> values) {
  Tensor3 t(m, n, d);
  if (values.size() != m * n * d) {
    throw Error(ErrorCode::InvalidShape,
                "data length does not match m*n*d");
  }
  t.data = std::move(values);
  return t;
}

ViewBatch normalize(const ViewBatch& batch) {
  ViewBatch out = batch;
  for (std::size_t r = 0; r < batch.rows(); ++r) {
    double* row = out.flat_row(r);
    double norm_sq = 0.0;
    for (std::size_t k = 0; k < batch.d; ++k) {
      if (!std::isfinite(row[k])) {
        throw Error(ErrorCode::NonFinite, "batch contains nan or inf");
      }
      norm_sq += row[k] * row[k];
    }
    if (norm_sq <= 1e-24) {
      throw Error(ErrorCode::ZeroRow, "row norm <= 1e-12, cannot normalize");
    }
    // Rows already unit to ~1e-14 are left untouched; a freshly normalized
    // row falls inside this window, which makes normalize exactly idempotent.
    if (std::abs(norm_sq - 1.0) <= 1e-14) continue;
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (std::size_t k = 0; k < batch.d; ++k) row[k] *= inv;
  }
  return out;
}

double max_unit_norm_deviation(const ViewBatch& batch) {
  double worst = 0.0;
  for (std::size_t r = 0; r < batch.rows(); ++r) {
    const double* row = batch.flat_row(r);
    double norm_sq = 0.0;
    for (std::size_t k = 0; k < batch.d; ++k) {
      if (!std::isfinite(row[k])) {
        throw Error(ErrorCode::NonFinite, "batch contains nan or inf");
      }
      norm_sq += row[k] * row[k];
    }
    worst = std::max(worst, std::abs(std::sqrt(norm_sq) - 1.0));
  }
  return worst;
}

void require_unit_rows(const ViewBatch& batch, double tol) {
  const double dev = max_unit_norm_deviation(batch);
  if (dev > tol) {
    throw Error(ErrorCode::NotUnitNorm,
                "row norm deviates from 1 by " + std::to_string(dev));
  }
}

}  // namespace mvcl
