#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mvcl/errors.hpp"

namespace mvcl {

// Dense M x N x d tensor, row-major with rows indexed instance-major:
// row(i, l) starts at ((i * n) + l) * d. Used both for view batches (rows are
// unit embeddings) and for gradients (rows are arbitrary vectors); unit-norm
// is a contextual invariant checked by the operations that require it.
struct Tensor3 {
  std::size_t m = 0;  // instances
  std::size_t n = 0;  // views per instance
  std::size_t d = 0;  // embedding dimension
  std::vector<double> data;

  Tensor3() = default;
  Tensor3(std::size_t m_, std::size_t n_, std::size_t d_)
      : m(m_), n(n_), d(d_), data(m_ * n_ * d_, 0.0) {
    if (m_ == 0 || n_ == 0 || d_ == 0) {
      throw Error(ErrorCode::InvalidShape, "tensor dimensions must be >= 1");
    }
  }

  static Tensor3 from_data(std::size_t m, std::size_t n, std::size_t d,
                           std::vector<double> values);

  std::size_t rows() const { return m * n; }

  double* row(std::size_t i, std::size_t l) {
    return data.data() + (i * n + l) * d;
  }
  const double* row(std::size_t i, std::size_t l) const {
    return data.data() + (i * n + l) * d;
  }
  // Flat row index r in [0, m*n), r = i*n + l.
  double* flat_row(std::size_t r) { return data.data() + r * d; }
  const double* flat_row(std::size_t r) const { return data.data() + r * d; }

  std::span<const double> row_span(std::size_t i, std::size_t l) const {
    return {row(i, l), d};
  }
};

using ViewBatch = Tensor3;

// Returns a copy with every row scaled to unit Euclidean norm. Rows whose
// squared norm is already within 1e-14 of 1 are copied bit-for-bit, which
// makes normalize(normalize(b)) == normalize(b) exactly.
// Throws ZeroRow if any row norm is <= 1e-12 and NonFinite on nan/inf input.
ViewBatch normalize(const ViewBatch& batch);

// Max |deviation of row norm from 1| over all rows; checks preconditions.
double max_unit_norm_deviation(const ViewBatch& batch);

// Throws NotUnitNorm unless every row has |norm - 1| <= tol.
void require_unit_rows(const ViewBatch& batch, double tol = 1e-6);

}  // namespace mvcl
