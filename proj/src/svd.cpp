#include "mvcl/svd.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "mvcl/errors.hpp"

namespace mvcl {

namespace {

constexpr int kMaxSweeps = 60;
constexpr double kOrthTol = 1e-14;

}  // namespace

std::vector<double> singular_values(const std::vector<double>& a,
                                    std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0 || a.size() != rows * cols) {
    throw Error(ErrorCode::InvalidShape,
                "matrix buffer does not match rows * cols");
  }
  for (double x : a) {
    if (!std::isfinite(x)) {
      throw Error(ErrorCode::NonFinite, "matrix entries must be finite");
    }
  }
  // Column-major working copy; rotations act on column pairs.
  std::vector<double> w(rows * cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) w[j * rows + i] = a[i * cols + j];
  }

  bool converged = false;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    converged = true;
    for (std::size_t p = 0; p + 1 < cols; ++p) {
      for (std::size_t q = p + 1; q < cols; ++q) {
        double* cp = w.data() + p * rows;
        double* cq = w.data() + q * rows;
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < rows; ++i) {
          alpha += cp[i] * cp[i];
          beta += cq[i] * cq[i];
          gamma += cp[i] * cq[i];
        }
        if (std::abs(gamma) <= kOrthTol * std::sqrt(alpha * beta)) continue;
        converged = false;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t =
            std::copysign(1.0, zeta) /
            (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < rows; ++i) {
          const double vp = cp[i];
          const double vq = cq[i];
          cp[i] = c * vp - s * vq;
          cq[i] = s * vp + c * vq;
        }
      }
    }
  }
  if (!converged) {
    throw Error(ErrorCode::SvdFailure,
                "Jacobi sweeps did not orthogonalize the columns");
  }

  std::vector<double> sigma(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    double sq = 0.0;
    const double* cj = w.data() + j * rows;
    for (std::size_t i = 0; i < rows; ++i) sq += cj[i] * cj[i];
    sigma[j] = std::sqrt(sq);
  }
  std::sort(sigma.begin(), sigma.end(), std::greater<double>());
  return sigma;
}

}  // namespace mvcl
