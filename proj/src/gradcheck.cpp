#include "mvcl/gradcheck.hpp"

#include <cstddef>

#include "mvcl/errors.hpp"

namespace mvcl {

Tensor3 finite_difference(const std::function<double(const ViewBatch&)>& f,
                          const ViewBatch& batch, double h) {
  if (!(h >= 1e-8 && h <= 1e-3)) {
    throw Error(ErrorCode::BadParameter,
                "finite-difference step h must lie in [1e-8, 1e-3]");
  }
  Tensor3 g(batch.m, batch.n, batch.d);
  ViewBatch work = batch;
  const std::size_t total = batch.rows() * batch.d;
  for (std::size_t k = 0; k < total; ++k) {
    const double saved = work.data[k];
    work.data[k] = saved + h;
    const double fp = f(work);
    work.data[k] = saved - h;
    const double fm = f(work);
    work.data[k] = saved;
    g.data[k] = (fp - fm) / (2.0 * h);
  }
  return g;
}

Tensor3 finite_difference_gradient(const LossSpec& spec,
                                   const ViewBatch& batch, double h,
                                   LossPart part) {
  return finite_difference(
      [&spec, part](const ViewBatch& b) {
        const LossBreakdown r = evaluate_free(spec, b);
        switch (part) {
          case LossPart::Alignment: return r.alignment_term;
          case LossPart::Uniformity: return r.uniformity_term;
          case LossPart::Total: break;
        }
        return r.total;
      },
      batch, h);
}

Tensor3 tangent_project(const Tensor3& grad, const ViewBatch& batch) {
  if (grad.m != batch.m || grad.n != batch.n || grad.d != batch.d) {
    throw Error(ErrorCode::InvalidShape,
                "gradient and batch shapes must match");
  }
  require_unit_rows(batch, 1e-6);
  Tensor3 out(grad.m, grad.n, grad.d);
  for (std::size_t r = 0; r < batch.rows(); ++r) {
    const double* u = batch.flat_row(r);
    const double* g = grad.flat_row(r);
    double dot = 0.0;
    for (std::size_t k = 0; k < batch.d; ++k) dot += g[k] * u[k];
    double* o = out.flat_row(r);
    for (std::size_t k = 0; k < batch.d; ++k) o[k] = g[k] - dot * u[k];
  }
  return out;
}

}  // namespace mvcl
