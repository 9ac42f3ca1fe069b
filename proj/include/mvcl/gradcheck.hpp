#pragma once

#include <functional>

#include "mvcl/losses.hpp"
#include "mvcl/tensor.hpp"

namespace mvcl {

// Central finite differences of an arbitrary scalar function of the batch,
// one coordinate at a time: (f(x + h e_k) - f(x - h e_k)) / (2h). Rows are
// perturbed off the sphere, so f must be defined in a neighborhood of the
// batch (the loss evaluators are; see evaluate_free). h outside [1e-8, 1e-3]
// throws BadParameter.
Tensor3 finite_difference(const std::function<double(const ViewBatch&)>& f,
                          const ViewBatch& batch, double h);

// Finite-difference Euclidean gradient of the selected part of the loss.
// Companion check for euclidean_gradient; costs 2 * m * n * d evaluations.
Tensor3 finite_difference_gradient(const LossSpec& spec,
                                   const ViewBatch& batch, double h,
                                   LossPart part = LossPart::Total);

// Projects each row of grad onto the tangent space of the sphere at the
// corresponding row of batch: g - (g . u) u. batch rows must be unit norm.
Tensor3 tangent_project(const Tensor3& grad, const ViewBatch& batch);

}  // namespace mvcl
