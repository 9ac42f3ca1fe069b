#pragma once

#include <cstddef>
#include <vector>

#include "mvcl/losses.hpp"
#include "mvcl/tensor.hpp"

namespace mvcl {

// Linear map from raw inputs in R^p to unit embeddings in R^d:
// u = Wx / ||Wx||. Row-major d x p weight matrix.
struct LinearEncoder {
  std::size_t d = 0;
  std::size_t p = 0;
  std::vector<double> weights;

  LinearEncoder(std::size_t d_, std::size_t p_)
      : d(d_), p(p_), weights(d_ * p_, 0.0) {}
};

// Applies the encoder to every row of an m x n x p input tensor. Throws
// ZeroProjection if any Wx has norm <= 1e-12 (the normalization is
// undefined there).
ViewBatch encoder_forward(const LinearEncoder& enc, const Tensor3& inputs);

// d x p gradient of the batch loss with respect to the weights, chained
// through the normalization Jacobian (I - u u^T) / ||Wx|| per row.
std::vector<double> encoder_gradient(const LinearEncoder& enc,
                                     const Tensor3& inputs,
                                     const LossSpec& spec);

}  // namespace mvcl
