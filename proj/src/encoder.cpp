#include "mvcl/encoder.hpp"

#include <cmath>
#include <cstddef>

#include "mvcl/errors.hpp"

namespace mvcl {

namespace {

void check_shapes(const LinearEncoder& enc, const Tensor3& inputs) {
  if (enc.d == 0 || enc.p == 0 || enc.weights.size() != enc.d * enc.p) {
    throw Error(ErrorCode::InvalidShape,
                "encoder weights must be a d x p matrix");
  }
  if (inputs.d != enc.p) {
    throw Error(ErrorCode::InvalidShape,
                "input row length must equal the encoder's p");
  }
}

// y = Wx and its norm for one input row.
double project_row(const LinearEncoder& enc, const double* x, double* y) {
  double sq = 0.0;
  for (std::size_t a = 0; a < enc.d; ++a) {
    const double* wrow = enc.weights.data() + a * enc.p;
    double s = 0.0;
    for (std::size_t b = 0; b < enc.p; ++b) s += wrow[b] * x[b];
    y[a] = s;
    sq += s * s;
  }
  const double norm = std::sqrt(sq);
  if (!(norm > 1e-12)) {
    throw Error(ErrorCode::ZeroProjection,
                "Wx has norm <= 1e-12; normalization undefined");
  }
  return norm;
}

}  // namespace

ViewBatch encoder_forward(const LinearEncoder& enc, const Tensor3& inputs) {
  check_shapes(enc, inputs);
  ViewBatch out(inputs.m, inputs.n, enc.d);
  std::vector<double> y(enc.d);
  for (std::size_t r = 0; r < inputs.rows(); ++r) {
    const double norm = project_row(enc, inputs.flat_row(r), y.data());
    double* u = out.flat_row(r);
    for (std::size_t a = 0; a < enc.d; ++a) u[a] = y[a] / norm;
  }
  return out;
}

std::vector<double> encoder_gradient(const LinearEncoder& enc,
                                     const Tensor3& inputs,
                                     const LossSpec& spec) {
  check_shapes(enc, inputs);
  const ViewBatch batch = encoder_forward(enc, inputs);
  const Tensor3 gu = euclidean_gradient(spec, batch);

  std::vector<double> gw(enc.d * enc.p, 0.0);
  std::vector<double> y(enc.d);
  for (std::size_t r = 0; r < inputs.rows(); ++r) {
    const double* x = inputs.flat_row(r);
    const double norm = project_row(enc, x, y.data());
    const double* u = batch.flat_row(r);
    const double* g = gu.flat_row(r);
    double gdotu = 0.0;
    for (std::size_t a = 0; a < enc.d; ++a) gdotu += g[a] * u[a];
    // gy = (I - u u^T) g / ||Wx||, then dL/dW += gy x^T.
    for (std::size_t a = 0; a < enc.d; ++a) {
      const double gy = (g[a] - gdotu * u[a]) / norm;
      double* gwrow = gw.data() + a * enc.p;
      for (std::size_t b = 0; b < enc.p; ++b) gwrow[b] += gy * x[b];
    }
  }
  return gw;
}

}  // namespace mvcl
