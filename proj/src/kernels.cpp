#include "mvcl/kernels.hpp"

#include <cmath>

namespace mvcl {

namespace {

void check_params(const Kernel& kernel) {
  switch (kernel.family) {
    case KernelFamily::GaussianCl:
      if (!(kernel.tau > 0.0)) {
        throw Error(ErrorCode::BadParameter, "gaussian-cl requires tau > 0");
      }
      return;
    case KernelFamily::GaussianT:
      if (!(kernel.t > 0.0)) {
        throw Error(ErrorCode::BadParameter, "gaussian-t requires t > 0");
      }
      return;
    case KernelFamily::Logarithmic:
      if (!(kernel.s > 0.0) || !(kernel.beta > 0.0)) {
        throw Error(ErrorCode::BadParameter,
                    "logarithmic requires s > 0 and beta > 0");
      }
      return;
  }
}

void check_domain(double x) {
  if (!(x >= 0.0) || x > 4.0 + 1e-9) {
    throw Error(ErrorCode::OutOfDomain,
                "squared distance outside [0, 4]: " + std::to_string(x));
  }
}

}  // namespace

Kernel Kernel::gaussian_cl(double tau) {
  Kernel k;
  k.family = KernelFamily::GaussianCl;
  k.tau = tau;
  return k;
}

Kernel Kernel::gaussian_t(double t) {
  Kernel k;
  k.family = KernelFamily::GaussianT;
  k.t = t;
  return k;
}

Kernel Kernel::logarithmic(double s, double beta) {
  Kernel k;
  k.family = KernelFamily::Logarithmic;
  k.s = s;
  k.beta = beta;
  return k;
}

double kappa(const Kernel& kernel, double x) {
  check_params(kernel);
  check_domain(x);
  switch (kernel.family) {
    case KernelFamily::GaussianCl:
      return std::exp((2.0 - x) / (2.0 * kernel.tau));
    case KernelFamily::GaussianT:
      return std::exp(-kernel.t * x);
    case KernelFamily::Logarithmic:
      return -0.5 * std::log(kernel.s * x + kernel.beta);
  }
  throw Error(ErrorCode::BadParameter, "unknown kernel family");
}

double kappa_prime(const Kernel& kernel, double x) {
  check_params(kernel);
  check_domain(x);
  switch (kernel.family) {
    case KernelFamily::GaussianCl:
      return -std::exp((2.0 - x) / (2.0 * kernel.tau)) / (2.0 * kernel.tau);
    case KernelFamily::GaussianT:
      return -kernel.t * std::exp(-kernel.t * x);
    case KernelFamily::Logarithmic:
      return -kernel.s / (2.0 * (kernel.s * x + kernel.beta));
  }
  throw Error(ErrorCode::BadParameter, "unknown kernel family");
}

KernelValueGrad kernel_value_and_grad(const Kernel& kernel, const double* u,
                                      const double* v, std::size_t d) {
  double nu = 0.0;
  double nv = 0.0;
  double x = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    nu += u[k] * u[k];
    nv += v[k] * v[k];
    const double diff = u[k] - v[k];
    x += diff * diff;
  }
  if (std::abs(std::sqrt(nu) - 1.0) > 1e-6 ||
      std::abs(std::sqrt(nv) - 1.0) > 1e-6) {
    throw Error(ErrorCode::NotUnitNorm,
                "kernel_value_and_grad requires unit vectors");
  }
  KernelValueGrad out;
  out.value = kappa(kernel, x);
  const double kp = kappa_prime(kernel, x);
  out.grad_u.resize(d);
  for (std::size_t k = 0; k < d; ++k) out.grad_u[k] = kp * 2.0 * (u[k] - v[k]);
  return out;
}

}  // namespace mvcl
