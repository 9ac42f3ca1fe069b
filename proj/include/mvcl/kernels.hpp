#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mvcl/errors.hpp"

namespace mvcl {

enum class KernelFamily { GaussianCl, GaussianT, Logarithmic };

// Scalar kernels of the squared chord distance x = |u - v|^2, x in [0, 4]:
//   gaussian-cl(tau):    kappa(x) = exp((2 - x) / (2 tau))
//   gaussian-t(t):       kappa(x) = exp(-t x)
//   logarithmic(s, beta): kappa(x) = -1/2 log(s x + beta)
// On the unit sphere gaussian-cl satisfies kappa(|u-v|^2) = exp(u.v / tau)
// exactly, which ties the energy oracles to the loss terms.
struct Kernel {
  KernelFamily family = KernelFamily::GaussianCl;
  double tau = 0.5;   // gaussian-cl
  double t = 2.0;     // gaussian-t
  double s = 1.0;     // logarithmic
  double beta = 1.0;  // logarithmic

  static Kernel gaussian_cl(double tau);
  static Kernel gaussian_t(double t);
  static Kernel logarithmic(double s, double beta);
};

double kappa(const Kernel& kernel, double x);
double kappa_prime(const Kernel& kernel, double x);

struct KernelValueGrad {
  double value = 0.0;
  std::vector<double> grad_u;  // d/du kappa(|u-v|^2) = kappa'(x) * 2(u - v)
};

// Requires |u| = |v| = 1 within 1e-6.
KernelValueGrad kernel_value_and_grad(const Kernel& kernel, const double* u,
                                      const double* v, std::size_t d);

}  // namespace mvcl
