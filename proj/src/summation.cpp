#include "mvcl/summation.hpp"

namespace mvcl {

double pairwise_sum(const double* x, std::size_t count) {
  if (count <= 16) {
    double acc = 0.0;
    for (std::size_t k = 0; k < count; ++k) acc += x[k];
    return acc;
  }
  const std::size_t half = count / 2;
  return pairwise_sum(x, half) + pairwise_sum(x + half, count - half);
}

}  // namespace mvcl
