#pragma once

#include <cstdint>

#include "mvcl/tensor.hpp"

namespace mvcl {

struct SamplerConfig {
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t d = 0;
  double concentration = 0.0;
  std::uint64_t seed = 0;
};

// m*n i.i.d. rows uniform on S^{d-1} (gaussian draws, normalized). Each
// instance consumes its own substream derived from the seed, so the batch is
// reproducible bit-for-bit and independent of generation order.
ViewBatch sample_uniform_sphere(std::size_t m, std::size_t n, std::size_t d,
                                std::uint64_t seed);

// Anchor per instance uniform on the sphere; each view is
// normalize(anchor + gaussian / sqrt(concentration)). concentration = 0 gives
// views that are fresh uniform draws, independent of the anchor.
ViewBatch sample_multiview(const SamplerConfig& cfg);

}  // namespace mvcl
