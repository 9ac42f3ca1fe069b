#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mvcl/losses.hpp"
#include "mvcl/tensor.hpp"

namespace mvcl {

struct OptConfig {
  std::size_t steps = 1000;
  double learning_rate = 0.25;  // default 0.5 * tau; see default_opt_config
  double momentum = 0.0;
  double tolerance_grad_norm = 1e-8;
  std::uint64_t seed = 0;
  std::size_t log_every = 1;
};

// Config with the learning rate tied to the temperature. The gradient scale
// of every loss here is O(1/tau), so 0.5 * tau keeps the effective step
// size roughly temperature-independent.
OptConfig default_opt_config(double tau);

struct OptRecord {
  std::size_t step = 0;
  double loss = 0.0;
  double alignment = 0.0;
  double uniformity = 0.0;   // second-moment deviation from I/d
  double grad_norm = 0.0;    // max row norm of the tangent gradient
};

struct OptTrace {
  std::vector<OptRecord> records;
};

struct OptResult {
  ViewBatch final;
  OptTrace trace;
};

// Projected gradient descent over the product of unit spheres: heavy-ball
// momentum on the tangent gradient, re-normalization retraction, naive
// transport (the velocity is re-projected onto the new tangent space after
// each update). Records at step 0, every log_every steps, and at the last
// evaluated step; stops early once the max tangent gradient row norm drops
// below tolerance_grad_norm. Deterministic given (spec, init, cfg). Throws
// Diverged if the loss leaves the finite range.
OptResult optimize(const LossSpec& spec, const ViewBatch& init,
                   const OptConfig& cfg);

}  // namespace mvcl
