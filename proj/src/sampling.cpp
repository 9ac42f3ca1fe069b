#include "mvcl/sampling.hpp"

#include <cmath>

#include "mvcl/rng.hpp"

namespace mvcl {

namespace {

void check_shape(std::size_t m, std::size_t n, std::size_t d) {
  if (m == 0 || n == 0 || d == 0) {
    throw Error(ErrorCode::InvalidShape, "m, n, d must all be >= 1");
  }
}

// Unit vector from d gaussian draws; redraws on the (measure-zero) event of a
// numerically zero vector so the output stream stays deterministic.
void unit_gaussian_row(Rng& rng, std::size_t d, double* out) {
  for (;;) {
    double norm_sq = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      out[k] = rng.gaussian();
      norm_sq += out[k] * out[k];
    }
    if (norm_sq > 1e-24) {
      const double inv = 1.0 / std::sqrt(norm_sq);
      for (std::size_t k = 0; k < d; ++k) out[k] *= inv;
      return;
    }
  }
}

}  // namespace

ViewBatch sample_uniform_sphere(std::size_t m, std::size_t n, std::size_t d,
                                std::uint64_t seed) {
  check_shape(m, n, d);
  ViewBatch batch(m, n, d);
  for (std::size_t i = 0; i < m; ++i) {
    Rng rng(derive_stream(seed, i));
    for (std::size_t l = 0; l < n; ++l) unit_gaussian_row(rng, d, batch.row(i, l));
  }
  return batch;
}

ViewBatch sample_multiview(const SamplerConfig& cfg) {
  check_shape(cfg.m, cfg.n, cfg.d);
  if (cfg.concentration < 0.0) {
    throw Error(ErrorCode::NegativeConcentration,
                "concentration must be >= 0");
  }
  ViewBatch batch(cfg.m, cfg.n, cfg.d);
  std::vector<double> anchor(cfg.d);
  const bool independent = cfg.concentration == 0.0;
  const double noise_scale =
      independent ? 0.0 : 1.0 / std::sqrt(cfg.concentration);
  for (std::size_t i = 0; i < cfg.m; ++i) {
    Rng rng(derive_stream(cfg.seed, i));
    unit_gaussian_row(rng, cfg.d, anchor.data());
    for (std::size_t l = 0; l < cfg.n; ++l) {
      double* row = batch.row(i, l);
      if (independent) {
        unit_gaussian_row(rng, cfg.d, row);
        continue;
      }
      for (;;) {
        double norm_sq = 0.0;
        for (std::size_t k = 0; k < cfg.d; ++k) {
          row[k] = anchor[k] + noise_scale * rng.gaussian();
          norm_sq += row[k] * row[k];
        }
        if (norm_sq > 1e-24) {
          const double inv = 1.0 / std::sqrt(norm_sq);
          for (std::size_t k = 0; k < cfg.d; ++k) row[k] *= inv;
          break;
        }
        // Noise cancelled the anchor (possible for tiny concentration): redraw.
      }
    }
  }
  return batch;
}

}  // namespace mvcl
