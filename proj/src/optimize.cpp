#include "mvcl/optimize.hpp"

#include <cmath>
#include <cstddef>

#include "mvcl/errors.hpp"
#include "mvcl/gradcheck.hpp"
#include "mvcl/metrics.hpp"

namespace mvcl {

namespace {

void validate_config(const OptConfig& cfg) {
  if (cfg.steps < 1) {
    throw Error(ErrorCode::BadParameter, "steps must be >= 1");
  }
  if (!(cfg.learning_rate > 0.0)) {
    throw Error(ErrorCode::BadParameter, "learning_rate must be > 0");
  }
  if (!(cfg.momentum >= 0.0 && cfg.momentum < 1.0)) {
    throw Error(ErrorCode::BadParameter, "momentum must lie in [0, 1)");
  }
  if (!(cfg.tolerance_grad_norm >= 0.0)) {
    throw Error(ErrorCode::BadParameter,
                "tolerance_grad_norm must be >= 0");
  }
  if (cfg.log_every < 1) {
    throw Error(ErrorCode::BadParameter, "log_every must be >= 1");
  }
}

double max_row_norm(const Tensor3& t) {
  double mx = 0.0;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const double* row = t.flat_row(r);
    double sq = 0.0;
    for (std::size_t k = 0; k < t.d; ++k) sq += row[k] * row[k];
    mx = std::max(mx, std::sqrt(sq));
  }
  return mx;
}

}  // namespace

OptConfig default_opt_config(double tau) {
  OptConfig cfg;
  cfg.learning_rate = 0.5 * tau;
  return cfg;
}

OptResult optimize(const LossSpec& spec, const ViewBatch& init,
                   const OptConfig& cfg) {
  validate_config(cfg);
  OptResult out{init, {}};
  ViewBatch& u = out.final;
  Tensor3 velocity(u.m, u.n, u.d);

  const auto record = [&](std::size_t step, double loss, double gnorm) {
    OptRecord r;
    r.step = step;
    r.loss = loss;
    r.alignment = alignment_metric(u);
    r.uniformity = uniformity_moment(u);
    r.grad_norm = gnorm;
    out.trace.records.push_back(r);
  };

  for (std::size_t step = 0;; ++step) {
    const LossBreakdown bd = evaluate(spec, u);
    if (!std::isfinite(bd.total)) {
      throw Error(ErrorCode::Diverged, "loss left the finite range");
    }
    const Tensor3 grad =
        tangent_project(euclidean_gradient(spec, u), u);
    const double gnorm = max_row_norm(grad);

    const bool stopping =
        step == cfg.steps || gnorm < cfg.tolerance_grad_norm;
    if (step % cfg.log_every == 0 || stopping) record(step, bd.total, gnorm);
    if (stopping) break;

    for (std::size_t k = 0; k < velocity.data.size(); ++k) {
      velocity.data[k] = cfg.momentum * velocity.data[k] + grad.data[k];
    }
    Tensor3 next(u.m, u.n, u.d);
    for (std::size_t k = 0; k < next.data.size(); ++k) {
      next.data[k] = u.data[k] - cfg.learning_rate * velocity.data[k];
    }
    u = normalize(next);
    velocity = tangent_project(velocity, u);
  }
  return out;
}

}  // namespace mvcl
