#include "mvcl/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "mvcl/errors.hpp"
#include "mvcl/rng.hpp"
#include "mvcl/sampling.hpp"
#include "mvcl/summation.hpp"
#include "mvcl/tensor.hpp"

namespace mvcl {

namespace {

constexpr std::uint64_t kPairStreamTag = 0x706169727325ULL;

double dot(const double* a, const double* b, std::size_t d) {
  double s = 0.0;
  for (std::size_t k = 0; k < d; ++k) s += a[k] * b[k];
  return s;
}

}  // namespace

AsymptoticEstimate asymptotic_formula_mc(const std::vector<double>& samples,
                                         std::size_t d, double tau,
                                         std::size_t pair_draws,
                                         std::uint64_t seed,
                                         PositiveMode mode) {
  if (d == 0 || samples.empty() || samples.size() % d != 0) {
    throw Error(ErrorCode::InvalidShape,
                "sample buffer must hold a whole number of length-d rows");
  }
  const std::size_t count = samples.size() / d;
  if (count < 2) {
    throw Error(ErrorCode::TooFewSamples,
                "the nested average needs at least two samples");
  }
  if (!(tau >= 1e-3)) {
    throw Error(ErrorCode::BadParameter, "tau must be >= 1e-3");
  }
  if (pair_draws == 0) {
    throw Error(ErrorCode::BadParameter, "pair_draws must be >= 1");
  }
  for (std::size_t i = 0; i < count; ++i) {
    const double sq = dot(&samples[i * d], &samples[i * d], d);
    if (!std::isfinite(sq) || std::abs(sq - 1.0) > 2e-6) {
      throw Error(ErrorCode::NotUnitNorm, "samples must be unit vectors");
    }
  }

  AsymptoticEstimate out;

  std::vector<double> buf;
  if (mode == PositiveMode::PerfectAlignment) {
    buf.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      buf[i] = -dot(&samples[i * d], &samples[i * d], d) / tau;
    }
    out.first_term = pairwise_sum(buf.data(), count) /
                     static_cast<double>(count);
  } else {
    Rng rng(derive_stream(seed, kPairStreamTag));
    buf.resize(pair_draws);
    for (std::size_t k = 0; k < pair_draws; ++k) {
      const auto pick = [&]() {
        const double r = rng.uniform01() * static_cast<double>(count);
        return std::min(count - 1, static_cast<std::size_t>(r));
      };
      const std::size_t a = pick();
      const std::size_t b = pick();
      buf[k] = -dot(&samples[a * d], &samples[b * d], d) / tau;
    }
    out.first_term = pairwise_sum(buf.data(), pair_draws) /
                     static_cast<double>(pair_draws);
  }

  // E_v[log E_u[...]] with the inner mean over all samples, v included.
  std::vector<double> scores(count);
  std::vector<double> expbuf(count);
  std::vector<double> outer(count);
  for (std::size_t v = 0; v < count; ++v) {
    const double* pv = &samples[v * d];
    double mx = -1.0 / 0.0;
    for (std::size_t u = 0; u < count; ++u) {
      scores[u] = dot(pv, &samples[u * d], d) / tau;
      mx = std::max(mx, scores[u]);
    }
    for (std::size_t u = 0; u < count; ++u) {
      expbuf[u] = std::exp(scores[u] - mx);
    }
    outer[v] = mx + std::log(pairwise_sum(expbuf.data(), count)) -
               std::log(static_cast<double>(count));
  }
  out.second_term = pairwise_sum(outer.data(), count) /
                    static_cast<double>(count);
  out.total = out.first_term + out.second_term;
  return out;
}

double normalized_uniformity_gap(LossName name, std::size_t m, std::size_t n,
                                 std::size_t d, double tau,
                                 std::uint64_t seed) {
  if (name != LossName::MvInfoNce && name != LossName::MvDhel) {
    throw Error(ErrorCode::BadParameter,
                "gap probe supports mv-infonce and mv-dhel only");
  }
  if (m < 4) {
    throw Error(ErrorCode::BadParameter, "gap probe needs m >= 4");
  }
  const Tensor3 anchors = sample_uniform_sphere(m, 1, d, seed);
  Tensor3 batch(m, n, d);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t l = 0; l < n; ++l) {
      std::memcpy(batch.row(i, l), anchors.row(i, 0), d * sizeof(double));
    }
  }
  const LossBreakdown bd = evaluate(LossSpec{name, tau}, batch);
  double normalized;
  if (name == LossName::MvInfoNce) {
    normalized = bd.uniformity_term -
                 std::log(static_cast<double>(m - 1)) -
                 std::log(static_cast<double>(n * (n - 1)));
  } else {
    normalized = bd.uniformity_term / static_cast<double>(n) -
                 std::log(static_cast<double>(m - 1));
  }
  const AsymptoticEstimate est =
      asymptotic_formula_mc(anchors.data, d, tau, 1, seed);
  return std::abs(normalized - est.second_term);
}

}  // namespace mvcl
