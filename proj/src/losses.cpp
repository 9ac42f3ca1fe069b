#include "mvcl/losses.hpp"

#include <cmath>
#include <vector>

#include "mvcl/simd.hpp"
#include "mvcl/summation.hpp"

namespace mvcl {

namespace {

constexpr double kMinTau = 1e-3;

struct Workspace {
  std::vector<double> dots;      // query . row for a block of rows
  std::vector<double> scores;    // scaled scores feeding one log-sum
  std::vector<double> expbuf;    // stabilized exponentials
  std::vector<double> weights;   // softmax weights (gradient path)
  std::vector<double> terms_a;   // per-term alignment contributions
  std::vector<double> terms_u;   // per-term uniformity contributions
  std::vector<double> stack;     // stacked row storage for pair losses
  std::vector<double> stack2;
  std::vector<double> ga;        // pair-loss gradient accumulators
  std::vector<double> gb;
};

void validate_free(const LossSpec& spec, const ViewBatch& batch) {
  if (!(spec.tau >= kMinTau)) {
    throw Error(ErrorCode::BadParameter,
                "tau must be >= 1e-3 (exponent magnitudes stay bounded)");
  }
  if (batch.n < 2) {
    throw Error(ErrorCode::WrongViewCount, "losses require n >= 2");
  }
  if ((spec.name == LossName::NtXent || spec.name == LossName::Dhel) &&
      batch.n != 2) {
    throw Error(ErrorCode::WrongViewCount,
                std::string(to_string(spec.name)) + " requires exactly n = 2");
  }
  const bool excludes_self =
      spec.name == LossName::Dhel || spec.name == LossName::Pvc ||
      spec.name == LossName::MvDhel || spec.name == LossName::MvCl2;
  if (excludes_self && batch.m < 2) {
    throw Error(ErrorCode::TooFewInstances,
                std::string(to_string(spec.name)) +
                    " has an empty negative set at m = 1");
  }
}

void validate(const LossSpec& spec, const ViewBatch& batch) {
  require_unit_rows(batch, 1e-6);
  validate_free(spec, batch);
}

// log sum_k exp(s_k), max-subtracted, pairwise-tree reduction. Every call
// evaluates exactly k exponentials; the counter is the instrumented
// kernel-evaluation count surfaced in LossBreakdown.
double log_sum_exp(const double* s, std::size_t k, std::vector<double>& expbuf,
                   std::int64_t& evals) {
  double mx = s[0];
  for (std::size_t i = 1; i < k; ++i) mx = std::max(mx, s[i]);
  expbuf.resize(k);
  for (std::size_t i = 0; i < k; ++i) expbuf[i] = std::exp(s[i] - mx);
  evals += static_cast<std::int64_t>(k);
  return mx + std::log(pairwise_sum(expbuf.data(), k));
}

void softmax(const double* s, std::size_t k, std::vector<double>& w) {
  double mx = s[0];
  for (std::size_t i = 1; i < k; ++i) mx = std::max(mx, s[i]);
  w.resize(k);
  for (std::size_t i = 0; i < k; ++i) w[i] = std::exp(s[i] - mx);
  const double sum = pairwise_sum(w.data(), k);
  for (std::size_t i = 0; i < k; ++i) w[i] /= sum;
}

inline void axpy(double* dst, double c, const double* src, std::size_t d) {
  for (std::size_t k = 0; k < d; ++k) dst[k] += c * src[k];
}

// Gathers view l into a contiguous m x d block.
void gather_view(const ViewBatch& batch, std::size_t l, std::vector<double>& out) {
  out.resize(batch.m * batch.d);
  for (std::size_t i = 0; i < batch.m; ++i) {
    const double* src = batch.row(i, l);
    std::copy(src, src + batch.d, out.begin() + i * batch.d);
  }
}

// ---------------------------------------------------------------------------
// Symmetrized two-matrix nt-xent, the base loss for nt-xent itself and the
// pwe / avg compositions. Anchors run over the rows of both inputs; the
// denominator for an anchor is every stacked row except the anchor itself
// (positive included).
// ---------------------------------------------------------------------------

struct PairTerms {
  double align = 0.0;
  double unif = 0.0;
};

PairTerms eval_pair_ntxent(const double* a, const double* b, std::size_t m,
                           std::size_t d, double tau, Workspace& ws,
                           std::int64_t& evals_unif) {
  const std::size_t rows = 2 * m;
  ws.stack.resize(rows * d);
  std::copy(a, a + m * d, ws.stack.begin());
  std::copy(b, b + m * d, ws.stack.begin() + m * d);
  ws.dots.resize(rows);
  ws.scores.resize(rows);
  ws.terms_a.resize(rows);
  ws.terms_u.resize(rows);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t side = 0; side < 2; ++side) {
      const double* anchor = (side == 0 ? a : b) + i * d;
      const std::size_t self = side == 0 ? i : m + i;
      const std::size_t pos = side == 0 ? m + i : i;
      simd::dots(anchor, ws.stack.data(), rows, d, ws.dots.data());
      ws.terms_a[i * 2 + side] = -ws.dots[pos] / tau;
      std::size_t k = 0;
      for (std::size_t r = 0; r < rows; ++r) {
        if (r != self) ws.scores[k++] = ws.dots[r] / tau;
      }
      ws.terms_u[i * 2 + side] = log_sum_exp(ws.scores.data(), k, ws.expbuf,
                                             evals_unif);
    }
  }
  PairTerms out;
  out.align = pairwise_sum(ws.terms_a.data(), rows) / static_cast<double>(rows);
  out.unif = pairwise_sum(ws.terms_u.data(), rows) / static_cast<double>(rows);
  return out;
}

// Accumulates scale * d(pair loss)/d(a rows) into ga and likewise into gb.
void grad_pair_ntxent(const double* a, const double* b, std::size_t m,
                      std::size_t d, double tau, double scale, LossPart part,
                      Workspace& ws, double* ga, double* gb) {
  const std::size_t rows = 2 * m;
  ws.stack.resize(rows * d);
  std::copy(a, a + m * d, ws.stack.begin());
  std::copy(b, b + m * d, ws.stack.begin() + m * d);
  ws.dots.resize(rows);
  ws.scores.resize(rows);
  const double c = scale / (2.0 * static_cast<double>(m) * tau);
  auto grad_row = [&](std::size_t r) {
    return r < m ? ga + r * d : gb + (r - m) * d;
  };
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t side = 0; side < 2; ++side) {
      const double* anchor = (side == 0 ? a : b) + i * d;
      const std::size_t self = side == 0 ? i : m + i;
      const std::size_t pos = side == 0 ? m + i : i;
      double* ganchor = grad_row(self);
      simd::dots(anchor, ws.stack.data(), rows, d, ws.dots.data());
      if (part != LossPart::Uniformity) {
        axpy(ganchor, -c, ws.stack.data() + pos * d, d);
        axpy(grad_row(pos), -c, anchor, d);
      }
      if (part != LossPart::Alignment) {
        std::size_t k = 0;
        for (std::size_t r = 0; r < rows; ++r) {
          if (r != self) ws.scores[k++] = ws.dots[r] / tau;
        }
        softmax(ws.scores.data(), k, ws.weights);
        k = 0;
        for (std::size_t r = 0; r < rows; ++r) {
          if (r == self) continue;
          const double w = c * ws.weights[k++];
          axpy(ganchor, w, ws.stack.data() + r * d, d);
          axpy(grad_row(r), w, anchor, d);
        }
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Per-loss evaluation. Outer reductions collect one contribution per term in
// the canonical (i, l, j, m) order and reduce with pairwise_sum.
// ---------------------------------------------------------------------------

struct EvalParts {
  double align = 0.0;
  double unif = 0.0;
  std::int64_t evals_align = 0;
  std::int64_t evals_unif = 0;
};

EvalParts eval_nt_xent(const ViewBatch& u, double tau, Workspace& ws) {
  EvalParts out;
  gather_view(u, 0, ws.stack2);
  std::vector<double> b;
  gather_view(u, 1, b);
  const PairTerms pair =
      eval_pair_ntxent(ws.stack2.data(), b.data(), u.m, u.d, tau, ws,
                       out.evals_unif);
  out.align = pair.align;
  out.unif = pair.unif;
  return out;
}

EvalParts eval_dhel(const ViewBatch& u, double tau, Workspace& ws) {
  EvalParts out;
  const std::size_t m = u.m;
  std::vector<double> views[2];
  gather_view(u, 0, views[0]);
  gather_view(u, 1, views[1]);
  ws.dots.resize(m);
  ws.scores.resize(m);
  ws.terms_a.resize(2 * m);
  ws.terms_u.resize(2 * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t l = 0; l < 2; ++l) {
      const double* anchor = u.row(i, l);
      ws.terms_a[i * 2 + l] = -simd::dot(anchor, u.row(i, 1 - l), u.d) / tau;
      simd::dots(anchor, views[l].data(), m, u.d, ws.dots.data());
      std::size_t k = 0;
      for (std::size_t j = 0; j < m; ++j) {
        if (j != i) ws.scores[k++] = ws.dots[j] / tau;
      }
      ws.terms_u[i * 2 + l] =
          log_sum_exp(ws.scores.data(), k, ws.expbuf, out.evals_unif);
    }
  }
  out.align = pairwise_sum(ws.terms_a.data(), 2 * m) / (2.0 * m);
  out.unif = pairwise_sum(ws.terms_u.data(), 2 * m) / (2.0 * m);
  return out;
}

EvalParts eval_pwe(const ViewBatch& u, double tau, Workspace& ws) {
  EvalParts out;
  const std::size_t n = u.n;
  std::vector<double> va;
  std::vector<double> vb;
  std::vector<double> pair_align;
  std::vector<double> pair_unif;
  pair_align.reserve(n * (n - 1) / 2);
  pair_unif.reserve(n * (n - 1) / 2);
  for (std::size_t la = 0; la < n; ++la) {
    for (std::size_t lb = la + 1; lb < n; ++lb) {
      gather_view(u, la, va);
      gather_view(u, lb, vb);
      const PairTerms pair = eval_pair_ntxent(va.data(), vb.data(), u.m, u.d,
                                              tau, ws, out.evals_unif);
      pair_align.push_back(pair.align);
      pair_unif.push_back(pair.unif);
    }
  }
  const double scale = 2.0 / (static_cast<double>(n) * (n - 1));
  out.align = scale * pairwise_sum(pair_align.data(), pair_align.size());
  out.unif = scale * pairwise_sum(pair_unif.data(), pair_unif.size());
  return out;
}

// Mean of the other views per instance, not re-normalized.
void mean_other_views(const ViewBatch& u, std::size_t l, std::vector<double>& out) {
  out.assign(u.m * u.d, 0.0);
  const double inv = 1.0 / static_cast<double>(u.n - 1);
  for (std::size_t i = 0; i < u.m; ++i) {
    for (std::size_t mm = 0; mm < u.n; ++mm) {
      if (mm == l) continue;
      const double* src = u.row(i, mm);
      for (std::size_t k = 0; k < u.d; ++k) out[i * u.d + k] += inv * src[k];
    }
  }
}

EvalParts eval_avg(const ViewBatch& u, double tau, Workspace& ws) {
  EvalParts out;
  const std::size_t n = u.n;
  std::vector<double> va;
  std::vector<double> means;
  std::vector<double> per_l_align(n);
  std::vector<double> per_l_unif(n);
  for (std::size_t l = 0; l < n; ++l) {
    gather_view(u, l, va);
    mean_other_views(u, l, means);
    const PairTerms pair = eval_pair_ntxent(va.data(), means.data(), u.m, u.d,
                                            tau, ws, out.evals_unif);
    per_l_align[l] = pair.align;
    per_l_unif[l] = pair.unif;
  }
  out.align = pairwise_sum(per_l_align.data(), n) / static_cast<double>(n);
  out.unif = pairwise_sum(per_l_unif.data(), n) / static_cast<double>(n);
  return out;
}

EvalParts eval_pvc(const ViewBatch& u, double tau, Workspace& ws) {
  EvalParts out;
  const std::size_t m = u.m;
  const std::size_t n = u.n;
  const std::size_t rows = m * n;
  const std::size_t terms = m * n * (n - 1);
  ws.dots.resize(rows);
  ws.scores.resize(1 + (m - 1) * n);
  ws.terms_a.resize(terms);
  ws.terms_u.resize(terms);
  std::size_t idx = 0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t l = 0; l < n; ++l) {
      const double* anchor = u.row(i, l);
      simd::dots(anchor, u.data.data(), rows, u.d, ws.dots.data());
      for (std::size_t lp = 0; lp < n; ++lp) {
        if (lp == l) continue;
        const double pos = ws.dots[i * n + lp] / tau;
        ws.terms_a[idx] = -pos;
        // Denominator: the positive plus every cross-instance row, in the
        // written order (positive first, then j-major).
        std::size_t k = 0;
        ws.scores[k++] = pos;
        for (std::size_t j = 0; j < m; ++j) {
          if (j == i) continue;
          for (std::size_t mm = 0; mm < n; ++mm) {
            ws.scores[k++] = ws.dots[j * n + mm] / tau;
          }
        }
        ws.terms_u[idx] =
            log_sum_exp(ws.scores.data(), k, ws.expbuf, out.evals_unif);
        ++idx;
      }
    }
  }
  const double scale = 1.0 / (static_cast<double>(m) * (n - 1));
  out.align = scale * pairwise_sum(ws.terms_a.data(), terms);
  out.unif = scale * pairwise_sum(ws.terms_u.data(), terms);
  return out;
}

// Shared by mv-infonce and mv-dhel: per-instance alignment with all ordered
// positive pairs inside one log.
double instance_alignment(const ViewBatch& u, std::size_t i, double tau,
                          Workspace& ws, std::int64_t& evals) {
  const std::size_t n = u.n;
  ws.scores.resize(n * (n - 1));
  std::size_t k = 0;
  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t lp = 0; lp < n; ++lp) {
      if (lp == l) continue;
      ws.scores[k++] = simd::dot(u.row(i, l), u.row(i, lp), u.d) / tau;
    }
  }
  return -log_sum_exp(ws.scores.data(), k, ws.expbuf, evals);
}

EvalParts eval_mv_infonce(const ViewBatch& u, double tau, Workspace& ws) {
  EvalParts out;
  const std::size_t m = u.m;
  const std::size_t n = u.n;
  const std::size_t rows = m * n;
  ws.dots.resize(rows);
  std::vector<double> scores(n * m * (n - 1));
  ws.terms_a.resize(m);
  ws.terms_u.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    ws.terms_a[i] = instance_alignment(u, i, tau, ws, out.evals_align);
    std::size_t k = 0;
    for (std::size_t l = 0; l < n; ++l) {
      simd::dots(u.row(i, l), u.data.data(), rows, u.d, ws.dots.data());
      for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t mm = 0; mm < n; ++mm) {
          if (mm != l) scores[k++] = ws.dots[j * n + mm] / tau;
        }
      }
    }
    ws.terms_u[i] = log_sum_exp(scores.data(), k, ws.expbuf, out.evals_unif);
  }
  out.align = pairwise_sum(ws.terms_a.data(), m) / static_cast<double>(m);
  out.unif = pairwise_sum(ws.terms_u.data(), m) / static_cast<double>(m);
  return out;
}

EvalParts eval_mv_dhel(const ViewBatch& u, double tau, Workspace& ws) {
  EvalParts out;
  const std::size_t m = u.m;
  const std::size_t n = u.n;
  ws.terms_a.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    ws.terms_a[i] = instance_alignment(u, i, tau, ws, out.evals_align);
  }
  out.align = pairwise_sum(ws.terms_a.data(), m) / static_cast<double>(m);
  ws.terms_u.resize(m * n);
  ws.dots.resize(m);
  ws.scores.resize(m);
  std::vector<double> view;
  for (std::size_t l = 0; l < n; ++l) {
    gather_view(u, l, view);
    for (std::size_t i = 0; i < m; ++i) {
      simd::dots(u.row(i, l), view.data(), m, u.d, ws.dots.data());
      std::size_t k = 0;
      for (std::size_t j = 0; j < m; ++j) {
        if (j != i) ws.scores[k++] = ws.dots[j] / tau;
      }
      ws.terms_u[i * n + l] =
          log_sum_exp(ws.scores.data(), k, ws.expbuf, out.evals_unif);
    }
  }
  out.unif = pairwise_sum(ws.terms_u.data(), m * n) / static_cast<double>(m);
  return out;
}

// mv-cl1 / mv-cl2: anchor-view sum outside the log on both sides, prefactor
// 1/(n m) per the inside/outside decomposition the losses are assembled from.
EvalParts eval_mv_cl(const ViewBatch& u, double tau, bool dhel_negatives,
                     Workspace& ws) {
  EvalParts out;
  const std::size_t m = u.m;
  const std::size_t n = u.n;
  const std::size_t rows = m * n;
  ws.dots.resize(rows);
  ws.scores.resize(m * (n - 1) + n);
  ws.terms_a.resize(m * n);
  ws.terms_u.resize(m * n);
  std::vector<double> view;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t l = 0; l < n; ++l) {
      const double* anchor = u.row(i, l);
      std::size_t k = 0;
      for (std::size_t lp = 0; lp < n; ++lp) {
        if (lp == l) continue;
        ws.scores[k++] = simd::dot(anchor, u.row(i, lp), u.d) / tau;
      }
      ws.terms_a[i * n + l] =
          -log_sum_exp(ws.scores.data(), k, ws.expbuf, out.evals_align);
      k = 0;
      if (dhel_negatives) {
        for (std::size_t j = 0; j < m; ++j) {
          if (j != i) {
            ws.scores[k++] = simd::dot(anchor, u.row(j, l), u.d) / tau;
          }
        }
      } else {
        simd::dots(anchor, u.data.data(), rows, u.d, ws.dots.data());
        for (std::size_t j = 0; j < m; ++j) {
          for (std::size_t mm = 0; mm < n; ++mm) {
            if (mm != l) ws.scores[k++] = ws.dots[j * n + mm] / tau;
          }
        }
      }
      ws.terms_u[i * n + l] =
          log_sum_exp(ws.scores.data(), k, ws.expbuf, out.evals_unif);
    }
  }
  const double scale = 1.0 / (static_cast<double>(n) * m);
  out.align = scale * pairwise_sum(ws.terms_a.data(), m * n);
  out.unif = scale * pairwise_sum(ws.terms_u.data(), m * n);
  return out;
}

// ---------------------------------------------------------------------------
// Gradients. Each mirrors its evaluator's loops with softmax weights in place
// of log-sums; verified against central finite differences.
// ---------------------------------------------------------------------------

void grad_nt_xent(const ViewBatch& u, double tau, LossPart part, Workspace& ws,
                  Tensor3& g) {
  std::vector<double> va;
  std::vector<double> vb;
  gather_view(u, 0, va);
  gather_view(u, 1, vb);
  ws.ga.assign(u.m * u.d, 0.0);
  ws.gb.assign(u.m * u.d, 0.0);
  grad_pair_ntxent(va.data(), vb.data(), u.m, u.d, tau, 1.0, part, ws,
                   ws.ga.data(), ws.gb.data());
  for (std::size_t i = 0; i < u.m; ++i) {
    axpy(g.row(i, 0), 1.0, ws.ga.data() + i * u.d, u.d);
    axpy(g.row(i, 1), 1.0, ws.gb.data() + i * u.d, u.d);
  }
}

void grad_dhel(const ViewBatch& u, double tau, LossPart part, Workspace& ws,
               Tensor3& g) {
  const std::size_t m = u.m;
  const double c = 1.0 / (2.0 * m * tau);
  std::vector<double> views[2];
  gather_view(u, 0, views[0]);
  gather_view(u, 1, views[1]);
  ws.dots.resize(m);
  ws.scores.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t l = 0; l < 2; ++l) {
      const double* anchor = u.row(i, l);
      if (part != LossPart::Uniformity) {
        axpy(g.row(i, l), -c, u.row(i, 1 - l), u.d);
        axpy(g.row(i, 1 - l), -c, anchor, u.d);
      }
      if (part != LossPart::Alignment) {
        simd::dots(anchor, views[l].data(), m, u.d, ws.dots.data());
        std::size_t k = 0;
        for (std::size_t j = 0; j < m; ++j) {
          if (j != i) ws.scores[k++] = ws.dots[j] / tau;
        }
        softmax(ws.scores.data(), k, ws.weights);
        k = 0;
        for (std::size_t j = 0; j < m; ++j) {
          if (j == i) continue;
          const double w = c * ws.weights[k++];
          axpy(g.row(i, l), w, u.row(j, l), u.d);
          axpy(g.row(j, l), w, anchor, u.d);
        }
      }
    }
  }
}

void grad_pwe(const ViewBatch& u, double tau, LossPart part, Workspace& ws,
              Tensor3& g) {
  const std::size_t n = u.n;
  const double scale = 2.0 / (static_cast<double>(n) * (n - 1));
  std::vector<double> va;
  std::vector<double> vb;
  for (std::size_t la = 0; la < n; ++la) {
    for (std::size_t lb = la + 1; lb < n; ++lb) {
      gather_view(u, la, va);
      gather_view(u, lb, vb);
      ws.ga.assign(u.m * u.d, 0.0);
      ws.gb.assign(u.m * u.d, 0.0);
      grad_pair_ntxent(va.data(), vb.data(), u.m, u.d, tau, scale, part, ws,
                       ws.ga.data(), ws.gb.data());
      for (std::size_t i = 0; i < u.m; ++i) {
        axpy(g.row(i, la), 1.0, ws.ga.data() + i * u.d, u.d);
        axpy(g.row(i, lb), 1.0, ws.gb.data() + i * u.d, u.d);
      }
    }
  }
}

void grad_avg(const ViewBatch& u, double tau, LossPart part, Workspace& ws,
              Tensor3& g) {
  const std::size_t n = u.n;
  const double scale = 1.0 / static_cast<double>(n);
  const double chain = 1.0 / static_cast<double>(n - 1);
  std::vector<double> va;
  std::vector<double> means;
  for (std::size_t l = 0; l < n; ++l) {
    gather_view(u, l, va);
    mean_other_views(u, l, means);
    ws.ga.assign(u.m * u.d, 0.0);
    ws.gb.assign(u.m * u.d, 0.0);
    grad_pair_ntxent(va.data(), means.data(), u.m, u.d, tau, scale, part, ws,
                     ws.ga.data(), ws.gb.data());
    for (std::size_t i = 0; i < u.m; ++i) {
      axpy(g.row(i, l), 1.0, ws.ga.data() + i * u.d, u.d);
      // The mean view is (1/(n-1)) sum of the other views; chain through it.
      for (std::size_t mm = 0; mm < n; ++mm) {
        if (mm != l) axpy(g.row(i, mm), chain, ws.gb.data() + i * u.d, u.d);
      }
    }
  }
}

void grad_pvc(const ViewBatch& u, double tau, LossPart part, Workspace& ws,
              Tensor3& g) {
  const std::size_t m = u.m;
  const std::size_t n = u.n;
  const std::size_t rows = m * n;
  const double c = 1.0 / (static_cast<double>(m) * (n - 1) * tau);
  ws.dots.resize(rows);
  ws.scores.resize(1 + (m - 1) * n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t l = 0; l < n; ++l) {
      const double* anchor = u.row(i, l);
      simd::dots(anchor, u.data.data(), rows, u.d, ws.dots.data());
      for (std::size_t lp = 0; lp < n; ++lp) {
        if (lp == l) continue;
        if (part != LossPart::Uniformity) {
          axpy(g.row(i, l), -c, u.row(i, lp), u.d);
          axpy(g.row(i, lp), -c, anchor, u.d);
        }
        if (part == LossPart::Alignment) continue;
        std::size_t k = 0;
        ws.scores[k++] = ws.dots[i * n + lp] / tau;
        for (std::size_t j = 0; j < m; ++j) {
          if (j == i) continue;
          for (std::size_t mm = 0; mm < n; ++mm) {
            ws.scores[k++] = ws.dots[j * n + mm] / tau;
          }
        }
        softmax(ws.scores.data(), k, ws.weights);
        const double wpos = c * ws.weights[0];
        axpy(g.row(i, l), wpos, u.row(i, lp), u.d);
        axpy(g.row(i, lp), wpos, anchor, u.d);
        k = 1;
        for (std::size_t j = 0; j < m; ++j) {
          if (j == i) continue;
          for (std::size_t mm = 0; mm < n; ++mm) {
            const double w = c * ws.weights[k++];
            axpy(g.row(i, l), w, u.row(j, mm), u.d);
            axpy(g.row(j, mm), w, anchor, u.d);
          }
        }
      }
    }
  }
}

// Gradient of -(1/m) log sum over ordered positive pairs, for instance i.
void grad_instance_alignment(const ViewBatch& u, std::size_t i, double tau,
                             Workspace& ws, Tensor3& g) {
  const std::size_t n = u.n;
  ws.scores.resize(n * (n - 1));
  std::size_t k = 0;
  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t lp = 0; lp < n; ++lp) {
      if (lp == l) continue;
      ws.scores[k++] = simd::dot(u.row(i, l), u.row(i, lp), u.d) / tau;
    }
  }
  softmax(ws.scores.data(), k, ws.weights);
  const double c = 1.0 / (static_cast<double>(u.m) * tau);
  k = 0;
  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t lp = 0; lp < n; ++lp) {
      if (lp == l) continue;
      const double w = c * ws.weights[k++];
      axpy(g.row(i, l), -w, u.row(i, lp), u.d);
      axpy(g.row(i, lp), -w, u.row(i, l), u.d);
    }
  }
}

void grad_mv_infonce(const ViewBatch& u, double tau, LossPart part,
                     Workspace& ws, Tensor3& g) {
  const std::size_t m = u.m;
  const std::size_t n = u.n;
  const std::size_t rows = m * n;
  const double c = 1.0 / (static_cast<double>(m) * tau);
  ws.dots.resize(rows);
  std::vector<double> scores(n * m * (n - 1));
  std::vector<double> alldots(n * rows);
  for (std::size_t i = 0; i < m; ++i) {
    if (part != LossPart::Uniformity) {
      grad_instance_alignment(u, i, tau, ws, g);
    }
    if (part == LossPart::Alignment) continue;
    std::size_t k = 0;
    for (std::size_t l = 0; l < n; ++l) {
      simd::dots(u.row(i, l), u.data.data(), rows, u.d,
                 alldots.data() + l * rows);
      for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t mm = 0; mm < n; ++mm) {
          if (mm != l) scores[k++] = alldots[l * rows + j * n + mm] / tau;
        }
      }
    }
    softmax(scores.data(), k, ws.weights);
    k = 0;
    for (std::size_t l = 0; l < n; ++l) {
      for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t mm = 0; mm < n; ++mm) {
          if (mm == l) continue;
          const double w = c * ws.weights[k++];
          axpy(g.row(i, l), w, u.row(j, mm), u.d);
          axpy(g.row(j, mm), w, u.row(i, l), u.d);
        }
      }
    }
  }
}

void grad_mv_dhel(const ViewBatch& u, double tau, LossPart part, Workspace& ws,
                  Tensor3& g) {
  const std::size_t m = u.m;
  const std::size_t n = u.n;
  const double c = 1.0 / (static_cast<double>(m) * tau);
  if (part != LossPart::Uniformity) {
    for (std::size_t i = 0; i < m; ++i) {
      grad_instance_alignment(u, i, tau, ws, g);
    }
  }
  if (part == LossPart::Alignment) return;
  ws.dots.resize(m);
  ws.scores.resize(m);
  std::vector<double> view;
  for (std::size_t l = 0; l < n; ++l) {
    gather_view(u, l, view);
    for (std::size_t i = 0; i < m; ++i) {
      const double* anchor = u.row(i, l);
      simd::dots(anchor, view.data(), m, u.d, ws.dots.data());
      std::size_t k = 0;
      for (std::size_t j = 0; j < m; ++j) {
        if (j != i) ws.scores[k++] = ws.dots[j] / tau;
      }
      softmax(ws.scores.data(), k, ws.weights);
      k = 0;
      for (std::size_t j = 0; j < m; ++j) {
        if (j == i) continue;
        const double w = c * ws.weights[k++];
        axpy(g.row(i, l), w, u.row(j, l), u.d);
        axpy(g.row(j, l), w, anchor, u.d);
      }
    }
  }
}

void grad_mv_cl(const ViewBatch& u, double tau, bool dhel_negatives,
                LossPart part, Workspace& ws, Tensor3& g) {
  const std::size_t m = u.m;
  const std::size_t n = u.n;
  const std::size_t rows = m * n;
  const double c = 1.0 / (static_cast<double>(n) * m * tau);
  ws.dots.resize(rows);
  ws.scores.resize(m * (n - 1) + n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t l = 0; l < n; ++l) {
      const double* anchor = u.row(i, l);
      if (part != LossPart::Uniformity) {
        std::size_t k = 0;
        for (std::size_t lp = 0; lp < n; ++lp) {
          if (lp == l) continue;
          ws.scores[k++] = simd::dot(anchor, u.row(i, lp), u.d) / tau;
        }
        softmax(ws.scores.data(), k, ws.weights);
        k = 0;
        for (std::size_t lp = 0; lp < n; ++lp) {
          if (lp == l) continue;
          const double w = c * ws.weights[k++];
          axpy(g.row(i, l), -w, u.row(i, lp), u.d);
          axpy(g.row(i, lp), -w, anchor, u.d);
        }
      }
      if (part == LossPart::Alignment) continue;
      std::size_t k = 0;
      if (dhel_negatives) {
        for (std::size_t j = 0; j < m; ++j) {
          if (j != i) {
            ws.scores[k++] = simd::dot(anchor, u.row(j, l), u.d) / tau;
          }
        }
        softmax(ws.scores.data(), k, ws.weights);
        k = 0;
        for (std::size_t j = 0; j < m; ++j) {
          if (j == i) continue;
          const double w = c * ws.weights[k++];
          axpy(g.row(i, l), w, u.row(j, l), u.d);
          axpy(g.row(j, l), w, anchor, u.d);
        }
      } else {
        simd::dots(anchor, u.data.data(), rows, u.d, ws.dots.data());
        for (std::size_t j = 0; j < m; ++j) {
          for (std::size_t mm = 0; mm < n; ++mm) {
            if (mm != l) ws.scores[k++] = ws.dots[j * n + mm] / tau;
          }
        }
        softmax(ws.scores.data(), k, ws.weights);
        k = 0;
        for (std::size_t j = 0; j < m; ++j) {
          for (std::size_t mm = 0; mm < n; ++mm) {
            if (mm == l) continue;
            const double w = c * ws.weights[k++];
            axpy(g.row(i, l), w, u.row(j, mm), u.d);
            axpy(g.row(j, mm), w, anchor, u.d);
          }
        }
      }
    }
  }
}

}  // namespace

const std::array<LossName, 9>& all_losses() {
  static const std::array<LossName, 9> names = {
      LossName::NtXent, LossName::Dhel,   LossName::Pwe,
      LossName::Avg,    LossName::Pvc,    LossName::MvInfoNce,
      LossName::MvDhel, LossName::MvCl1,  LossName::MvCl2,
  };
  return names;
}

const char* to_string(LossName name) {
  switch (name) {
    case LossName::NtXent: return "nt-xent";
    case LossName::Dhel: return "dhel";
    case LossName::Pwe: return "pwe";
    case LossName::Avg: return "avg";
    case LossName::Pvc: return "pvc";
    case LossName::MvInfoNce: return "mv-infonce";
    case LossName::MvDhel: return "mv-dhel";
    case LossName::MvCl1: return "mv-cl1";
    case LossName::MvCl2: return "mv-cl2";
  }
  return "unknown";
}

LossName loss_from_name(const std::string& name) {
  for (const LossName candidate : all_losses()) {
    if (name == to_string(candidate)) return candidate;
  }
  throw Error(ErrorCode::UnknownLoss, "no loss named '" + name + "'");
}

KernelEvalSplit kernel_eval_split(LossName name, std::size_t m, std::size_t n) {
  if (m < 2 || n < 2) {
    throw Error(ErrorCode::BadParameter, "term counts need m >= 2, n >= 2");
  }
  const auto im = static_cast<std::int64_t>(m);
  const auto in = static_cast<std::int64_t>(n);
  KernelEvalSplit split;
  switch (name) {
    case LossName::NtXent:
      split.uniformity = 2 * im * (2 * im - 1);
      break;
    case LossName::Dhel:
      split.uniformity = 2 * im * (im - 1);
      break;
    case LossName::Pwe:
      split.uniformity = in * (in - 1) / 2 * (2 * im * (2 * im - 1));
      break;
    case LossName::Avg:
      split.uniformity = in * (2 * im * (2 * im - 1));
      break;
    case LossName::Pvc:
      split.uniformity = im * in * (in - 1) * ((im - 1) * in + 1);
      break;
    case LossName::MvInfoNce:
      split.alignment = im * in * (in - 1);
      split.uniformity = im * im * in * (in - 1);
      break;
    case LossName::MvDhel:
      split.alignment = im * in * (in - 1);
      split.uniformity = in * im * (im - 1);
      break;
    case LossName::MvCl1:
      split.alignment = im * in * (in - 1);
      split.uniformity = im * im * in * (in - 1);
      break;
    case LossName::MvCl2:
      split.alignment = im * in * (in - 1);
      split.uniformity = in * im * (im - 1);
      break;
  }
  return split;
}

TermCounts term_counts(LossName name, std::size_t m, std::size_t n) {
  const KernelEvalSplit split = kernel_eval_split(name, m, n);
  const auto in = static_cast<std::int64_t>(n);
  TermCounts out;
  out.kernel_evals = split.alignment + split.uniformity;
  switch (name) {
    case LossName::NtXent:
    case LossName::Dhel:
    case LossName::MvInfoNce:
    case LossName::MvDhel:
      out.terms_per_instance = 1;
      break;
    case LossName::Pwe:
      out.terms_per_instance = in * (in - 1) / 2;
      break;
    case LossName::Pvc:
      out.terms_per_instance = in * (in - 1);
      break;
    case LossName::Avg:
    case LossName::MvCl1:
    case LossName::MvCl2:
      out.terms_per_instance = in;
      break;
  }
  return out;
}

namespace {

LossBreakdown evaluate_validated(const LossSpec& spec, const ViewBatch& batch) {
  Workspace ws;
  EvalParts parts;
  switch (spec.name) {
    case LossName::NtXent: parts = eval_nt_xent(batch, spec.tau, ws); break;
    case LossName::Dhel: parts = eval_dhel(batch, spec.tau, ws); break;
    case LossName::Pwe: parts = eval_pwe(batch, spec.tau, ws); break;
    case LossName::Avg: parts = eval_avg(batch, spec.tau, ws); break;
    case LossName::Pvc: parts = eval_pvc(batch, spec.tau, ws); break;
    case LossName::MvInfoNce:
      parts = eval_mv_infonce(batch, spec.tau, ws);
      break;
    case LossName::MvDhel: parts = eval_mv_dhel(batch, spec.tau, ws); break;
    case LossName::MvCl1:
      parts = eval_mv_cl(batch, spec.tau, false, ws);
      break;
    case LossName::MvCl2:
      parts = eval_mv_cl(batch, spec.tau, true, ws);
      break;
  }
  LossBreakdown out;
  out.alignment_term = parts.align;
  out.uniformity_term = parts.unif;
  out.total = parts.align + parts.unif;
  out.terms_per_instance = term_counts(spec.name, batch.m, batch.n).terms_per_instance;
  out.kernel_evals = parts.evals_align + parts.evals_unif;
  return out;
}

}  // namespace

LossBreakdown evaluate(const LossSpec& spec, const ViewBatch& batch) {
  validate(spec, batch);
  return evaluate_validated(spec, batch);
}

LossBreakdown evaluate_free(const LossSpec& spec, const ViewBatch& batch) {
  validate_free(spec, batch);
  return evaluate_validated(spec, batch);
}

Tensor3 euclidean_gradient(const LossSpec& spec, const ViewBatch& batch,
                           LossPart part) {
  validate(spec, batch);
  Workspace ws;
  Tensor3 g(batch.m, batch.n, batch.d);
  switch (spec.name) {
    case LossName::NtXent: grad_nt_xent(batch, spec.tau, part, ws, g); break;
    case LossName::Dhel: grad_dhel(batch, spec.tau, part, ws, g); break;
    case LossName::Pwe: grad_pwe(batch, spec.tau, part, ws, g); break;
    case LossName::Avg: grad_avg(batch, spec.tau, part, ws, g); break;
    case LossName::Pvc: grad_pvc(batch, spec.tau, part, ws, g); break;
    case LossName::MvInfoNce:
      grad_mv_infonce(batch, spec.tau, part, ws, g);
      break;
    case LossName::MvDhel: grad_mv_dhel(batch, spec.tau, part, ws, g); break;
    case LossName::MvCl1:
      grad_mv_cl(batch, spec.tau, false, part, ws, g);
      break;
    case LossName::MvCl2:
      grad_mv_cl(batch, spec.tau, true, part, ws, g);
      break;
  }
  return g;
}

}  // namespace mvcl
