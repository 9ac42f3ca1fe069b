#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "mvcl/tensor.hpp"

namespace mvcl {

// The nine losses. All are sums of per-anchor terms
//   -log sum_{P} e^{u.v/tau}  (alignment)  +  log sum_{N} e^{u.v/tau}  (uniformity)
// differing in the positive/negative index sets and in whether the sum over
// the anchor view sits inside or outside the log:
//   nt-xent     two views; negatives = all other rows, positive included
//   dhel        two views; negatives = same-view rows of other instances
//   pwe         mean of symmetrized nt-xent over all unordered view pairs
//   avg         per view l, nt-xent against the mean of the other views
//                (mean not re-normalized)
//   pvc         per ordered view pair, positive vs cross-instance rows only
//   mv-infonce  per instance: all positive pairs inside one log; negatives =
//                all rows of all instances in views other than the anchor's
//   mv-dhel     positives as mv-infonce; negatives same-view, other instances
//   mv-cl1      per anchor (i,l): positives over l' inside the log;
//                negatives = mv-infonce's set
//   mv-cl2      as mv-cl1 with mv-dhel's negative set
enum class LossName {
  NtXent,
  Dhel,
  Pwe,
  Avg,
  Pvc,
  MvInfoNce,
  MvDhel,
  MvCl1,
  MvCl2,
};

const std::array<LossName, 9>& all_losses();
const char* to_string(LossName name);
LossName loss_from_name(const std::string& name);  // throws UnknownLoss

struct LossSpec {
  LossName name = LossName::MvDhel;
  double tau = 0.5;
};

struct LossBreakdown {
  double total = 0.0;
  double alignment_term = 0.0;
  double uniformity_term = 0.0;
  std::int64_t terms_per_instance = 0;
  std::int64_t kernel_evals = 0;
};

struct TermCounts {
  std::int64_t terms_per_instance = 0;
  std::int64_t kernel_evals = 0;
};

// Exponential evaluations split by loss side. Losses whose alignment term is
// linear in the scores (nt-xent, dhel, pwe, avg, pvc) evaluate no alignment
// exponentials; the mv-* losses have log-sum alignment terms and do.
struct KernelEvalSplit {
  std::int64_t alignment = 0;
  std::int64_t uniformity = 0;
};

KernelEvalSplit kernel_eval_split(LossName name, std::size_t m, std::size_t n);
TermCounts term_counts(LossName name, std::size_t m, std::size_t n);

// Batch loss in inner-product exponential form with log-sum-exp
// stabilization. Reductions run in the canonical (i, l, j, m) order with
// pairwise-tree summation, so the result is bit-reproducible.
// kernel_evals in the result is an instrumented count and always equals the
// term_counts closed form.
LossBreakdown evaluate(const LossSpec& spec, const ViewBatch& batch);

// As evaluate but without the unit-norm gate: the loss as a free function of
// the rows. Finite differencing perturbs rows off the sphere and needs this;
// everything else should call evaluate.
LossBreakdown evaluate_free(const LossSpec& spec, const ViewBatch& batch);

enum class LossPart { Total, Alignment, Uniformity };

// Exact gradient of the selected part of evaluate(...) with respect to every
// batch entry, rows treated as free vectors in R^d (no sphere constraint).
Tensor3 euclidean_gradient(const LossSpec& spec, const ViewBatch& batch,
                           LossPart part = LossPart::Total);

}  // namespace mvcl
