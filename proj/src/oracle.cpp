#include "mvcl/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mvcl::oracle {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double vdot(const ViewBatch& u, std::size_t i, std::size_t l, std::size_t j,
            std::size_t mm) {
  const double* a = u.row(i, l);
  const double* b = u.row(j, mm);
  double s = 0.0;
  for (std::size_t k = 0; k < u.d; ++k) s += a[k] * b[k];
  return s;
}

double rowdot(const std::vector<double>& a, std::size_t i,
              const std::vector<double>& b, std::size_t j, std::size_t d) {
  double s = 0.0;
  for (std::size_t k = 0; k < d; ++k) s += a[i * d + k] * b[j * d + k];
  return s;
}

void copy_view(const ViewBatch& u, std::size_t l, std::vector<double>& out) {
  out.resize(u.m * u.d);
  for (std::size_t i = 0; i < u.m; ++i) {
    for (std::size_t k = 0; k < u.d; ++k) out[i * u.d + k] = u.row(i, l)[k];
  }
}

// Symmetrized two-matrix nt-xent read directly off the defining sum: anchor
// over the rows of each side, denominator = every row of both sides except
// the anchor itself.
double naive_pair_ntxent(const std::vector<double>& a,
                         const std::vector<double>& b, std::size_t m,
                         std::size_t d, double tau) {
  double side_sum = 0.0;
  for (int side = 0; side < 2; ++side) {
    const std::vector<double>& anchors = side == 0 ? a : b;
    const std::vector<double>& partners = side == 0 ? b : a;
    double inst_sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double num = std::exp(rowdot(anchors, i, partners, i, d) / tau);
      double den = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        if (j != i) den += std::exp(rowdot(anchors, i, anchors, j, d) / tau);
        den += std::exp(rowdot(anchors, i, partners, j, d) / tau);
      }
      inst_sum += std::log(num / den);
    }
    side_sum += -inst_sum / static_cast<double>(m);
  }
  return side_sum / 2.0;
}

double naive_nt_xent(const ViewBatch& u, double tau) {
  std::vector<double> v0;
  std::vector<double> v1;
  copy_view(u, 0, v0);
  copy_view(u, 1, v1);
  return naive_pair_ntxent(v0, v1, u.m, u.d, tau);
}

double naive_dhel(const ViewBatch& u, double tau) {
  double side_sum = 0.0;
  for (std::size_t l = 0; l < 2; ++l) {
    double inst_sum = 0.0;
    for (std::size_t i = 0; i < u.m; ++i) {
      const double num = std::exp(vdot(u, i, l, i, 1 - l) / tau);
      double den = 0.0;
      for (std::size_t j = 0; j < u.m; ++j) {
        if (j != i) den += std::exp(vdot(u, i, l, j, l) / tau);
      }
      inst_sum += std::log(num / den);
    }
    side_sum += -inst_sum / static_cast<double>(u.m);
  }
  return side_sum / 2.0;
}

double naive_pwe(const ViewBatch& u, double tau) {
  std::vector<double> va;
  std::vector<double> vb;
  double pair_sum = 0.0;
  for (std::size_t l = 0; l < u.n; ++l) {
    for (std::size_t mm = l + 1; mm < u.n; ++mm) {
      copy_view(u, l, va);
      copy_view(u, mm, vb);
      pair_sum += naive_pair_ntxent(va, vb, u.m, u.d, tau);
    }
  }
  return 2.0 / (static_cast<double>(u.n) * (u.n - 1)) * pair_sum;
}

double naive_avg(const ViewBatch& u, double tau) {
  std::vector<double> vl;
  std::vector<double> vbar;
  double view_sum = 0.0;
  for (std::size_t l = 0; l < u.n; ++l) {
    copy_view(u, l, vl);
    vbar.assign(u.m * u.d, 0.0);
    for (std::size_t i = 0; i < u.m; ++i) {
      for (std::size_t mm = 0; mm < u.n; ++mm) {
        if (mm == l) continue;
        for (std::size_t k = 0; k < u.d; ++k) {
          vbar[i * u.d + k] += u.row(i, mm)[k] / static_cast<double>(u.n - 1);
        }
      }
    }
    view_sum += naive_pair_ntxent(vl, vbar, u.m, u.d, tau);
  }
  return view_sum / static_cast<double>(u.n);
}

double naive_pvc(const ViewBatch& u, double tau) {
  double acc = 0.0;
  for (std::size_t l = 0; l < u.n; ++l) {
    for (std::size_t lp = 0; lp < u.n; ++lp) {
      if (lp == l) continue;
      for (std::size_t i = 0; i < u.m; ++i) {
        const double pos = std::exp(vdot(u, i, l, i, lp) / tau);
        double den = pos;
        for (std::size_t j = 0; j < u.m; ++j) {
          if (j == i) continue;
          for (std::size_t mm = 0; mm < u.n; ++mm) {
            den += std::exp(vdot(u, i, l, j, mm) / tau);
          }
        }
        acc += std::log(pos / den);
      }
    }
  }
  return -acc / (static_cast<double>(u.m) * (u.n - 1));
}

double naive_mv_infonce(const ViewBatch& u, double tau) {
  double acc = 0.0;
  for (std::size_t i = 0; i < u.m; ++i) {
    double pos = 0.0;
    for (std::size_t l = 0; l < u.n; ++l) {
      for (std::size_t lp = 0; lp < u.n; ++lp) {
        if (lp != l) pos += std::exp(vdot(u, i, l, i, lp) / tau);
      }
    }
    double neg = 0.0;
    for (std::size_t l = 0; l < u.n; ++l) {
      for (std::size_t j = 0; j < u.m; ++j) {
        for (std::size_t mm = 0; mm < u.n; ++mm) {
          if (mm != l) neg += std::exp(vdot(u, i, l, j, mm) / tau);
        }
      }
    }
    acc += -std::log(pos) + std::log(neg);
  }
  return acc / static_cast<double>(u.m);
}

double naive_mv_dhel(const ViewBatch& u, double tau) {
  double acc = 0.0;
  for (std::size_t i = 0; i < u.m; ++i) {
    double pos = 0.0;
    for (std::size_t l = 0; l < u.n; ++l) {
      for (std::size_t lp = 0; lp < u.n; ++lp) {
        if (lp != l) pos += std::exp(vdot(u, i, l, i, lp) / tau);
      }
    }
    acc += -std::log(pos);
  }
  for (std::size_t l = 0; l < u.n; ++l) {
    for (std::size_t i = 0; i < u.m; ++i) {
      double neg = 0.0;
      for (std::size_t j = 0; j < u.m; ++j) {
        if (j != i) neg += std::exp(vdot(u, i, l, j, l) / tau);
      }
      acc += std::log(neg);
    }
  }
  return acc / static_cast<double>(u.m);
}

double naive_mv_cl1(const ViewBatch& u, double tau) {
  double acc = 0.0;
  for (std::size_t l = 0; l < u.n; ++l) {
    for (std::size_t i = 0; i < u.m; ++i) {
      double pos = 0.0;
      for (std::size_t lp = 0; lp < u.n; ++lp) {
        if (lp != l) pos += std::exp(vdot(u, i, l, i, lp) / tau);
      }
      double neg = 0.0;
      for (std::size_t j = 0; j < u.m; ++j) {
        for (std::size_t mm = 0; mm < u.n; ++mm) {
          if (mm != l) neg += std::exp(vdot(u, i, l, j, mm) / tau);
        }
      }
      acc += -std::log(pos) + std::log(neg);
    }
  }
  return acc / (static_cast<double>(u.n) * u.m);
}

double naive_mv_cl2(const ViewBatch& u, double tau) {
  double acc = 0.0;
  for (std::size_t l = 0; l < u.n; ++l) {
    for (std::size_t i = 0; i < u.m; ++i) {
      double pos = 0.0;
      for (std::size_t lp = 0; lp < u.n; ++lp) {
        if (lp != l) pos += std::exp(vdot(u, i, l, i, lp) / tau);
      }
      double neg = 0.0;
      for (std::size_t j = 0; j < u.m; ++j) {
        if (j != i) neg += std::exp(vdot(u, i, l, j, l) / tau);
      }
      acc += -std::log(pos) + std::log(neg);
    }
  }
  return acc / (static_cast<double>(u.n) * u.m);
}

}  // namespace

double naive_evaluate(const LossSpec& spec, const ViewBatch& batch) {
  if (batch.m > 16 || batch.n > 8) {
    throw Error(ErrorCode::SizeGuard,
                "naive_evaluate is limited to m <= 16, n <= 8");
  }
  if (batch.n < 2) {
    throw Error(ErrorCode::WrongViewCount, "losses require n >= 2");
  }
  if ((spec.name == LossName::NtXent || spec.name == LossName::Dhel) &&
      batch.n != 2) {
    throw Error(ErrorCode::WrongViewCount, "two-view loss requires n = 2");
  }
  const bool excludes_self =
      spec.name == LossName::Dhel || spec.name == LossName::Pvc ||
      spec.name == LossName::MvDhel || spec.name == LossName::MvCl2;
  if (excludes_self && batch.m < 2) {
    throw Error(ErrorCode::TooFewInstances, "empty negative set at m = 1");
  }
  switch (spec.name) {
    case LossName::NtXent: return naive_nt_xent(batch, spec.tau);
    case LossName::Dhel: return naive_dhel(batch, spec.tau);
    case LossName::Pwe: return naive_pwe(batch, spec.tau);
    case LossName::Avg: return naive_avg(batch, spec.tau);
    case LossName::Pvc: return naive_pvc(batch, spec.tau);
    case LossName::MvInfoNce: return naive_mv_infonce(batch, spec.tau);
    case LossName::MvDhel: return naive_mv_dhel(batch, spec.tau);
    case LossName::MvCl1: return naive_mv_cl1(batch, spec.tau);
    case LossName::MvCl2: return naive_mv_cl2(batch, spec.tau);
  }
  throw Error(ErrorCode::UnknownLoss, "unhandled loss");
}

namespace {

double pair_energy(const Kernel& kernel, double angle_gap) {
  double x = 2.0 - 2.0 * std::cos(angle_gap);
  x = std::min(std::max(x, 0.0), 4.0);
  return kappa(kernel, x);
}

double config_energy(const Kernel& kernel, const std::vector<double>& angles,
                     std::int64_t& evals) {
  double e = 0.0;
  for (std::size_t p = 0; p < angles.size(); ++p) {
    for (std::size_t q = p + 1; q < angles.size(); ++q) {
      e += pair_energy(kernel, angles[p] - angles[q]);
    }
  }
  ++evals;
  return e;
}

// Enumerates nondecreasing grid tuples (g_2 <= ... <= g_m) depth-first with
// running partial energies; ties keep the earlier (lexicographically
// smallest) tuple.
void enumerate(const std::vector<double>& table, std::size_t m,
               std::size_t res, std::size_t level, std::size_t min_g,
               std::vector<std::size_t>& current, double partial,
               double& best_energy, std::vector<std::size_t>& best,
               std::int64_t& evals) {
  if (level == m) {
    ++evals;
    if (partial < best_energy) {
      best_energy = partial;
      best = current;
    }
    return;
  }
  for (std::size_t g = min_g; g < res; ++g) {
    current[level] = g;
    double added = 0.0;
    for (std::size_t q = 0; q < level; ++q) added += table[g - current[q]];
    enumerate(table, m, res, level + 1, g, current, partial + added,
              best_energy, best, evals);
  }
}

}  // namespace

EnergyResult circle_energy_minimum(std::size_t m, const Kernel& kernel,
                                   std::size_t resolution, double base_angle) {
  if (m < 2 || m > 6) {
    throw Error(ErrorCode::SizeGuard, "circle search supports m in [2, 6]");
  }
  if (resolution < 360) {
    throw Error(ErrorCode::BadParameter, "resolution must be >= 360");
  }
  kappa(kernel, 0.0);  // validates kernel parameters up front

  std::size_t enum_res = resolution;
  if (m == 5) enum_res = std::min<std::size_t>(enum_res, 120);
  if (m == 6) enum_res = std::min<std::size_t>(enum_res, 48);

  std::vector<double> table(enum_res);
  for (std::size_t gap = 0; gap < enum_res; ++gap) {
    table[gap] = pair_energy(kernel, kTwoPi * gap / enum_res);
  }

  EnergyResult result;
  std::vector<std::size_t> current(m, 0);
  std::vector<std::size_t> best(m, 0);
  double best_energy = std::numeric_limits<double>::infinity();
  current[0] = 0;  // first point pinned by rotation invariance
  enumerate(table, m, enum_res, 1, 0, current, 0.0, best_energy, best,
            result.evaluations);

  std::vector<double> angles(m);
  for (std::size_t p = 0; p < m; ++p) angles[p] = kTwoPi * best[p] / enum_res;

  // Coordinate-descent refinement; the first point stays pinned.
  const double step = kTwoPi / (10.0 * resolution);
  double energy = config_energy(kernel, angles, result.evaluations);
  bool improved = true;
  std::size_t sweeps = 0;
  while (improved && sweeps < 200) {
    improved = false;
    ++sweeps;
    for (std::size_t p = 1; p < m; ++p) {
      for (const double dir : {1.0, -1.0}) {
        for (;;) {
          angles[p] += dir * step;
          const double trial = config_energy(kernel, angles, result.evaluations);
          if (trial < energy - 1e-15) {
            energy = trial;
            improved = true;
          } else {
            angles[p] -= dir * step;
            break;
          }
        }
      }
    }
  }

  for (double& a : angles) {
    a = std::fmod(a + base_angle, kTwoPi);
    if (a < 0.0) a += kTwoPi;
  }
  std::sort(angles.begin(), angles.end());
  result.angles = std::move(angles);
  result.energy = energy;
  return result;
}

}  // namespace mvcl::oracle
