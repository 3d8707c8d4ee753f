#include "rcfe/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "rcfe/logsum.hpp"
#include "rcfe/parallel.hpp"

namespace rcfe {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Hard cap on multi-start candidates; beyond it the grid is subsampled with a
// deterministic stride (best-effort regime for larger alphabets).
constexpr std::size_t kMaxStarts = 4096;
// Screening pass: every start gets a short ascent, only the leaders plus the
// canonical starts get the full refinement budget.
constexpr int kScreenIterations = 12;
constexpr std::size_t kRefineCandidates = 16;

double clamped_log(double v) { return std::log(std::max(v, 1e-300)); }

// ---------------------------------------------------------------------------
// Raw objective kernels on a conditional-row matrix (off-support entries 0).

double mi_raw(const Channel& ch, const Matrix& q) {
  const Vector& px = ch.input_dist();
  const Vector m = q.transpose() * px;
  double h_rows = 0.0;
  for (Index x = 0; x < q.rows(); ++x) {
    h_rows += px[x] * shannon_entropy(q.row(x));
  }
  return shannon_entropy(m) - h_rows;
}

double cond_kl_raw(const Channel& ch, const Matrix& q) {
  const Vector& px = ch.input_dist();
  double d = 0.0;
  for (Index x = 0; x < q.rows(); ++x) {
    d += px[x] * kl_divergence(q.row(x), ch.transition().row(x));
  }
  return d;
}

// (1-beta) H_Q(Y) - beta D(Q||W|P_X); equals H_Q(Y) - beta(I_Q + ell(Q)).
double bulk_objective_raw(const Channel& ch, double beta, const Matrix& q) {
  const Vector& px = ch.input_dist();
  const Vector m = q.transpose() * px;
  return (1.0 - beta) * shannon_entropy(m) - beta * cond_kl_raw(ch, q);
}

// F(Q) = (1-beta) H_Q(Y|X) - beta D(Q||W|P_X), separable over rows.
double f_raw(const Channel& ch, double beta, const Matrix& q) {
  const Vector& px = ch.input_dist();
  double f = 0.0;
  for (Index x = 0; x < q.rows(); ++x) {
    f += px[x] * ((1.0 - beta) * shannon_entropy(q.row(x)) -
                  beta * kl_divergence(q.row(x), ch.transition().row(x)));
  }
  return f;
}

// Gradients on support coordinates; logs are clamped so boundary points give
// finite (if large) ascent directions. Off-support entries stay zero.

Matrix bulk_gradient(const Channel& ch, double beta, const Matrix& q) {
  const Vector& px = ch.input_dist();
  const Vector m = q.transpose() * px;
  Matrix g = Matrix::Zero(q.rows(), q.cols());
  for (Index x = 0; x < q.rows(); ++x) {
    for (Index y : ch.row_support()[static_cast<std::size_t>(x)]) {
      const double dH = -(clamped_log(m[y]) + 1.0);
      const double dD = clamped_log(q(x, y)) - ch.log_transition()(x, y) + 1.0;
      g(x, y) = px[x] * ((1.0 - beta) * dH - beta * dD);
    }
  }
  return g;
}

Matrix f_gradient(const Channel& ch, double beta, const Matrix& q) {
  const Vector& px = ch.input_dist();
  Matrix g = Matrix::Zero(q.rows(), q.cols());
  for (Index x = 0; x < q.rows(); ++x) {
    for (Index y : ch.row_support()[static_cast<std::size_t>(x)]) {
      const double dH = -(clamped_log(q(x, y)) + 1.0);
      const double dD = clamped_log(q(x, y)) - ch.log_transition()(x, y) + 1.0;
      g(x, y) = px[x] * ((1.0 - beta) * dH - beta * dD);
    }
  }
  return g;
}

Matrix mi_gradient(const Channel& ch, const Matrix& q) {
  const Vector& px = ch.input_dist();
  const Vector m = q.transpose() * px;
  Matrix g = Matrix::Zero(q.rows(), q.cols());
  for (Index x = 0; x < q.rows(); ++x) {
    for (Index y : ch.row_support()[static_cast<std::size_t>(x)]) {
      g(x, y) = px[x] * (clamped_log(q(x, y)) - clamped_log(m[y]));
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Simplex machinery.

// Euclidean projection onto the probability simplex (support coordinates).
void project_row_support(const Channel& ch, Index x, Matrix& q) {
  const auto& support = ch.row_support()[static_cast<std::size_t>(x)];
  const std::size_t s = support.size();
  if (s == 1) {
    q(x, support[0]) = 1.0;
    return;
  }
  std::vector<double> u(s);
  for (std::size_t i = 0; i < s; ++i) u[i] = q(x, support[i]);
  std::vector<double> sorted = u;
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double cumulative = 0.0;
  double tau = 0.0;
  for (std::size_t j = 0; j < s; ++j) {
    cumulative += sorted[j];
    const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (sorted[j] - candidate > 0.0) tau = candidate;
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < s; ++i) {
    u[i] = std::max(u[i] - tau, 0.0);
    sum += u[i];
  }
  for (std::size_t i = 0; i < s; ++i) q(x, support[i]) = u[i] / sum;
}

void project_rows(const Channel& ch, Matrix& q) {
  for (Index x = 0; x < q.rows(); ++x) project_row_support(ch, x, q);
}

// All points k/(g-1) on the (s-1)-simplex with g levels per coordinate.
void simplex_grid(std::size_t s, int levels, std::vector<std::vector<double>>& out) {
  const int ticks = std::max(levels - 1, 1);
  std::vector<int> k(s, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t pos, int left) {
    if (pos + 1 == s) {
      k[pos] = left;
      std::vector<double> point(s);
      for (std::size_t i = 0; i < s; ++i) {
        point[i] = static_cast<double>(k[i]) / static_cast<double>(ticks);
      }
      out.push_back(std::move(point));
      return;
    }
    for (int v = 0; v <= left; ++v) {
      k[pos] = v;
      rec(pos + 1, left - v);
    }
  };
  rec(0, ticks);
}

bool lex_less(const Matrix& a, const Matrix& b) {
  for (Index x = 0; x < a.rows(); ++x) {
    for (Index y = 0; y < a.cols(); ++y) {
      if (a(x, y) != b(x, y)) return a(x, y) < b(x, y);
    }
  }
  return false;
}

// Multi-start candidate set: per-row simplex grids combined mixed-radix,
// strided down to kMaxStarts when the full product is too large.
std::vector<Matrix> grid_starts(const Channel& ch, const SolverConfig& cfg) {
  const Index nx = ch.input_size();
  const Index ny = ch.output_size();
  std::vector<std::vector<std::vector<double>>> rows(
      static_cast<std::size_t>(nx));
  std::size_t total = 1;
  for (Index x = 0; x < nx; ++x) {
    simplex_grid(ch.row_support()[static_cast<std::size_t>(x)].size(),
                 cfg.coarse_grid_points_per_row,
                 rows[static_cast<std::size_t>(x)]);
    total *= rows[static_cast<std::size_t>(x)].size();
  }
  const std::size_t n_take = std::min(total, kMaxStarts);
  std::vector<Matrix> starts;
  starts.reserve(n_take);
  for (std::size_t i = 0; i < n_take; ++i) {
    std::size_t idx =
        static_cast<std::size_t>(static_cast<double>(i) *
                                 static_cast<double>(total) /
                                 static_cast<double>(n_take));
    Matrix q = Matrix::Zero(nx, ny);
    for (Index x = 0; x < nx; ++x) {
      const auto& pts = rows[static_cast<std::size_t>(x)];
      const std::size_t j = idx % pts.size();
      idx /= pts.size();
      const auto& support = ch.row_support()[static_cast<std::size_t>(x)];
      for (std::size_t c = 0; c < support.size(); ++c) {
        q(x, support[c]) = pts[j][c];
      }
    }
    starts.push_back(std::move(q));
  }
  return starts;
}

Matrix uniform_on_support(const Channel& ch) {
  Matrix q = Matrix::Zero(ch.input_size(), ch.output_size());
  for (Index x = 0; x < ch.input_size(); ++x) {
    const auto& support = ch.row_support()[static_cast<std::size_t>(x)];
    for (Index y : support) {
      q(x, y) = 1.0 / static_cast<double>(support.size());
    }
  }
  return q;
}

// ---------------------------------------------------------------------------
// Projected ascent with shrinking steps.

struct AscentOut {
  Matrix q;
  double objective;
  bool converged;
};

template <typename Fn, typename Grad>
AscentOut ascend(const Channel& ch, const Fn& f, const Grad& grad, Matrix q,
                 const SolverConfig& cfg) {
  project_rows(ch, q);
  double fq = f(q);
  double step = cfg.refine_step_init;
  bool converged = false;
  Matrix marker = q;  // extrapolation anchor, refreshed periodically
  for (int it = 0; it < cfg.refine_iterations; ++it) {
    // Zigzag killer: every few iterations, extrapolate along the net
    // progress since the marker; on curved valleys the gradient steps
    // alternate sides while the net direction tracks the valley floor.
    if (it % 8 == 7) {
      for (const double factor : {4.0, 2.0}) {
        Matrix jump = q + factor * (q - marker);
        project_rows(ch, jump);
        const double fj = f(jump);
        if (fj > fq) {
          q = std::move(jump);
          fq = fj;
          break;
        }
      }
      marker = q;
    }
    Matrix g = grad(q);
    // Normalized direction: the clamped boundary logs make raw gradient
    // magnitudes swing over orders of magnitude, which starves the adaptive
    // step. With a unit direction the step is a parameter-space distance.
    const double g_norm = g.norm();
    if (!(g_norm > 0.0) || !std::isfinite(g_norm)) {
      converged = true;
      break;
    }
    g /= g_norm;
    bool accepted = false;
    while (step >= 1e-15) {
      Matrix trial = q + step * g;
      project_rows(ch, trial);
      const double ft = f(trial);
      if (ft > fq) {
        const double gain = ft - fq;
        q = std::move(trial);
        fq = ft;
        accepted = true;
        if (gain < cfg.convergence_tol) converged = true;
        step = std::min(step * 2.0, 0.5);
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      converged = true;  // no improving direction at any resolution
      break;
    }
    if (converged) break;
  }
  return {std::move(q), fq, converged};
}

// Indices to keep for full refinement: the screening leaders plus the last
// `canonical` starts (always retained), in deterministic order.
std::vector<std::size_t> select_leaders(const std::vector<double>& scores,
                                        std::size_t canonical) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&scores](std::size_t a, std::size_t b) {
                     return scores[a] > scores[b];
                   });
  std::vector<char> keep(scores.size(), 0);
  const std::size_t top = std::min(kRefineCandidates, order.size());
  for (std::size_t i = 0; i < top; ++i) keep[order[i]] = 1;
  for (std::size_t i = scores.size() - std::min(canonical, scores.size());
       i < scores.size(); ++i) {
    keep[i] = 1;
  }
  std::vector<std::size_t> selected;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (keep[i]) selected.push_back(i);
  }
  return selected;
}

// Minimal move restoring feasibility: a first-order step along the
// mutual-information gradient, doubled until the constraint holds, falling
// back to a shrinking blend with a strictly feasible anchor. Keeps the
// repaired point adjacent to the candidate (a segment bisection against a
// distant anchor can land on an unrelated boundary crossing).
Matrix repair_feasibility(const Channel& ch, Matrix q, double rate, int sense,
                          const Matrix& anchor) {
  auto violation = [&](const Matrix& m) {
    const double mi = mi_raw(ch, m);
    return sense > 0 ? std::max(mi - rate, 0.0) : std::max(rate - mi, 0.0);
  };
  const double v = violation(q);
  if (v <= 0.0) return q;
  const Matrix g = mi_gradient(ch, q);
  const double g_norm2 = g.squaredNorm();
  if (g_norm2 > 0.0) {
    const double direction = sense > 0 ? -1.0 : 1.0;
    double step = 2.0 * v / g_norm2;
    for (int it = 0; it < 60 && step < 1e9; ++it, step *= 2.0) {
      Matrix trial = q + (direction * step) * g;
      project_rows(ch, trial);
      if (violation(trial) <= 0.0) return trial;
    }
  }
  for (double t = 1e-9; t < 1.0; t *= 4.0) {
    Matrix trial = (1.0 - t) * q + t * anchor;
    if (violation(trial) <= 0.0) return trial;
  }
  return anchor;
}

// Ascent restricted to the neighborhood of the constraint boundary: steps
// along the objective gradient projected onto the tangent of the
// mutual-information level set, each followed by a local feasibility repair.
// The exterior penalty cannot slide along the boundary once its weight is
// large; this walk finishes the job.
template <typename Fn, typename Grad>
Matrix boundary_ascent(const Channel& ch, const Fn& objective,
                       const Grad& gradient, Matrix q, double rate, int sense,
                       const Matrix& anchor) {
  auto feasible_value = [&](const Matrix& m) {
    const double mi = mi_raw(ch, m);
    const double v = sense > 0 ? mi - rate : rate - mi;
    return v <= kTolMi ? objective(m) : kNegInf;
  };
  // Movements live in the product of row simplices, so per-row mean
  // components are immaterial; center both vectors before projecting out
  // the normal, or the computed direction is not actually tangent.
  auto center_rows = [&](Matrix& m) {
    for (Index x = 0; x < m.rows(); ++x) {
      const auto& support = ch.row_support()[static_cast<std::size_t>(x)];
      double mean = 0.0;
      for (Index y : support) mean += m(x, y);
      mean /= static_cast<double>(support.size());
      for (Index y : support) m(x, y) -= mean;
    }
  };
  double fq = feasible_value(q);
  double step = 1e-2;
  for (int it = 0; it < 100; ++it) {
    Matrix direction = gradient(q);
    Matrix normal = mi_gradient(ch, q);
    center_rows(direction);
    center_rows(normal);
    const double n2 = normal.squaredNorm();
    if (n2 > 0.0) {
      const double along = (direction.array() * normal.array()).sum();
      direction -= (along / n2) * normal;
    }
    bool accepted = false;
    while (step >= 1e-12) {
      Matrix trial = q + step * direction;
      project_rows(ch, trial);
      trial = repair_feasibility(ch, trial, rate, sense, anchor);
      const double ft = feasible_value(trial);
      if (ft > fq) {
        q = std::move(trial);
        fq = ft;
        accepted = true;
        step = std::min(step * 1.4, 0.1);
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  return q;
}

// Bisection along the segment from `inside` (constraint satisfied) to
// `outside`; returns the point closest to the constraint boundary that still
// satisfies it. `sense` +1 means I <= R is feasible, -1 means I >= R.
Matrix bisect_to_boundary(const Channel& ch, const Matrix& inside,
                          const Matrix& outside, double rate, int sense) {
  auto feasible = [&](const Matrix& q) {
    const double mi = mi_raw(ch, q);
    return sense > 0 ? mi <= rate : mi >= rate;
  };
  double lo = 0.0, hi = 1.0;  // t=0 -> inside, t=1 -> outside
  if (feasible(outside)) return outside;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    const Matrix q = (1.0 - mid) * inside + mid * outside;
    if (feasible(q)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  Matrix q = (1.0 - lo) * inside + lo * outside;
  project_rows(ch, q);
  return feasible(q) ? q : inside;
}

struct NumericBest {
  Matrix q;
  double objective = kNegInf;
  bool converged = false;
  bool found = false;
};

void consider(NumericBest& best, const Matrix& q, double objective,
              bool converged) {
  if (!best.found || objective > best.objective ||
      (objective == best.objective && lex_less(q, best.q))) {
    best.q = q;
    best.objective = objective;
    best.converged = converged;
    best.found = true;
  }
}

void check_numeric_beta(double beta) {
  if (!(beta > 0.0)) throw std::domain_error("solver: beta must be positive");
  if (beta > kBetaMaxNumeric) {
    throw std::domain_error(
        "solver: numeric optimization is capped at beta = 64");
  }
}

BranchResult package(const Channel& ch, const NumericBest& best, double value,
                     bool constraint_active, SolveMethod method,
                     bool mi_within_tol) {
  BranchResult out;
  out.value = Nats(value);
  out.optimizer = JointDistribution::make(ch, best.q);
  out.optimizer_mi = Nats(mi_raw(ch, best.q));
  out.constraint_active = constraint_active;
  out.method = method;
  out.feasible = true;
  out.mi_within_tol = mi_within_tol;
  return out;
}

BranchResult infeasible_result(bool constraint_active) {
  BranchResult out;
  out.value = Nats::neg_inf();
  out.optimizer.reset();
  out.optimizer_mi = Nats(0.0);
  out.constraint_active = constraint_active;
  out.method = SolveMethod::constrained_numeric;
  out.feasible = false;
  out.mi_within_tol = false;
  return out;
}

// Rows produced by arithmetic can drift at the 1e-16 level; snap row sums so
// JointDistribution::make sees exact probability rows.
void renormalize_rows(const Channel& ch, Matrix& q) {
  for (Index x = 0; x < q.rows(); ++x) {
    double sum = 0.0;
    for (Index y : ch.row_support()[static_cast<std::size_t>(x)]) {
      sum += q(x, y);
    }
    for (Index y : ch.row_support()[static_cast<std::size_t>(x)]) {
      q(x, y) /= sum;
    }
  }
}

// Multi-start maximization of (objective - penalty) followed by feasibility
// repair against `anchor` and boundary polish toward `polish_target`. The
// last `canonical` entries of `starts` skip the screening cut.
template <typename Fn, typename Grad>
NumericBest solve_constrained(const Channel& ch, const Fn& objective,
                              const Grad& gradient, double rate, int sense,
                              const Matrix& anchor,
                              const Matrix& polish_target,
                              std::vector<Matrix> starts,
                              std::size_t canonical,
                              const SolverConfig& cfg) {
  starts.push_back(anchor);
  starts.push_back(
      bisect_to_boundary(ch, anchor, polish_target, rate, sense));
  canonical += 2;

  auto violation = [&](const Matrix& q) {
    const double mi = mi_raw(ch, q);
    return sense > 0 ? std::max(mi - rate, 0.0) : std::max(rate - mi, 0.0);
  };
  auto penalized = [&](double weight, const Matrix& m) {
    const double v = violation(m);
    return objective(m) - weight * v * v;
  };
  auto penalized_grad = [&](double weight, const Matrix& m) {
    Matrix g = gradient(m);
    const double v = violation(m);
    if (v > 0.0) {
      const double scale = sense > 0 ? -2.0 * weight * v : 2.0 * weight * v;
      g += scale * mi_gradient(ch, m);
    }
    return g;
  };

  // Screen under the first penalty weight.
  SolverConfig screen_cfg = cfg;
  screen_cfg.refine_iterations =
      std::min(cfg.refine_iterations, kScreenIterations);
  const double w0 = cfg.penalty_weight_schedule.empty()
                        ? 1e2
                        : cfg.penalty_weight_schedule.front();
  std::vector<Matrix> screened(starts.size());
  std::vector<double> scores(starts.size());
  parallel_for(starts.size(), cfg.threads, [&](std::size_t i) {
    auto f = [&](const Matrix& m) { return penalized(w0, m); };
    auto g = [&](const Matrix& m) { return penalized_grad(w0, m); };
    const AscentOut res = ascend(ch, f, g, starts[i], screen_cfg);
    screened[i] = res.q;
    scores[i] = res.objective;
  });
  const std::vector<std::size_t> selected = select_leaders(scores, canonical);

  std::vector<Matrix> finals(selected.size());
  std::vector<char> converged(selected.size(), 0);
  parallel_for(selected.size(), cfg.threads, [&](std::size_t j) {
    Matrix q = screened[selected[j]];
    bool conv = true;
    for (const double weight : cfg.penalty_weight_schedule) {
      auto f = [&](const Matrix& m) { return penalized(weight, m); };
      auto g = [&](const Matrix& m) { return penalized_grad(weight, m); };
      const AscentOut step = ascend(ch, f, g, q, cfg);
      q = step.q;
      conv = step.converged;
    }
    finals[j] = std::move(q);
    converged[j] = conv ? 1 : 0;
  });

  NumericBest best;
  for (std::size_t j = 0; j < finals.size(); ++j) {
    Matrix q = finals[j];
    // Residual violations within kTolMi are acceptable per the branch
    // contract; larger ones get a minimal local repair.
    if (violation(q) > kTolMi) {
      q = repair_feasibility(ch, q, rate, sense, anchor);
    }
    consider(best, q, objective(q), converged[j] != 0);
  }
  // Push the winner onto the constraint boundary along the segment toward
  // the relevant unconstrained optimizer, keep whichever scores higher.
  const Matrix polished =
      bisect_to_boundary(ch, best.q, polish_target, rate, sense);
  consider(best, polished, objective(polished), best.converged);
  // Finish with a tangential walk along the boundary from the incumbent.
  const Matrix walked = boundary_ascent(ch, objective, gradient, best.q, rate,
                                        sense, anchor);
  consider(best, walked, objective(walked), best.converged);
  return best;
}

}  // namespace

// ---------------------------------------------------------------------------
// Closed forms.

JointDistribution sparse_tilt(const Channel& ch, double beta) {
  if (!(beta > 0.0)) throw std::domain_error("sparse_tilt: beta must be > 0");
  Matrix q = Matrix::Zero(ch.input_size(), ch.output_size());
  for (Index x = 0; x < ch.input_size(); ++x) {
    const auto& support = ch.row_support()[static_cast<std::size_t>(x)];
    Vector logs(static_cast<Index>(support.size()));
    for (std::size_t i = 0; i < support.size(); ++i) {
      logs[static_cast<Index>(i)] = beta * ch.log_transition()(x, support[i]);
    }
    const double norm = log_sum_exp(logs);
    for (std::size_t i = 0; i < support.size(); ++i) {
      q(x, support[i]) = std::exp(logs[static_cast<Index>(i)] - norm);
    }
  }
  return JointDistribution::make(ch, std::move(q));
}

Nats c_beta(const Channel& ch, double beta) {
  if (!(beta > 0.0)) throw std::domain_error("c_beta: beta must be > 0");
  double total = 0.0;
  for (Index x = 0; x < ch.input_size(); ++x) {
    const auto& support = ch.row_support()[static_cast<std::size_t>(x)];
    Vector logs(static_cast<Index>(support.size()));
    for (std::size_t i = 0; i < support.size(); ++i) {
      logs[static_cast<Index>(i)] = beta * ch.log_transition()(x, support[i]);
    }
    total += ch.input_dist()[x] * log_sum_exp(logs);
  }
  return Nats(total);
}

Nats i_sparse(const Channel& ch, double beta) {
  return mutual_info(sparse_tilt(ch, beta));
}

// ---------------------------------------------------------------------------
// Feasible mutual-information range.

MiRange feasible_mi_range(const Channel& ch, const SolverConfig& cfg) {
  MiRange out;
  const Index nx = ch.input_size();
  const Index ny = ch.output_size();

  // Minimum: zero iff some output letter is in every row support; otherwise
  // minimize the (convex) mutual information by projected descent.
  std::vector<Index> common;
  for (Index y = 0; y < ny; ++y) {
    bool everywhere = true;
    for (Index x = 0; x < nx && everywhere; ++x) {
      everywhere = ch.supported(x, y);
    }
    if (everywhere) common.push_back(y);
  }
  if (!common.empty()) {
    Matrix q = Matrix::Zero(nx, ny);
    for (Index x = 0; x < nx; ++x) {
      for (Index y : common) q(x, y) = 1.0 / static_cast<double>(common.size());
    }
    out.argmin = std::move(q);
    out.min = 0.0;
  } else {
    auto neg_mi = [&](const Matrix& q) { return -mi_raw(ch, q); };
    auto neg_mi_grad = [&](const Matrix& q) {
      return Matrix(-mi_gradient(ch, q));
    };
    NumericBest best;
    for (const Matrix& start :
         {uniform_on_support(ch), Matrix(ch.transition())}) {
      const AscentOut res = ascend(ch, neg_mi, neg_mi_grad, start, cfg);
      consider(best, res.q, res.objective, res.converged);
    }
    out.argmin = best.q;
    out.min = -best.objective;
  }

  // Maximum: mutual information is convex in the conditional rows, so the
  // maximum sits at a vertex (deterministic rows on the support).
  std::size_t n_vertices = 1;
  bool enumerable = true;
  for (Index x = 0; x < nx; ++x) {
    n_vertices *= ch.row_support()[static_cast<std::size_t>(x)].size();
    if (n_vertices > 200000) {
      enumerable = false;
      break;
    }
  }
  NumericBest best_max;
  if (enumerable) {
    for (std::size_t v = 0; v < n_vertices; ++v) {
      std::size_t idx = v;
      Matrix q = Matrix::Zero(nx, ny);
      for (Index x = 0; x < nx; ++x) {
        const auto& support = ch.row_support()[static_cast<std::size_t>(x)];
        q(x, support[idx % support.size()]) = 1.0;
        idx /= support.size();
      }
      consider(best_max, q, mi_raw(ch, q), true);
    }
  } else {
    // Best-effort beyond the enumeration cap.
    auto mi_obj = [&](const Matrix& q) { return mi_raw(ch, q); };
    auto mi_grad = [&](const Matrix& q) { return mi_gradient(ch, q); };
    for (const Matrix& start : grid_starts(ch, cfg)) {
      const AscentOut res = ascend(ch, mi_obj, mi_grad, start, cfg);
      consider(best_max, res.q, res.objective, res.converged);
    }
  }
  out.argmax = best_max.q;
  out.max = best_max.objective;
  return out;
}

// ---------------------------------------------------------------------------
// Bulk branch.

BranchResult bulk_unconstrained(const Channel& ch, double beta,
                                const SolverConfig& cfg) {
  check_numeric_beta(beta);
  auto objective = [&](const Matrix& q) {
    return bulk_objective_raw(ch, beta, q);
  };
  auto gradient = [&](const Matrix& q) { return bulk_gradient(ch, beta, q); };

  std::vector<Matrix> starts = grid_starts(ch, cfg);
  starts.push_back(ch.transition());
  starts.push_back(sparse_tilt(ch, beta).cond());
  starts.push_back(uniform_on_support(ch));

  SolverConfig screen_cfg = cfg;
  screen_cfg.refine_iterations =
      std::min(cfg.refine_iterations, kScreenIterations);
  std::vector<Matrix> screened(starts.size());
  std::vector<double> scores(starts.size());
  parallel_for(starts.size(), cfg.threads, [&](std::size_t i) {
    const AscentOut res =
        ascend(ch, objective, gradient, starts[i], screen_cfg);
    screened[i] = res.q;
    scores[i] = res.objective;
  });
  const std::vector<std::size_t> selected = select_leaders(scores, 3);

  std::vector<Matrix> finals(selected.size());
  std::vector<double> values(selected.size());
  std::vector<char> converged(selected.size(), 0);
  parallel_for(selected.size(), cfg.threads, [&](std::size_t j) {
    const AscentOut res =
        ascend(ch, objective, gradient, screened[selected[j]], cfg);
    finals[j] = res.q;
    values[j] = res.objective;
    converged[j] = res.converged ? 1 : 0;
  });
  NumericBest best;
  for (std::size_t j = 0; j < finals.size(); ++j) {
    consider(best, finals[j], values[j], converged[j] != 0);
  }
  if (!best.converged) {
    throw SolverError(
        "bulk_unconstrained: refinement did not reach convergence_tol; "
        "increase refine_iterations or coarse grid resolution");
  }
  renormalize_rows(ch, best.q);
  return package(ch, best, objective(best.q), /*constraint_active=*/false,
                 SolveMethod::constrained_numeric, /*mi_within_tol=*/true);
}

BranchResult psi_bulk(const Channel& ch, double beta, double rate,
                      const SolverConfig& cfg) {
  check_numeric_beta(beta);
  if (!(rate > 0.0)) throw std::domain_error("psi_bulk: rate must be > 0");

  BranchResult unconstrained = bulk_unconstrained(ch, beta, cfg);
  if (unconstrained.optimizer_mi.value() <= rate) {
    return unconstrained;
  }

  const MiRange range = feasible_mi_range(ch, cfg);
  if (rate < range.min - 1e-12) {
    return infeasible_result(/*constraint_active=*/true);
  }

  auto objective = [&](const Matrix& q) {
    return bulk_objective_raw(ch, beta, q);
  };
  auto gradient = [&](const Matrix& q) { return bulk_gradient(ch, beta, q); };

  std::vector<Matrix> starts = grid_starts(ch, cfg);
  starts.push_back(ch.transition());
  starts.push_back(sparse_tilt(ch, beta).cond());
  starts.push_back(unconstrained.optimizer->cond());

  NumericBest best = solve_constrained(
      ch, objective, gradient, rate, /*sense=*/+1, range.argmin,
      unconstrained.optimizer->cond(), std::move(starts), /*canonical=*/3,
      cfg);
  if (!best.converged) {
    throw SolverError("psi_bulk: constrained refinement did not converge");
  }
  renormalize_rows(ch, best.q);
  const double mi = mi_raw(ch, best.q);
  return package(ch, best, objective(best.q), /*constraint_active=*/true,
                 SolveMethod::constrained_numeric,
                 std::abs(mi - rate) <= kTolMi);
}

// ---------------------------------------------------------------------------
// Sparse branch.

BranchResult psi_sparse(const Channel& ch, double beta, double rate,
                        const SolverConfig& cfg) {
  if (!(beta > 0.0)) throw std::domain_error("psi_sparse: beta must be > 0");
  if (!(rate > 0.0)) throw std::domain_error("psi_sparse: rate must be > 0");

  const Nats i_s = i_sparse(ch, beta);
  if (rate <= i_s.value()) {
    // The tilt is sparse-feasible, so the supremum of F is its global
    // maximum C(beta) and the branch is linear in R.
    BranchResult out;
    out.value = Nats(rate * (1.0 - beta) + c_beta(ch, beta).value());
    out.optimizer = sparse_tilt(ch, beta);
    out.optimizer_mi = i_s;
    out.constraint_active = false;
    out.method = SolveMethod::closed_form;
    out.feasible = true;
    out.mi_within_tol = true;
    return out;
  }
  return psi_sparse_numeric(ch, beta, rate, cfg);
}

BranchResult psi_sparse_numeric(const Channel& ch, double beta, double rate,
                                const SolverConfig& cfg) {
  check_numeric_beta(beta);
  if (!(rate > 0.0)) {
    throw std::domain_error("psi_sparse_numeric: rate must be > 0");
  }

  const MiRange range = feasible_mi_range(ch, cfg);
  if (rate > range.max + 1e-12) {
    return infeasible_result(/*constraint_active=*/true);
  }

  auto objective = [&](const Matrix& q) { return f_raw(ch, beta, q); };
  auto gradient = [&](const Matrix& q) { return f_gradient(ch, beta, q); };

  const Matrix tilt = sparse_tilt(ch, beta).cond();
  std::vector<Matrix> starts = grid_starts(ch, cfg);
  starts.push_back(ch.transition());
  starts.push_back(tilt);

  NumericBest best =
      solve_constrained(ch, objective, gradient, rate, /*sense=*/-1,
                        range.argmax, tilt, std::move(starts),
                        /*canonical=*/2, cfg);
  if (!best.converged) {
    throw SolverError("psi_sparse: constrained refinement did not converge");
  }
  renormalize_rows(ch, best.q);
  const double mi = mi_raw(ch, best.q);
  BranchResult out = package(
      ch, best, rate * (1.0 - beta) + objective(best.q),
      /*constraint_active=*/true, SolveMethod::constrained_numeric,
      mi >= rate - kTolMi);
  return out;
}

}  // namespace rcfe
