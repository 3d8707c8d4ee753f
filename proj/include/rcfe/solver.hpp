#ifndef RCFE_SOLVER_HPP
#define RCFE_SOLVER_HPP

#include <optional>
#include <vector>

#include "rcfe/channel.hpp"
#include "rcfe/measures.hpp"
#include "rcfe/types.hpp"

namespace rcfe {

/// Knobs for the numeric branch solves. The defaults are tuned for small
/// alphabets, where the coarse grid is cheap and multi-start is close to
/// exhaustive; beyond |Y| ~ 8 the solves are best-effort multi-start.
struct SolverConfig {
  int coarse_grid_points_per_row = 21;
  int refine_iterations = 200;
  double refine_step_init = 0.1;
  double convergence_tol = 1e-9;
  std::vector<double> penalty_weight_schedule = {1e2, 1e3, 1e4, 1e5, 1e6, 1e7};
  // Worker count for multi-start evaluation; 0 = hardware concurrency.
  int threads = 1;
};

enum class SolveMethod { closed_form, constrained_numeric };

/// Outcome of one branch evaluation. `value` is recomputed from `optimizer`
/// so the two always agree. When the constraint set is empty (`feasible` is
/// false) the value carries a -inf flag and there is no optimizer.
///
/// `mi_within_tol`: for an active bulk constraint this certifies
/// |I_Q - R| <= kTolMi at the optimizer; for a numeric sparse solve it
/// certifies I_Q >= R - kTolMi. A false value is a flag, not an error: the
/// solve could not place the optimizer on target and the caller decides.
struct BranchResult {
  Nats value;
  std::optional<JointDistribution> optimizer;
  Nats optimizer_mi;
  bool constraint_active = false;
  SolveMethod method = SolveMethod::constrained_numeric;
  bool feasible = true;
  bool mi_within_tol = true;
};

// Per-letter Gibbs tilt of the channel: row x proportional to [W(.|x)]^beta,
// computed in the log domain; exact at any beta > 0 and inherits the support
// of W exactly. Maximizes F over all feasible joints.
JointDistribution sparse_tilt(const Channel& ch, double beta);

// C(beta) = sum_x P_X(x) log sum_y [W(y|x)]^beta; the global maximum of F.
Nats c_beta(const Channel& ch, double beta);

// I^s(beta): mutual information of the sparse tilt.
Nats i_sparse(const Channel& ch, double beta);

// Range of I_Q(X;Y) over the feasible set (rows on the support of W).
// The minimum is a convex problem; the maximum is attained at a vertex and
// found by exact vertex enumeration on small alphabets.
struct MiRange {
  double min = 0.0;
  double max = 0.0;
  Matrix argmin;
  Matrix argmax;
};
MiRange feasible_mi_range(const Channel& ch, const SolverConfig& cfg = {});

// Unconstrained maximum of the bulk objective
//   (1-beta) I_Q(X;Y) + F(Q) = (1-beta) H_Q(Y) - beta D(Q_{Y|X}||W|P_X)
// over feasible joints. optimizer_mi is I^b(beta).
BranchResult bulk_unconstrained(const Channel& ch, double beta,
                                const SolverConfig& cfg = {});

// Bulk branch at rate R: the same objective restricted to I_Q <= R. Returns
// the unconstrained result when R >= I^b(beta).
BranchResult psi_bulk(const Channel& ch, double beta, double rate,
                      const SolverConfig& cfg = {});

// Sparse branch at rate R: R(1-beta) + sup{F(Q) : I_Q >= R} (closure of the
// strict constraint). Closed form R(1-beta) + C(beta) when R <= I^s(beta).
BranchResult psi_sparse(const Channel& ch, double beta, double rate,
                        const SolverConfig& cfg = {});

// Validation path: the sparse branch forced through the constrained numeric
// solver even where the closed form applies.
BranchResult psi_sparse_numeric(const Channel& ch, double beta, double rate,
                                const SolverConfig& cfg = {});

}  // namespace rcfe

#endif  // RCFE_SOLVER_HPP
